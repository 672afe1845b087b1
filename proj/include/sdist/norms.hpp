#ifndef SDIST_NORMS_HPP
#define SDIST_NORMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "family_machine.hpp"
#include "finset.hpp"
#include "ordinal.hpp"
#include "rational.hpp"
#include "vecfun.hpp"

namespace sdist {

// ---------------------------------------------------------------------------
// spaces
// ---------------------------------------------------------------------------

struct NormSpace {
    enum class Kind { L1, Lp, C0, Tsirelson, Schlumprecht, XOmegaXi };

    Kind kind = Kind::L1;
    Rational p = 1;
    double tolerance = 1e-12;
    Ordinal xi;
    std::size_t depth_cap = 64;

    static NormSpace l1() { return {}; }
    static NormSpace lp(Rational p)
    {
        if (p < 1)
            throw std::invalid_argument("lp needs p >= 1");
        NormSpace s;
        s.kind = Kind::Lp;
        s.p = std::move(p);
        return s;
    }
    static NormSpace c0()
    {
        NormSpace s;
        s.kind = Kind::C0;
        return s;
    }
    static NormSpace tsirelson()
    {
        NormSpace s;
        s.kind = Kind::Tsirelson;
        return s;
    }
    static NormSpace schlumprecht(double tol = 1e-12)
    {
        if (!(tol > 0))
            throw std::invalid_argument("tolerance must be positive");
        NormSpace s;
        s.kind = Kind::Schlumprecht;
        s.tolerance = tol;
        return s;
    }
    static NormSpace x_omega(Ordinal xi, std::size_t depth_cap = 64)
    {
        if (xi.is_zero())
            throw std::invalid_argument("X(xi) needs xi >= 1");
        if (depth_cap == 0)
            throw std::invalid_argument("depth cap must be >= 1");
        NormSpace s;
        s.kind = Kind::XOmegaXi;
        s.xi = std::move(xi);
        s.depth_cap = depth_cap;
        return s;
    }

    /// Rational arithmetic reproduces the value exactly.
    bool exact() const
    {
        return kind == Kind::L1 || kind == Kind::C0 || kind == Kind::Tsirelson || kind == Kind::XOmegaXi ||
               (kind == Kind::Lp && p == 1);
    }

    friend bool operator==(const NormSpace& a, const NormSpace& b)
    {
        if (a.kind != b.kind)
            return false;
        switch (a.kind) {
        case Kind::Lp:
            return a.p == b.p;
        case Kind::Schlumprecht:
            return a.tolerance == b.tolerance;
        case Kind::XOmegaXi:
            return a.xi == b.xi && a.depth_cap == b.depth_cap;
        default:
            return true;
        }
    }
};

/// Grammar text: `l1`, `lp(p)`, `c0`, `T`, `S(tol=..)`, `X(<ordinal>, cap=..)`.
inline std::string to_string(const NormSpace& s)
{
    switch (s.kind) {
    case NormSpace::Kind::L1:
        return "l1";
    case NormSpace::Kind::Lp:
        return "lp(" + to_string(s.p) + ")";
    case NormSpace::Kind::C0:
        return "c0";
    case NormSpace::Kind::Tsirelson:
        return "T";
    case NormSpace::Kind::Schlumprecht: {
        std::ostringstream os;
        os.precision(17);
        os << "S(tol=" << s.tolerance << ")";
        return os.str();
    }
    case NormSpace::Kind::XOmegaXi:
        return "X(" + to_string(s.xi) + ", cap=" + std::to_string(s.depth_cap) + ")";
    }
    return {};
}

struct NormResult {
    /// exact value, or a certified lower bound when !converged,
    /// or a rounded value when !exact
    Rational value;
    long double approx = 0;
    bool exact = true;
    bool converged = true;
    long double tolerance = 0;
    /// W-depth reached (X spaces)
    std::size_t depth = 0;
    std::optional<Functional> witness;
    /// partition or interval witness, as coordinate sets
    std::vector<FinSet> pieces;
};

namespace detail {

/// Support coordinates of x with magnitudes and signs; intervals of the
/// support are addressed by position ranges [a, b].
struct SupportView {
    std::vector<Index> coords;
    std::vector<Rational> mags;
    std::vector<int> signs;

    explicit SupportView(const Vector& x)
    {
        for (const auto& [i, v] : x) {
            coords.push_back(i);
            mags.push_back(sdist::abs(v));
            signs.push_back(v > 0 ? 1 : -1);
        }
    }

    std::size_t size() const { return coords.size(); }

    FinSet coords_of(std::size_t a, std::size_t b) const
    {
        return FinSet(std::vector<Index>(coords.begin() + std::ptrdiff_t(a), coords.begin() + std::ptrdiff_t(b) + 1));
    }

    Functional unit(std::size_t pos) const { return Functional::unit(signs[pos], coords[pos]); }
};

template <class Scalar>
Scalar from_rational(const Rational& r)
{
    if constexpr (std::is_same_v<Scalar, Rational>)
        return r;
    else
        return Scalar(r.get_d());
}

/// Tsirelson norm of every support interval:
///   N(I) = max(|x|_inf, 1/2 max sum_{i<=k} N(E_i)),  k <= min E_1.
/// Later pieces can be taken to cover the rest of I (monotonicity); only the
/// start of the first piece matters, and the largest allowed k is best.
template <class Scalar>
class TsirelsonTable {
public:
    TsirelsonTable(std::vector<Index> coords, std::vector<Scalar> mags)
        : coords_(std::move(coords)), mags_(std::move(mags)), s_(coords_.size())
    {
        n_.assign(s_ * s_, Scalar(0));
        choice_.assign(s_ * s_, Choice{});
        qmemo_.assign(s_ * s_ * (s_ + 1), std::nullopt);
        for (std::size_t len = 1; len <= s_; ++len)
            for (std::size_t a = 0; a + len <= s_; ++a)
                compute(a, a + len - 1);
    }

    std::size_t size() const { return s_; }
    const Scalar& at(std::size_t a, std::size_t b) const { return n_[a * s_ + b]; }

    /// Partition tree achieving at(a, b): leaves +-e_n^*, inner nodes (1/2) sum.
    Functional witness(std::size_t a, std::size_t b, const std::vector<int>& signs) const
    {
        const Choice& c = choice_[a * s_ + b];
        if (c.split == false)
            return Functional::unit(signs[c.arg], coords_[c.arg]);
        std::vector<Functional> kids;
        for (auto [u, v] : runs(c.arg, b, c.k))
            kids.push_back(witness(u, v, signs));
        return Functional::average(2, std::move(kids));
    }

    /// Top-level pieces of the witness for at(a, b) (empty when |x|_inf wins).
    std::vector<std::pair<std::size_t, std::size_t>> top_pieces(std::size_t a, std::size_t b) const
    {
        const Choice& c = choice_[a * s_ + b];
        if (!c.split)
            return {};
        return runs(c.arg, b, c.k);
    }

private:
    struct Choice {
        bool split = false;
        std::size_t arg = 0; // argmax coordinate, or first piece start
        std::size_t k = 0;
    };

    void compute(std::size_t a, std::size_t b)
    {
        Scalar best = 0;
        Choice ch;
        for (std::size_t i = a; i <= b; ++i)
            if (mags_[i] > best) {
                best = mags_[i];
                ch.arg = i;
            }
        for (std::size_t first = a; first < b; ++first) {
            std::size_t k = std::min<std::size_t>(coords_[first], b - first + 1);
            if (k < 2)
                continue;
            Scalar v = split_value(first, b, k) / Scalar(2);
            if (v > best) {
                best = v;
                ch = Choice{true, first, k};
            }
        }
        n_[a * s_ + b] = best;
        choice_[a * s_ + b] = ch;
    }

    // at least two pieces covering [first, b], at most k
    Scalar split_value(std::size_t first, std::size_t b, std::size_t k)
    {
        Scalar best = -1;
        for (std::size_t e = first; e < b; ++e) {
            Scalar v = at(first, e) + cover(e + 1, b, k - 1);
            if (v > best)
                best = v;
        }
        return best;
    }

    // max over partitions of [c, b] into 1..r consecutive runs
    const Scalar& cover(std::size_t c, std::size_t b, std::size_t r)
    {
        r = std::min(r, b - c + 1);
        auto& slot = qmemo_[(c * s_ + b) * (s_ + 1) + r];
        if (slot)
            return *slot;
        Scalar best = at(c, b);
        if (r >= 2)
            for (std::size_t e = c; e < b; ++e) {
                Scalar v = at(c, e) + cover(e + 1, b, r - 1);
                if (v > best)
                    best = v;
            }
        slot = best;
        return *slot;
    }

    const Scalar& cover_cached(std::size_t c, std::size_t b, std::size_t r) const
    {
        r = std::min(r, b - c + 1);
        return *qmemo_[(c * s_ + b) * (s_ + 1) + r];
    }

    std::vector<std::pair<std::size_t, std::size_t>> runs(std::size_t first, std::size_t b, std::size_t k) const
    {
        // first piece [first, e], then a cover of [e+1, b] with k-1 runs
        std::vector<std::pair<std::size_t, std::size_t>> out;
        Scalar target = split_target(first, b, k);
        for (std::size_t e = first; e < b; ++e)
            if (at(first, e) + cover_cached(e + 1, b, k - 1) == target) {
                out.emplace_back(first, e);
                cover_runs(e + 1, b, k - 1, out);
                return out;
            }
        throw std::logic_error("tsirelson witness reconstruction failed");
    }

    Scalar split_target(std::size_t first, std::size_t b, std::size_t k) const
    {
        Scalar best = -1;
        for (std::size_t e = first; e < b; ++e) {
            Scalar v = at(first, e) + cover_cached(e + 1, b, k - 1);
            if (v > best)
                best = v;
        }
        return best;
    }

    void cover_runs(std::size_t c, std::size_t b, std::size_t r,
                    std::vector<std::pair<std::size_t, std::size_t>>& out) const
    {
        r = std::min(r, b - c + 1);
        const Scalar& target = cover_cached(c, b, r);
        if (at(c, b) == target) {
            out.emplace_back(c, b);
            return;
        }
        for (std::size_t e = c; e < b; ++e)
            if (at(c, e) + cover_cached(e + 1, b, r - 1) == target) {
                out.emplace_back(c, e);
                cover_runs(e + 1, b, r - 1, out);
                return;
            }
        throw std::logic_error("tsirelson cover reconstruction failed");
    }

    std::vector<Index> coords_;
    std::vector<Scalar> mags_;
    std::size_t s_;
    std::vector<Scalar> n_;
    std::vector<Choice> choice_;
    std::vector<std::optional<Scalar>> qmemo_;
};

/// Schlumprecht norm of every support interval:
///   N(I) = max(|x|_inf, max_{l>=2} theta_l sum_{i<=l} N(E_i)),  theta_l = 1/log2(l+1).
class SchlumprechtTable {
public:
    using Scalar = long double;

    explicit SchlumprechtTable(std::vector<Scalar> mags) : mags_(std::move(mags)), s_(mags_.size())
    {
        n_.assign(s_ * s_, 0);
        split_.assign(s_ * s_, 0);
        memo_.assign(s_ * s_ * (s_ + 1), -1);
        for (std::size_t len = 1; len <= s_; ++len)
            for (std::size_t a = 0; a + len <= s_; ++a)
                compute(a, a + len - 1);
    }

    Scalar at(std::size_t a, std::size_t b) const { return n_[a * s_ + b]; }

    static Scalar theta(std::size_t l) { return 1.0L / std::log2(static_cast<Scalar>(l) + 1.0L); }

    /// top-level pieces of the maximizing partition; empty when |x|_inf wins
    std::vector<std::pair<std::size_t, std::size_t>> top_pieces(std::size_t a, std::size_t b)
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        std::size_t l = split_[a * s_ + b];
        if (l == 0)
            return out;
        std::size_t c = a;
        while (l > 1) {
            Scalar target = exact_pieces(c, b, l);
            for (std::size_t e = c; e < b; ++e)
                if (at(c, e) + exact_pieces(e + 1, b, l - 1) == target) {
                    out.emplace_back(c, e);
                    c = e + 1;
                    break;
                }
            --l;
        }
        out.emplace_back(c, b);
        return out;
    }

private:
    void compute(std::size_t a, std::size_t b)
    {
        Scalar best = 0;
        for (std::size_t i = a; i <= b; ++i)
            best = std::max(best, mags_[i]);
        std::size_t arg = 0;
        for (std::size_t l = 2; l <= b - a + 1; ++l) {
            Scalar v = theta(l) * exact_pieces(a, b, l);
            if (v > best) {
                best = v;
                arg = l;
            }
        }
        n_[a * s_ + b] = best;
        split_[a * s_ + b] = arg;
    }

    // max over partitions of [c, b] into exactly l runs (l >= 2 uses shorter intervals only)
    Scalar exact_pieces(std::size_t c, std::size_t b, std::size_t l)
    {
        if (l == 1)
            return at(c, b);
        auto& slot = memo_[(c * s_ + b) * (s_ + 1) + l];
        if (slot >= 0)
            return slot;
        Scalar best = -1;
        for (std::size_t e = c; e + l - 1 <= b; ++e)
            best = std::max(best, at(c, e) + exact_pieces(e + 1, b, l - 1));
        slot = best;
        return slot;
    }

    std::vector<Scalar> mags_;
    std::size_t s_;
    std::vector<Scalar> n_;
    std::vector<std::size_t> split_;
    std::vector<Scalar> memo_;
};

/// Norm of X^{w^xi} on every support interval, level by level:
///   N_0 = |.|_inf,  N_{m+1} = max(N_m, A_{m+1}, S_{m+1})
/// where N_m(I) = sup{f(x|I) : f in W_m},
///   A_{m+1}(I) = P_m(I, 2) / 2,
///   S_{m+1}(I) = sup sum_q P_{m-1}(E_q, l_q) / l_q
/// over successive runs E_q in I with {min E_q} in S_{w^xi}, l_1 = 2 and
/// l_q = max(l_{q-1} + 1, max E_{q-1} + 1), and P_m(I, k) the best sum of
/// N_m over at most k successive runs in I.
/// Minimal sizes are optimal because P(E, l + 1)/(l + 1) <= P(E, l)/l and
/// smaller sizes loosen every later constraint.
class XNormTable {
public:
    XNormTable(const Vector& x, const Ordinal& xi, std::size_t depth_cap)
        : view_(x), s_(view_.size()), machine_(FamilyExpr::schreier(Ordinal::power(xi)))
    {
        if (xi.is_zero())
            throw std::invalid_argument("X(xi) needs xi >= 1");
        levels_.emplace_back();
        Level& l0 = levels_.back();
        l0.n.assign(s_ * s_, Rational(0));
        l0.src.assign(s_ * s_, Source{});
        for (std::size_t a = 0; a < s_; ++a)
            for (std::size_t b = a; b < s_; ++b) {
                std::size_t arg = a;
                for (std::size_t i = a; i <= b; ++i)
                    if (view_.mags[i] > view_.mags[arg])
                        arg = i;
                l0.n[a * s_ + b] = view_.mags[arg];
                l0.src[a * s_ + b] = Source{Source::Linf, arg, {}};
            }
        if (s_ == 0) {
            converged_ = true;
            return;
        }
        for (std::size_t m = 0; m < depth_cap; ++m) {
            next_level();
            std::size_t top = levels_.size() - 1;
            if (top >= 2 && levels_[top].n == levels_[top - 1].n && levels_[top - 1].n == levels_[top - 2].n) {
                converged_ = true;
                break;
            }
        }
    }

    bool converged() const { return converged_; }
    std::size_t depth() const { return levels_.size() - 1; }
    std::size_t size() const { return s_; }
    const SupportView& view() const { return view_; }

    const Rational& at(std::size_t a, std::size_t b) const { return levels_.back().n[a * s_ + b]; }
    const Rational& at_level(std::size_t m, std::size_t a, std::size_t b) const { return levels_[m].n[a * s_ + b]; }

    Functional witness(std::size_t a, std::size_t b) { return witness(depth(), a, b); }

    /// best sum of N over at most k successive runs in [a, b], at the final level
    Rational runs_value(std::size_t a, std::size_t b, std::size_t k) { return p(depth(), a, b, k); }
    std::vector<std::pair<std::size_t, std::size_t>> runs(std::size_t a, std::size_t b, std::size_t k)
    {
        return p_runs(depth(), a, b, k);
    }

    Functional witness(std::size_t m, std::size_t a, std::size_t b)
    {
        const Source& src = levels_[m].src[a * s_ + b];
        switch (src.kind) {
        case Source::Prev:
            return witness(m - 1, a, b);
        case Source::Linf:
            return view_.unit(src.arg);
        case Source::Avg: {
            std::vector<Functional> kids;
            for (auto [u, v] : p_runs(m - 1, a, b, 2))
                kids.push_back(witness(m - 1, u, v));
            return Functional::average(2, std::move(kids));
        }
        case Source::Sch: {
            std::vector<Functional> alphas;
            for (const auto& [u, v, l] : src.sch) {
                std::vector<Functional> kids;
                for (auto [c, d] : p_runs(m - 2, u, v, std::size_t(l)))
                    kids.push_back(witness(m - 2, c, d));
                alphas.push_back(Functional::average(l, std::move(kids)));
            }
            return Functional::schreier(std::move(alphas));
        }
        }
        throw std::logic_error("bad witness source");
    }

private:
    struct Source {
        enum Kind { Prev, Linf, Avg, Sch } kind = Prev;
        std::size_t arg = 0;
        std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> sch;
    };
    struct Level {
        std::vector<Rational> n;
        std::vector<Source> src;
        std::unordered_map<std::uint64_t, Rational> pmemo;
    };

    static std::uint64_t key(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d = 0)
    {
        return (a << 48) ^ (b << 32) ^ (c << 16) ^ d;
    }

    // P_m([a, b], k): at most k successive runs inside [a, b], gaps allowed
    Rational p(std::size_t m, std::size_t a, std::size_t b, std::size_t k)
    {
        if (a > b || k == 0)
            return Rational(0);
        k = std::min(k, b - a + 1);
        auto& memo = levels_[m].pmemo;
        std::uint64_t kk = key(a, b, k);
        if (auto it = memo.find(kk); it != memo.end())
            return it->second;
        Rational best = p(m, a + 1 <= b ? a + 1 : b + 1, b, k);
        for (std::size_t e = a; e <= b; ++e) {
            Rational v = levels_[m].n[a * s_ + e] + (e < b ? p(m, e + 1, b, k - 1) : Rational(0));
            if (v > best)
                best = v;
        }
        memo.emplace(kk, best);
        return best;
    }

    std::vector<std::pair<std::size_t, std::size_t>> p_runs(std::size_t m, std::size_t a, std::size_t b, std::size_t k)
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        while (a <= b && k > 0) {
            k = std::min(k, b - a + 1);
            Rational target = p(m, a, b, k);
            if (target == 0)
                break;
            bool found = false;
            for (std::size_t e = a; e <= b && !found; ++e) {
                Rational v = levels_[m].n[a * s_ + e] + (e < b ? p(m, e + 1, b, k - 1) : Rational(0));
                if (v == target) {
                    out.emplace_back(a, e);
                    a = e + 1;
                    --k;
                    found = true;
                }
            }
            if (!found)
                ++a; // skip position a
        }
        return out;
    }

    struct SchState {
        Rational value;
        bool stop = true;
        std::size_t a = 0, e = 0;
        std::uint64_t l = 0;
        MachineState next;
    };

    // best Schreier sum from position pos (end b fixed), next size l, admissibility state st
    Rational sch(std::size_t m, std::size_t pos, std::size_t b, std::uint64_t l, MachineState st,
                 std::unordered_map<std::uint64_t, SchState>& memo)
    {
        if (pos > b)
            return Rational(0);
        std::uint64_t kk = key(pos, std::min<std::uint64_t>(l, 0xFFFF), st.id >> 16, st.id & 0xFFFF);
        if (auto it = memo.find(kk); it != memo.end())
            return it->second.value;
        SchState best;
        best.value = 0;
        for (std::size_t a = pos; a <= b; ++a) {
            MachineState st2 = machine_.step(st, view_.coords[a]);
            if (FamilyMachine::is_dead(st2))
                continue;
            for (std::size_t e = a; e <= b; ++e) {
                Rational v = p(m - 1, a, e, std::size_t(std::min<std::uint64_t>(l, s_))) / Rational(long(l));
                std::uint64_t nl = std::max<std::uint64_t>(l + 1, std::uint64_t(view_.coords[e]) + 1);
                v += sch(m, e + 1, b, nl, st2, memo);
                if (v > best.value) {
                    best.value = v;
                    best.stop = false;
                    best.a = a;
                    best.e = e;
                    best.l = l;
                    best.next = st2;
                }
            }
        }
        memo.emplace(kk, best);
        return best.value;
    }

    void next_level()
    {
        const std::size_t m = levels_.size() - 1; // build level m + 1
        Level next;
        next.n.assign(s_ * s_, Rational(0));
        next.src.assign(s_ * s_, Source{});
        for (std::size_t b = 0; b < s_; ++b) {
            std::unordered_map<std::uint64_t, SchState> memo;
            for (std::size_t a = 0; a <= b; ++a) {
                Rational best = levels_[m].n[a * s_ + b];
                Source src{Source::Prev, 0, {}};
                Rational av = p(m, a, b, 2) / 2;
                if (av > best) {
                    best = av;
                    src = Source{Source::Avg, 0, {}};
                }
                if (m >= 1) {
                    Rational sv = sch(m, a, b, 2, FamilyMachine::initial(), memo);
                    if (sv > best) {
                        best = sv;
                        src = Source{Source::Sch, 0, sch_path(m, a, b, memo)};
                    }
                }
                next.n[a * s_ + b] = best;
                next.src[a * s_ + b] = std::move(src);
            }
        }
        levels_.push_back(std::move(next));
    }

    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>>
    sch_path(std::size_t m, std::size_t pos, std::size_t b, std::unordered_map<std::uint64_t, SchState>& memo)
    {
        std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> out;
        std::uint64_t l = 2;
        MachineState st = FamilyMachine::initial();
        while (pos <= b) {
            sch(m, pos, b, l, st, memo);
            const SchState& cur = memo.at(key(pos, std::min<std::uint64_t>(l, 0xFFFF), st.id >> 16, st.id & 0xFFFF));
            if (cur.stop)
                break;
            out.emplace_back(cur.a, cur.e, cur.l);
            std::uint64_t nl = std::max<std::uint64_t>(l + 1, std::uint64_t(view_.coords[cur.e]) + 1);
            pos = cur.e + 1;
            st = cur.next;
            l = nl;
        }
        return out;
    }

    SupportView view_;
    std::size_t s_;
    FamilyMachine machine_;
    std::vector<Level> levels_;
    bool converged_ = false;
};

inline FinSet piece_coords(const SupportView& v, std::size_t a, std::size_t b) { return v.coords_of(a, b); }

inline long double lp_value(const Vector& x, const Rational& p)
{
    long double pp = static_cast<long double>(p.get_d()), s = 0;
    for (const auto& [i, v] : x)
        s += std::pow(std::fabs(static_cast<long double>(v.get_d())), pp);
    return std::pow(s, 1.0L / pp);
}

inline Rational rational_of(long double v)
{
    Rational r(static_cast<double>(v));
    r.canonicalize();
    return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// evaluators
// ---------------------------------------------------------------------------

inline NormResult norm(const NormSpace& space, const Vector& x)
{
    NormResult r;
    if (x.empty())
        return r;
    detail::SupportView v(x);
    const std::size_t s = v.size();
    switch (space.kind) {
    case NormSpace::Kind::L1: {
        r.value = x.l1();
        std::vector<Functional> units;
        for (std::size_t i = 0; i < s; ++i)
            units.push_back(v.unit(i));
        r.witness = Functional::schreier(std::move(units));
        break;
    }
    case NormSpace::Kind::C0: {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < s; ++i)
            if (v.mags[i] > v.mags[arg])
                arg = i;
        r.value = v.mags[arg];
        r.witness = v.unit(arg);
        break;
    }
    case NormSpace::Kind::Lp:
        if (space.p == 1)
            return norm(NormSpace::l1(), x);
        r.approx = detail::lp_value(x, space.p);
        r.value = detail::rational_of(r.approx);
        r.exact = false;
        r.tolerance = 1e-15L * (1 + r.approx);
        return r;
    case NormSpace::Kind::Tsirelson: {
        detail::TsirelsonTable<Rational> t(v.coords, v.mags);
        r.value = t.at(0, s - 1);
        r.witness = t.witness(0, s - 1, v.signs);
        for (auto [a, b] : t.top_pieces(0, s - 1))
            r.pieces.push_back(v.coords_of(a, b));
        break;
    }
    case NormSpace::Kind::Schlumprecht: {
        std::vector<long double> mags;
        for (const auto& m : v.mags)
            mags.push_back(static_cast<long double>(m.get_d()));
        detail::SchlumprechtTable t(std::move(mags));
        r.approx = t.at(0, s - 1);
        r.value = detail::rational_of(r.approx);
        r.exact = false;
        r.tolerance = static_cast<long double>(space.tolerance);
        for (auto [a, b] : t.top_pieces(0, s - 1))
            r.pieces.push_back(v.coords_of(a, b));
        return r;
    }
    case NormSpace::Kind::XOmegaXi: {
        detail::XNormTable t(x, space.xi, space.depth_cap);
        r.value = t.at(0, s - 1);
        r.converged = t.converged();
        r.depth = t.depth();
        r.witness = t.witness(0, s - 1);
        break;
    }
    }
    r.approx = static_cast<long double>(r.value.get_d());
    return r;
}

/// ||x||_j = sup (1/j) sum_{q<=d} ||E_q x||, d <= j, in X^{w^xi}.
inline NormResult norm_j(const NormSpace& space, const Vector& x, std::size_t j)
{
    if (space.kind != NormSpace::Kind::XOmegaXi)
        throw std::invalid_argument("norm_j is defined for X spaces");
    if (j < 2)
        throw std::invalid_argument("norm_j needs j >= 2");
    NormResult r;
    if (x.empty())
        return r;
    detail::XNormTable t(x, space.xi, space.depth_cap);
    const std::size_t s = t.size();
    r.value = t.runs_value(0, s - 1, j) / Rational(long(j));
    r.converged = t.converged();
    r.depth = t.depth() + 1;
    std::vector<Functional> kids;
    for (auto [a, b] : t.runs(0, s - 1, j)) {
        kids.push_back(t.witness(a, b));
        r.pieces.push_back(t.view().coords_of(a, b));
    }
    r.witness = Functional::average(j, std::move(kids));
    r.approx = static_cast<long double>(r.value.get_d());
    return r;
}

/// Norm of x restricted to every support interval [a, b] (positions),
/// row-major s x s; exact unless the space is not.
struct RunNormTable {
    std::vector<Index> coords;
    std::vector<Rational> values;
    bool exact = true;
    bool converged = true;
    const Rational& at(std::size_t a, std::size_t b) const { return values[a * coords.size() + b]; }
};

inline RunNormTable run_norm_table(const NormSpace& space, const Vector& x)
{
    detail::SupportView v(x);
    const std::size_t s = v.size();
    RunNormTable out;
    out.coords = v.coords;
    out.values.assign(s * s, Rational(0));
    switch (space.kind) {
    case NormSpace::Kind::Tsirelson: {
        detail::TsirelsonTable<Rational> t(v.coords, v.mags);
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = a; b < s; ++b)
                out.values[a * s + b] = t.at(a, b);
        return out;
    }
    case NormSpace::Kind::XOmegaXi: {
        detail::XNormTable t(x, space.xi, space.depth_cap);
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = a; b < s; ++b)
                out.values[a * s + b] = t.at(a, b);
        out.converged = t.converged();
        return out;
    }
    case NormSpace::Kind::Schlumprecht: {
        std::vector<long double> mags;
        for (const auto& m : v.mags)
            mags.push_back(static_cast<long double>(m.get_d()));
        detail::SchlumprechtTable t(std::move(mags));
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = a; b < s; ++b)
                out.values[a * s + b] = detail::rational_of(t.at(a, b));
        out.exact = false;
        return out;
    }
    default:
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = a; b < s; ++b) {
                NormResult r = norm(space, x.restrict(v.coords[a], v.coords[b]));
                out.values[a * s + b] = r.value;
                out.exact = out.exact && r.exact;
            }
        return out;
    }
}

/// |x|_n = sup sum_{i<=n} ||I_i x|| over intervals I_1 < ... < I_n.
inline NormResult interval_norm(const NormSpace& space, const Vector& x, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("interval_norm needs n >= 1");
    NormResult r;
    if (x.empty())
        return r;
    RunNormTable t = run_norm_table(space, x);
    const std::size_t s = t.coords.size();
    // best[c][k]: runs inside [c, s-1], at most k of them
    std::vector<std::vector<Rational>> best(s + 1, std::vector<Rational>(n + 1, Rational(0)));
    for (std::size_t c = s; c-- > 0;)
        for (std::size_t k = 1; k <= n; ++k) {
            Rational b = best[c + 1][k];
            for (std::size_t e = c; e < s; ++e)
                b = std::max(b, Rational(t.at(c, e) + best[e + 1][k - 1]));
            best[c][k] = b;
        }
    r.value = best[0][n];
    r.exact = t.exact;
    r.converged = t.converged;
    std::size_t c = 0, k = n;
    while (c < s && k > 0) {
        if (best[c][k] == best[c + 1][k]) {
            ++c;
            continue;
        }
        for (std::size_t e = c; e < s; ++e)
            if (t.at(c, e) + best[e + 1][k - 1] == best[c][k]) {
                r.pieces.push_back(FinSet::interval(t.coords[c], t.coords[e]));
                c = e + 1;
                --k;
                break;
            }
    }
    r.approx = static_cast<long double>(r.value.get_d());
    return r;
}

/// Tsirelson norm in a floating scalar, for inner loops of searches.
template <class Scalar>
Scalar tsirelson_norm(const std::vector<Index>& coords, const std::vector<Scalar>& mags)
{
    if (coords.empty())
        return Scalar(0);
    detail::TsirelsonTable<Scalar> t(coords, mags);
    return t.at(0, coords.size() - 1);
}

} // namespace sdist

#endif // SDIST_NORMS_HPP
