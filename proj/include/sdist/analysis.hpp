#ifndef SDIST_ANALYSIS_HPP
#define SDIST_ANALYSIS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "constructions.hpp"
#include "estimators.hpp"
#include "families.hpp"
#include "norming_set.hpp"
#include "norms.hpp"
#include "vecfun.hpp"

namespace sdist {

// ---------------------------------------------------------------------------
// distortion
// ---------------------------------------------------------------------------

struct DistortionWitness {
    FinSet E;
    Vector x, y;
    /// |x| / |y| in the second norm, with ||x|| = ||y|| = 1
    Rational ratio;
};

struct DistortionReport {
    bool found = false;
    /// first pair above t when found, else the best pair seen
    std::optional<DistortionWitness> witness;
    std::optional<DistortionWitness> best;
    std::size_t sets_examined = 0;
    std::size_t candidates = 0;
    bool budget_exhausted = false;
};

namespace detail {

/// Structured vectors in the span of the blocks indexed by e: single blocks,
/// flat sums over runs of e, pairs of normalized runs, and a small grid.
inline std::vector<Vector> span_candidates(const NormEvaluator& first, const BlockSequence& bs, const FinSet& e)
{
    std::vector<Index> idx(e.begin(), e.end());
    const std::size_t m = idx.size();
    std::vector<Vector> out;
    auto run = [&](std::size_t a, std::size_t b) {
        std::vector<Rational> ones(b - a, Rational(1));
        return bs.combine(FinSet(std::vector<Index>(idx.begin() + std::ptrdiff_t(a), idx.begin() + std::ptrdiff_t(b))), ones);
    };
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b <= m; ++b)
            out.push_back(run(a, b));
    for (std::size_t s = 1; s < m; ++s) {
        Vector u = run(0, s), v = run(s, m);
        double nu = first.fast(u), nv = first.fast(v);
        if (nu > 0 && nv > 0)
            out.push_back(u * Rational(1.0 / nu) + v * Rational(1.0 / nv));
    }
    if (m <= 4) {
        const Rational grid[] = {0, make_rational(1, 2), 1};
        std::vector<std::size_t> k(m, 0);
        while (true) {
            std::vector<Rational> a;
            bool zero = true;
            for (std::size_t i = 0; i < m; ++i) {
                a.push_back(grid[k[i]]);
                zero = zero && k[i] == 0;
            }
            if (!zero)
                out.push_back(bs.combine(e, a));
            std::size_t i = 0;
            while (i < m && ++k[i] == 3)
                k[i++] = 0;
            if (i == m)
                break;
        }
    }
    return out;
}

inline DistortionWitness certify_pair(const NormEvaluator& first, const NormEvaluator& second, const FinSet& e,
                                      const Vector& u, const Vector& v)
{
    Vector x = u * (Rational(1) / first.exact(u));
    Vector y = v * (Rational(1) / first.exact(v));
    return DistortionWitness{e, x, y, second.exact(x) / second.exact(y)};
}

} // namespace detail

/// Looks for E in fam (inside the horizon) and unit vectors x, y in the span
/// of the blocks on E with |x|/|y| > t. `budget` caps candidate evaluations.
inline DistortionReport distortion_witness(const NormEvaluator& first, const NormEvaluator& second, const FamilyExpr& fam,
                                           const BlockSequence& bs, const Rational& t, std::size_t horizon,
                                           std::size_t budget = 200000, const SearchOptions& opt = {})
{
    if (t <= 1)
        throw std::invalid_argument("distortion_witness needs t > 1");
    if (horizon > bs.size())
        throw std::invalid_argument("horizon exceeds the available blocks");
    DistortionReport out;
    bool sampled = false;
    std::vector<FinSet> sets = family_sets(fam, opt.first, Index(horizon), opt.set_budget, opt.seed, sampled);
    out.budget_exhausted = sampled;
    double best_fast = -1;
    for (const auto& e : sets) {
        std::vector<Vector> cand = detail::span_candidates(first, bs, e);
        if (out.candidates + cand.size() > budget) {
            out.budget_exhausted = true;
            break;
        }
        ++out.sets_examined;
        out.candidates += cand.size();
        std::size_t hi = 0, lo = 0;
        double rhi = -1, rlo = -1;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            double nf = first.fast(cand[i]);
            if (nf <= 0)
                continue;
            double r = second.fast(cand[i]) / nf;
            if (rhi < 0 || r > rhi)
                rhi = r, hi = i;
            if (rlo < 0 || r < rlo)
                rlo = r, lo = i;
        }
        if (rhi < 0 || (rhi / rlo <= best_fast && (out.found || rhi / rlo <= t.get_d() * (1 - 1e-12))))
            continue;
        best_fast = std::max(best_fast, rhi / rlo);
        DistortionWitness w = detail::certify_pair(first, second, e, cand[hi], cand[lo]);
        if (!out.best || w.ratio > out.best->ratio)
            out.best = w;
        if (!out.found && w.ratio > t) {
            out.found = true;
            out.witness = w;
        }
    }
    if (!out.found)
        out.witness = out.best;
    return out;
}

/// Re-checks membership, unit norms, spans and the stored ratio.
inline bool revalidate(const DistortionWitness& w, const NormEvaluator& first, const NormEvaluator& second,
                       const FamilyExpr& fam, const BlockSequence& bs)
{
    if (!member(w.E, fam).member)
        return false;
    if (first.exact(w.x) != 1 || first.exact(w.y) != 1)
        return false;
    FinSet span;
    for (Index i : w.E)
        span = span.union_with(bs.at(i).support());
    if (!w.x.support().subset_of(span) || !w.y.support().subset_of(span))
        return false;
    return second.exact(w.x) / second.exact(w.y) == w.ratio;
}

// ---------------------------------------------------------------------------
// |.|_n distortion of X
// ---------------------------------------------------------------------------

/// (n / (1+eps)^2) (k / (k + 2n))
inline Rational interval_bound_formula(std::uint64_t n, std::uint64_t k, const Rational& eps)
{
    Rational one_eps = 1 + eps;
    return Rational(long(n)) / (one_eps * one_eps) * Rational(long(k)) / Rational(long(k + 2 * n));
}

struct IntervalBoundReport {
    Ordinal xi;
    std::uint64_t n = 0, k = 0;
    Rational eps, formula;
    FinSet y_set, z_set, combined;
    bool combined_member = false;
    /// norms of the unnormalized sums and their |.|_n values
    Rational y_norm, z_norm, y_interval, z_interval;
    std::optional<Rational> achieved;
    /// achieved / formula
    std::optional<Rational> attainment;
    bool budget_exhausted = false;
};

/// Desk-scale run inside X_{w^xi} on the unit vector basis: y_1..y_k are the
/// consecutive units from n+k on, z_1..z_n are units at m, 2m+1, ... after them.
inline IntervalBoundReport theorem3_experiment(const Ordinal& xi, std::uint64_t n, std::uint64_t k, const Rational& eps,
                                          Index horizon)
{
    if (xi.is_zero())
        throw std::invalid_argument("theorem3_experiment needs xi >= 1");
    if (n == 0 || k < n)
        throw std::invalid_argument("theorem3_experiment needs 1 <= n <= k");
    if (eps <= 0)
        throw std::invalid_argument("theorem3_experiment needs eps > 0");
    IntervalBoundReport out;
    out.xi = xi;
    out.n = n;
    out.k = k;
    out.eps = eps;
    out.formula = interval_bound_formula(n, k, eps);
    const Index start = Index(n + k);
    std::vector<Index> ys, zs;
    for (Index j = 0; j < Index(k); ++j)
        ys.push_back(start + j);
    Index m = start + Index(k);
    for (std::uint64_t i = 0; i < n; ++i, m = 2 * m + 1)
        zs.push_back(m);
    out.y_set = FinSet(ys);
    out.z_set = FinSet(zs);
    out.combined = out.y_set.union_with(out.z_set);
    out.combined_member = member(out.combined, FamilyExpr::schreier(add(Ordinal::power(xi), Ordinal::natural(1)))).member;
    if (out.combined.max() > horizon) {
        out.budget_exhausted = true;
        return out;
    }
    const NormSpace X = NormSpace::x_omega(xi);
    auto flat = [](const FinSet& s) {
        std::map<Index, Rational> v;
        for (Index i : s)
            v[i] = 1;
        return Vector::from_map(v);
    };
    Vector y = flat(out.y_set), z = flat(out.z_set);
    NormResult ny = norm(X, y), nz = norm(X, z);
    if (!ny.converged || !nz.converged) {
        out.budget_exhausted = true;
        return out;
    }
    out.y_norm = ny.value;
    out.z_norm = nz.value;
    out.y_interval = interval_norm(X, y, n).value;
    out.z_interval = interval_norm(X, z, n).value;
    out.achieved = (out.z_interval / out.z_norm) / (out.y_interval / out.y_norm);
    out.attainment = *out.achieved / out.formula;
    return out;
}

// ---------------------------------------------------------------------------
// two-norm ratio algebra
// ---------------------------------------------------------------------------

/// a^-1 sum|a_i| <= ||x|| <= b sum|a_i| and a0^-1 sum|a_i| <= |x| <= b0 sum|a_i|.
struct RatioConstants {
    Rational a, a0, b, b0;
};

inline RatioConstants ratio_constants(const SpreadingEstimate& first, const SpreadingEstimate& second)
{
    if (first.l1_lower <= 0 || second.l1_lower <= 0)
        throw std::invalid_argument("lower constants must be positive");
    return RatioConstants{Rational(1) / first.l1_lower, Rational(1) / second.l1_lower, first.l1_upper, second.l1_upper};
}

struct RatioBoundReport {
    std::size_t samples = 0, violations = 0;
    Rational max_ratio, bound, delta;
    std::string first_violation;
    bool ok() const { return violations == 0; }
};

/// Samples unit pairs x, y in spans of family sets and checks
/// |x|/|y| <= b0 sum|a_i| / (a0^-1 sum|b_i|) <= b0 a a0 b <= (1+delta)^2.
inline RatioBoundReport ratio_bound_check(const NormEvaluator& first, const NormEvaluator& second,
                                          const RatioConstants& c, const BlockSequence& bs, const FamilyExpr& fam,
                                          std::size_t samples, std::size_t horizon, std::uint64_t seed = 1)
{
    RatioBoundReport out;
    out.delta = std::max(c.a * c.b, c.a0 * c.b0) - 1;
    out.bound = (1 + out.delta) * (1 + out.delta);
    bool sampled = false;
    std::vector<FinSet> sets = family_sets(fam, 1, Index(horizon), 2000, seed, sampled);
    if (sets.empty())
        return out;
    std::mt19937_64 rng(seed);
    auto coeffs = [&](std::size_t m) {
        std::vector<Rational> a(m);
        bool zero = true;
        while (zero)
            for (auto& v : a) {
                v = Rational(long(rng() % 7) - 3);
                zero = zero && v == 0;
            }
        return a;
    };
    auto l1 = [](const std::vector<Rational>& a) {
        Rational s = 0;
        for (const auto& v : a)
            s += sdist::abs(v);
        return s;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        const FinSet& e = sets[rng() % sets.size()];
        std::vector<Rational> a = coeffs(e.size()), b = coeffs(e.size());
        Rational na = first.exact(bs.combine(e, a)), nb = first.exact(bs.combine(e, b));
        for (auto& v : a)
            v /= na;
        for (auto& v : b)
            v /= nb;
        Vector x = bs.combine(e, a), y = bs.combine(e, b);
        Rational r = second.exact(x) / second.exact(y);
        Rational c1 = c.b0 * l1(a) / (l1(b) / c.a0);
        Rational c2 = c.b0 * c.a * c.a0 * c.b;
        ++out.samples;
        out.max_ratio = std::max(out.max_ratio, r);
        const char* link = r > c1 ? "ratio above coefficient bound" : c1 > c2 ? "coefficient bound above constant bound"
                                 : c2 > out.bound                  ? "constant bound above (1+delta)^2"
                                                                   : nullptr;
        if (link) {
            if (out.violations++ == 0)
                out.first_violation = std::string(link) + " on " + to_string(e);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// alpha index
// ---------------------------------------------------------------------------

struct AlphaSum {
    Rational value;
    /// (first coordinate, last coordinate, size) per average
    std::vector<std::tuple<Index, Index, std::uint64_t>> averages;
    bool truncated = false;
};

/// max sum_q |alpha_q(x)| over very fast growing, fam-admissible averages of
/// units whose supports are runs of supp x and whose sizes are >= size_floor.
inline AlphaSum alpha_sum(const Vector& x, const FamilyExpr& fam, std::uint64_t size_floor, std::size_t budget = 200000)
{
    std::vector<Index> c;
    std::vector<Rational> v;
    for (const auto& [i, a] : x) {
        c.push_back(i);
        v.push_back(sdist::abs(a));
    }
    const std::size_t s = c.size();
    std::vector<Rational> prefix(s + 1, Rational(0));
    for (std::size_t i = 0; i < s; ++i)
        prefix[i + 1] = prefix[i] + v[i];
    const std::uint64_t floor = std::max<std::uint64_t>(size_floor, 2);
    FamilyMachine machine(fam);
    AlphaSum out;
    std::vector<std::tuple<Index, Index, std::uint64_t>> path;
    std::size_t nodes = 0;
    std::function<void(std::size_t, std::uint64_t, Index, MachineState, const Rational&)> dfs =
        [&](std::size_t p, std::uint64_t prev_size, Index prev_max, MachineState st, const Rational& acc) {
            if (acc > out.value) {
                out.value = acc;
                out.averages = path;
            }
            for (std::size_t a = p; a < s; ++a) {
                MachineState st2 = machine.step(st, c[a]);
                if (FamilyMachine::is_dead(st2) || !machine.accepts(st2))
                    continue;
                for (std::size_t b = a; b < s; ++b) {
                    if (++nodes > budget) {
                        out.truncated = true;
                        return;
                    }
                    std::uint64_t size = std::max<std::uint64_t>(floor, b - a + 1);
                    if (!path.empty())
                        size = std::max<std::uint64_t>(size, std::max<std::uint64_t>(prev_size + 1, prev_max + 1));
                    path.emplace_back(c[a], c[b], size);
                    dfs(b + 1, size, c[b], st2, acc + (prefix[b + 1] - prefix[a]) / Rational(long(size)));
                    path.pop_back();
                    if (out.truncated)
                        return;
                }
            }
        };
    dfs(0, 0, 0, FamilyMachine::initial(), Rational(0));
    return out;
}

struct AlphaDiagnostic {
    Rational value;
    std::size_t block = 0;
    AlphaSum witness;
    bool truncated = false;
};

/// Finite stand-in for the alpha index: the largest alpha_sum over S_{xi_n}
/// among blocks in the second half of the horizon. Heuristic.
inline AlphaDiagnostic alpha_index_diagnostic(const BlockSequence& bs, const Ordinal& xi, std::uint64_t n,
                                              std::uint64_t size_floor, std::size_t horizon, std::size_t budget = 200000)
{
    if (horizon == 0 || horizon > bs.size())
        throw std::invalid_argument("horizon outside the available blocks");
    const FamilyExpr fam = approximating_family(xi, n);
    AlphaDiagnostic out;
    for (std::size_t k = horizon / 2 + 1; k <= horizon; ++k) {
        AlphaSum a = alpha_sum(bs.at(Index(k)), fam, size_floor, budget);
        out.truncated = out.truncated || a.truncated;
        if (out.block == 0 || a.value > out.value) {
            out.value = a.value;
            out.block = k;
            out.witness = std::move(a);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// isometric c0 bound
// ---------------------------------------------------------------------------

struct CauseIndexReport {
    /// separation hypothesis with eps_i = 4^-i, failures as (i0, i)
    bool hypothesis_holds = true;
    std::vector<std::pair<std::size_t, std::size_t>> hypothesis_failures;
    Rational value, bound;
    bool bound_holds = false;
    bool truncated = false;
};

inline Rational separation_eps(std::size_t i)
{
    Rational e = 1;
    for (std::size_t j = 0; j < i; ++j)
        e /= 4;
    return e;
}

/// For normalized blocks x_1..x_N of X_{w^xi}, picks i_1 < ... < i_t with
/// t <= i_1 and F a set of positions in 1..t: checks the separation
/// hypothesis on the blocks and max_{g in W_depth} |g(sum_{j in F} x_{i_j})|
/// against 1 + 3 eps_{i_min F}.
inline CauseIndexReport cause_index_check(const Ordinal& xi, const BlockSequence& bs, const std::vector<Index>& picks,
                                          const FinSet& F, std::size_t depth, std::size_t budget = 200000)
{
    if (picks.empty() || picks.size() > picks.front())
        throw std::invalid_argument("need t <= i_1");
    for (std::size_t j = 1; j < picks.size(); ++j)
        if (!(picks[j - 1] < picks[j]))
            throw std::invalid_argument("picks must increase");
    if (F.empty() || F.max() > picks.size())
        throw std::invalid_argument("F must be a nonempty subset of 1..t");
    CauseIndexReport out;
    for (std::size_t i0 = 2; i0 <= bs.size(); ++i0) {
        const Index j0 = bs.at(Index(i0 - 1)).max_support();
        const std::uint64_t floor = bs.at(Index(i0)).min_support();
        const Rational limit = separation_eps(i0) / Rational(long(i0));
        const FamilyExpr fam = approximating_family(xi, j0);
        for (std::size_t i = i0; i <= bs.size(); ++i) {
            AlphaSum a = alpha_sum(bs.at(Index(i)), fam, floor, budget);
            out.truncated = out.truncated || a.truncated;
            if (!(a.value < limit)) {
                out.hypothesis_holds = false;
                out.hypothesis_failures.emplace_back(i0, i);
            }
        }
    }
    std::vector<Index> chosen;
    for (Index j : F)
        chosen.push_back(picks[j - 1]);
    std::vector<Rational> ones(chosen.size(), Rational(1));
    Vector x = bs.combine(FinSet(chosen), ones);
    out.value = max_over_W(xi, x, depth).value;
    out.bound = 1 + 3 * separation_eps(std::size_t(picks[F.min() - 1]));
    out.bound_holds = out.value < out.bound;
    return out;
}

// ---------------------------------------------------------------------------
// family constructions
// ---------------------------------------------------------------------------

struct ConstructionCheck {
    std::string which;
    IndexSequence sequence = IndexSequence::naturals();
    InclusionReport main;
    /// the same check with a random spread of the sequence
    std::optional<InclusionReport> spread;
    std::optional<IndexSequence> spread_sequence;
    bool pass() const { return main.pass && (!spread || spread->pass); }
};

/// A random spread of m: terms up to the horizon moved up, kept increasing.
inline IndexSequence random_spread(const IndexSequence& m, Index horizon, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<Index> t;
    for (Index v : m.values_up_to(horizon)) {
        Index w = std::max<Index>(v, t.empty() ? 0 : t.back() + 1) + Index(rng() % 2);
        if (w > horizon)
            break;
        t.push_back(w);
    }
    return detail::extend_table(std::move(t), horizon);
}

/// S_1 blocks F_i = [a_i, a_i + len_i - 1], len_i <= a_i, until the horizon;
/// singletons when `singletons` is set.
inline std::vector<FinSet> random_s1_blocks(Index horizon, std::uint64_t seed, bool singletons = false)
{
    std::mt19937_64 rng(seed);
    std::vector<FinSet> out;
    for (Index a = 1 + Index(rng() % 2); a <= horizon;) {
        Index len = singletons ? 1 : 1 + Index(rng() % std::min<Index>(a, 3));
        if (a + len - 1 > horizon)
            break;
        out.push_back(FinSet::interval(a, a + len - 1));
        a += len + Index(rng() % 2);
    }
    return out;
}

/// which = "ii": S_xi(L)[S_zeta] in S_{zeta+xi} for L from construct_L on M;
/// "iii": S_xi[S_zeta](L) in S_{zeta+xi} for L from construct_L_bracket;
/// both also for a random spread of L;
/// "iv": unions over S_xi(N) of generated S_1 blocks (singletons for zeta = 0)
/// in S_{zeta+xi}.
inline ConstructionCheck construction_check(const std::string& which, const Ordinal& xi, const Ordinal& zeta, Index horizon,
                               const IndexSequence& m = IndexSequence::evens(), std::uint64_t seed = 1)
{
    ConstructionCheck out;
    out.which = which;
    const FamilyExpr target = FamilyExpr::schreier(add(zeta, xi));
    if (which == "ii") {
        out.sequence = construct_L(xi, zeta, m, horizon).sequence;
        auto lhs = [&](const IndexSequence& l) {
            return FamilyExpr::bracket(FamilyExpr::relabel(FamilyExpr::schreier(xi), l), FamilyExpr::schreier(zeta));
        };
        out.main = verify_inclusion(lhs(out.sequence), target, horizon);
        out.spread_sequence = random_spread(out.sequence, horizon, seed);
        out.spread = verify_inclusion(lhs(*out.spread_sequence), target, horizon);
    } else if (which == "iii") {
        out.sequence = construct_L_bracket(xi, zeta, horizon).sequence;
        auto lhs = [&](const IndexSequence& l) {
            return FamilyExpr::relabel(FamilyExpr::bracket(FamilyExpr::schreier(xi), FamilyExpr::schreier(zeta)), l);
        };
        out.main = verify_inclusion(lhs(out.sequence), target, horizon);
        out.spread_sequence = random_spread(out.sequence, horizon, seed);
        out.spread = verify_inclusion(lhs(*out.spread_sequence), target, horizon);
    } else if (which == "iv") {
        std::vector<FinSet> blocks = random_s1_blocks(horizon, seed, zeta.is_zero());
        NConstruction n = construct_N(xi, zeta, blocks, horizon);
        out.sequence = n.n_sequence;
        out.main = verify_union_inclusion(xi, n.n_sequence, blocks, add(zeta, xi));
    } else {
        throw std::invalid_argument("which must be ii, iii or iv");
    }
    return out;
}

// ---------------------------------------------------------------------------
// lemma suites
// ---------------------------------------------------------------------------

struct LemmaSuiteReport {
    std::size_t instances = 0, violations = 0;
    /// largest lhs / rhs seen
    Rational worst_ratio;
    std::string first_violation;
    bool ok() const { return violations == 0; }
};

namespace detail {

/// An alpha-average of units and unit pairs on increasing coordinates in
/// [lo, hi], of the given size.
inline Functional random_average(std::mt19937_64& rng, Index lo, Index hi, std::uint64_t size)
{
    std::vector<Functional> kids;
    Index c = lo + Index(rng() % 2);
    std::uint64_t d = 1 + rng() % size;
    for (std::uint64_t q = 0; q < d && c <= hi; ++q) {
        int sign = rng() % 2 ? 1 : -1;
        if (rng() % 3 == 0 && c + 1 <= hi) {
            kids.push_back(Functional::average(2, {Functional::unit(sign, c), Functional::unit(sign, c + 1)}));
            c += 2;
        } else {
            kids.push_back(Functional::unit(sign, c));
            c += 1;
        }
        c += Index(rng() % 2);
    }
    if (kids.empty())
        kids.push_back(Functional::unit(1, lo));
    return Functional::average(size, std::move(kids));
}

inline void record(LemmaSuiteReport& out, const LemmaInstance& inst, const std::string& what)
{
    ++out.instances;
    if (inst.rhs > 0)
        out.worst_ratio = std::max(out.worst_ratio, Rational(inst.lhs / inst.rhs));
    if (!inst.holds() && out.violations++ == 0)
        out.first_violation = what + ": " + to_string(inst.lhs) + " >= " + to_string(inst.rhs);
}

} // namespace detail

/// Random instances in X_w: blocks of 1-3 coordinates normalized exactly,
/// positive convex coefficients, alpha_0 in W_2 of size 2..8.
inline LemmaSuiteReport lemma_suite_average_on_blocks(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const NormSpace X = NormSpace::x_omega(Ordinal::natural(1));
    LemmaSuiteReport out;
    while (out.instances < count) {
        std::size_t m = 1 + rng() % 6;
        std::vector<Vector> blocks;
        Index c = 1 + Index(rng() % 4);
        for (std::size_t k = 0; k < m; ++k) {
            std::map<Index, Rational> v;
            for (std::size_t t = 1 + rng() % 3; t > 0; --t)
                v[c++] = Rational(long(1 + rng() % 4) * (rng() % 2 ? 1 : -1));
            c += Index(rng() % 3);
            Vector x = Vector::from_map(v);
            blocks.push_back(x * (Rational(1) / norm(X, x).value));
        }
        std::vector<Rational> cs;
        Rational total = 0;
        for (std::size_t k = 0; k < m; ++k) {
            cs.push_back(Rational(long(1 + rng() % 5)));
            total += cs.back();
        }
        for (auto& v : cs)
            v /= total;
        BlockSequence bs(blocks);
        Functional alpha = detail::random_average(rng, 1 + Index(rng() % 4), c + 1, 2 + rng() % 7);
        auto inst = check_average_on_blocks(alpha, bs, cs);
        if (!inst)
            continue;
        detail::record(out, *inst, to_string(alpha));
    }
    return out;
}

/// Random instances over (2,1,eps) s.c.c. vectors on blocks with norm <= 1 in
/// X_w, eps in {1/2, 1/3, 1/4}, and very fast growing S_1-admissible averages.
inline LemmaSuiteReport lemma_suite_average_on_scc(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const NormSpace X = NormSpace::x_omega(Ordinal::natural(1));
    const Rational eps_choices[] = {make_rational(1, 2), make_rational(1, 3), make_rational(1, 4)};
    std::vector<SccResult> sccs;
    // unit-norm blocks starting at each point of F
    std::vector<std::vector<Vector>> blocks;
    for (const auto& e : eps_choices) {
        sccs.push_back(scc_basic(Ordinal::natural(2), Ordinal::natural(1), e, IndexSequence::arithmetic(1, 2)));
        blocks.emplace_back();
        for (Index p : sccs.back().F) {
            std::map<Index, Rational> v{{p, Rational(long(1 + rng() % 3))}};
            if (rng() % 2)
                v[p + 1] = Rational(long(1 + rng() % 3) * (rng() % 2 ? 1 : -1));
            Vector x = Vector::from_map(v);
            blocks.back().push_back(x * (Rational(1) / norm(X, x).value));
        }
    }
    const FamilyExpr s1 = FamilyExpr::schreier(Ordinal::natural(1));
    LemmaSuiteReport out;
    while (out.instances < count) {
        const std::size_t which = rng() % sccs.size();
        const SccResult& r = sccs[which];
        std::map<Index, Rational> acc;
        std::size_t k = 0;
        for (Index p : r.F) {
            Rational scale = make_rational(long(1 + rng() % 4), 4);
            for (const auto& [i, a] : blocks[which][k++])
                acc[i] += r.vector[p] * a * scale;
        }
        Vector x = Vector::from_map(acc);
        const Index top = x.max_support();
        std::vector<Functional> alphas;
        Index lo = 1 + Index(rng() % top);
        std::uint64_t size = 2 + rng() % 6;
        for (std::size_t q = 0, d = 1 + rng() % 3; q < d && lo <= top; ++q) {
            Index hi = std::min<Index>(top + 1, lo + Index(rng() % 12));
            alphas.push_back(detail::random_average(rng, lo, hi, size));
            lo = alphas.back().max_support() + 1 + Index(rng() % 3);
            size = std::max<std::uint64_t>(size + 1, alphas.back().max_support() + 1) + rng() % 4;
        }
        if (alphas.empty() || !very_fast_growing_admissible(alphas, s1))
            continue;
        detail::record(out, check_average_on_scc(alphas, x, r.eps), "eps " + to_string(r.eps));
    }
    return out;
}

struct SccSuiteReport {
    std::size_t checked = 0, failures = 0, skipped = 0;
    std::vector<SccResult> results;
    std::optional<SccResult> first_failure;
    bool ok() const { return failures == 0; }
};

/// Random basic s.c.c.s built and re-verified from scratch. Orders are kept
/// and supports capped at 400 coordinates; the (2, 1) case runs once.
inline SccSuiteReport scc_suite(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const std::pair<Ordinal, Ordinal> orders[] = {
        {Ordinal::natural(1), Ordinal::natural(0)},
        {Ordinal::natural(2), Ordinal::natural(0)},
        {Ordinal::omega(), Ordinal::natural(0)}};
    SccSuiteReport out;
    for (std::size_t i = 0; out.checked < count && i < 4 * count; ++i) {
        Ordinal xi = Ordinal::natural(2), zeta = Ordinal::natural(1);
        Rational eps = make_rational(1, 2);
        IndexSequence m = IndexSequence::naturals();
        if (i > 0) {
            std::tie(xi, zeta) = orders[rng() % std::size(orders)];
            eps = make_rational(1, long(2 + rng() % 4));
            m = IndexSequence::arithmetic(Index(1 + rng() % 2), Index(1 + rng() % 3));
        }
        try {
            SccResult r = scc_basic(xi, zeta, eps, m, 400);
            ++out.checked;
            if (!verify_scc(r).ok() && out.failures++ == 0)
                out.first_failure = r;
            out.results.push_back(std::move(r));
        } catch (const ConstructionError&) {
            ++out.skipped;
        }
    }
    return out;
}

} // namespace sdist

#endif // SDIST_ANALYSIS_HPP
