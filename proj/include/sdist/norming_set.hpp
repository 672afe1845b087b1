#ifndef SDIST_NORMING_SET_HPP
#define SDIST_NORMING_SET_HPP

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "family_machine.hpp"
#include "finset.hpp"
#include "ordinal.hpp"
#include "rational.hpp"
#include "vecfun.hpp"

namespace sdist {

struct WStream {
    std::size_t emitted = 0;
    bool truncated = false;
};

struct WGeneration {
    std::vector<Functional> functionals;
    bool truncated = false;
};

/// Same tree with every leaf sign replaced by the sign of x at its coordinate.
inline Functional with_signs(const Functional& f, const Vector& x)
{
    switch (f.kind()) {
    case Functional::Kind::Unit:
        return Functional::unit(x[f.coord()] < 0 ? -1 : 1, f.coord());
    case Functional::Kind::Average:
    case Functional::Kind::Schreier: {
        std::vector<Functional> cs;
        for (const auto& c : f.children())
            cs.push_back(with_signs(c, x));
        return f.kind() == Functional::Kind::Average ? Functional::average(f.size(), std::move(cs))
                                                     : Functional::schreier(std::move(cs));
    }
    }
    return f;
}

namespace detail {

class WGenerator {
public:
    WGenerator(const Ordinal& xi, const FinSet& window, std::size_t budget)
        : window_(window), budget_(budget), machine_(FamilyExpr::schreier(Ordinal::power(xi)))
    {
        if (xi.is_zero())
            throw std::invalid_argument("W needs xi >= 1");
    }

    template <class Sink>
    WStream run(std::size_t depth, Sink&& sink)
    {
        std::vector<Functional> level;
        for (Index n : window_) {
            for (int s : {1, -1})
                if (!emit(Functional::unit(s, n), sink))
                    return status_;
            level.push_back(Functional::unit(1, n));
        }
        for (std::size_t m = 0; m < depth; ++m) {
            std::vector<Functional> next = level;
            std::vector<Functional> fresh;
            auto keep = [&](Functional f) {
                if (!emit(f, sink))
                    return false;
                if (seen_base_.insert(to_string(f)).second)
                    fresh.push_back(std::move(f));
                return true;
            };
            for (const auto& f : level)
                seen_base_.insert(to_string(f));
            if (!averages(level, keep) || (m >= 1 && !schreier(level, keep)))
                return status_;
            next.insert(next.end(), fresh.begin(), fresh.end());
            std::sort(next.begin(), next.end(), [](const Functional& a, const Functional& b) {
                return a.min_support() < b.min_support();
            });
            level = std::move(next);
        }
        return status_;
    }

private:
    template <class Sink>
    bool emit(const Functional& f, Sink& sink)
    {
        if (!seen_.insert(to_string(f)).second)
            return true;
        if (status_.emitted >= budget_) {
            status_.truncated = true;
            return false;
        }
        ++status_.emitted;
        sink(f);
        return true;
    }

    template <class Keep>
    bool averages(const std::vector<Functional>& level, Keep& keep)
    {
        std::vector<Functional> chain;
        return chains(level, 0, 0, chain, [&](const std::vector<Functional>& cs) {
            return keep(Functional::average(std::max<std::uint64_t>(2, cs.size()), cs));
        });
    }

    template <class Visit>
    bool chains(const std::vector<Functional>& items, std::size_t from, Index after, std::vector<Functional>& chain,
                Visit&& visit)
    {
        for (std::size_t i = from; i < items.size(); ++i) {
            if (items[i].min_support() <= after)
                continue;
            chain.push_back(items[i]);
            if (!visit(chain) || !chains(items, i + 1, items[i].max_support(), chain, visit))
                return false;
            chain.pop_back();
        }
        return true;
    }

    template <class Keep>
    bool schreier(const std::vector<Functional>& level, Keep& keep)
    {
        std::vector<Functional> avgs;
        for (const auto& f : level)
            if (f.kind() == Functional::Kind::Average)
                avgs.push_back(f);
        std::vector<Functional> seq;
        return sch_rec(avgs, 0, 0, 0, FamilyMachine::initial(), seq, keep);
    }

    // sizes re-declared minimally: l_q = max(d_q, 2, l_{q-1} + 1, max supp alpha_{q-1} + 1)
    template <class Keep>
    bool sch_rec(const std::vector<Functional>& avgs, std::size_t from, Index after, std::uint64_t prev_size,
                 MachineState st, std::vector<Functional>& seq, Keep& keep)
    {
        for (std::size_t i = from; i < avgs.size(); ++i) {
            const Functional& a = avgs[i];
            if (a.min_support() <= after)
                continue;
            MachineState st2 = machine_.step(st, a.min_support());
            if (FamilyMachine::is_dead(st2))
                continue;
            std::uint64_t l = std::max<std::uint64_t>({a.children().size(), 2, prev_size + 1,
                                                       seq.empty() ? 0 : std::uint64_t(after) + 1});
            seq.push_back(Functional::average(l, a.children()));
            if (seq.size() >= 2 && !keep(Functional::schreier(seq)))
                return false;
            if (!sch_rec(avgs, i + 1, a.max_support(), l, st2, seq, keep))
                return false;
            seq.pop_back();
        }
        return true;
    }

    FinSet window_;
    std::size_t budget_;
    FamilyMachine machine_;
    std::unordered_set<std::string> seen_;
    std::unordered_set<std::string> seen_base_;
    WStream status_;
};

} // namespace detail

/// Streams the functionals of W_depth supported in the window. Depth 0 is
/// exactly {+-e_n}; composite functionals carry positive leaves (W is closed
/// under leaf sign changes) and minimal declared sizes. Stops with
/// truncated = true once `budget` functionals have been emitted.
template <class Sink>
    requires std::invocable<Sink&, const Functional&>
WStream generate_W(const Ordinal& xi, const FinSet& window, std::size_t depth, Sink&& sink,
                   std::size_t budget = 200000)
{
    detail::WGenerator g(xi, window, budget);
    return g.run(depth, sink);
}

inline WGeneration generate_W(const Ordinal& xi, const FinSet& window, std::size_t depth,
                              std::size_t budget = 200000)
{
    WGeneration out;
    WStream st = generate_W(xi, window, depth, [&](const Functional& f) { out.functionals.push_back(f); }, budget);
    out.truncated = st.truncated;
    return out;
}

struct WMax {
    Rational value;
    std::optional<Functional> witness;
    bool truncated = false;
};

/// max f(x) over the literal stream, leaf signs adapted to x.
inline WMax max_over_generated(const Ordinal& xi, const Vector& x, const FinSet& window, std::size_t depth,
                               std::size_t budget = 200000)
{
    WMax out;
    Vector ax = x.abs();
    WStream st = generate_W(
        xi, window, depth,
        [&](const Functional& f) {
            Rational v = evaluate(f, ax);
            if (!out.witness || v > out.value) {
                out.value = v;
                out.witness = f;
            }
        },
        budget);
    out.truncated = st.truncated;
    if (out.witness)
        out.witness = with_signs(*out.witness, x);
    return out;
}

namespace detail {

/// Exact max over W_depth restricted to a window, by dynamic programming over
/// groups (min supp, max supp, declared size) instead of enumeration. Sizes
/// above max(window) + |window| + 2 are dominated and skipped.
class WTarget {
public:
    WTarget(const Ordinal& xi, const Vector& x, const FinSet& window)
        : machine_(FamilyExpr::schreier(Ordinal::power(xi)))
    {
        if (xi.is_zero())
            throw std::invalid_argument("W needs xi >= 1");
        for (Index n : window) {
            c_.push_back(n);
            mag_.push_back(sdist::abs(x[n]));
        }
        w_ = c_.size();
        lmax_ = (w_ ? std::uint64_t(c_.back()) : 0) + w_ + 2;
        g_.assign(w_ * w_, {});
        for (std::size_t i = 0; i < w_; ++i)
            g_[i * w_ + i] = Cell{mag_[i], Functional::unit(1, c_[i])};
    }

    void advance()
    {
        std::vector<std::optional<Cell>> a_next = averages();
        std::vector<std::optional<Cell>> g_next = g_;
        for (std::size_t i = 0; i < w_; ++i)
            for (std::size_t j = i; j < w_; ++j)
                for (std::uint64_t l = 2; l <= lmax_; ++l)
                    improve(g_next[i * w_ + j], a_next[aidx(i, j, l)]);
        if (have_a_)
            schreier(g_next);
        g_ = std::move(g_next);
        a_ = std::move(a_next);
        have_a_ = true;
    }

    WMax best() const
    {
        WMax out;
        for (const auto& cell : g_)
            if (cell && (!out.witness || cell->v > out.value)) {
                out.value = cell->v;
                out.witness = cell->f;
            }
        return out;
    }

private:
    struct Cell {
        Rational v;
        Functional f;
    };
    struct Link {
        Rational v;
        std::size_t h = 0, next = 0; // first element [i, h], rest starts at next (0 = none)
        bool set = false;
    };

    static void improve(std::optional<Cell>& dst, const std::optional<Cell>& src)
    {
        if (src && (!dst || src->v > dst->v))
            dst = src;
    }

    std::size_t aidx(std::size_t i, std::size_t j, std::uint64_t l) const
    {
        return (i * w_ + j) * (lmax_ + 1) + l;
    }

    // chain[d][i][j]: best sum of at most d successive W_m elements, first min c_i, last max c_j
    std::vector<std::optional<Cell>> averages()
    {
        const std::size_t dmax = w_;
        std::vector<std::vector<Link>> chain(dmax + 1, std::vector<Link>(w_ * w_));
        for (std::size_t d = 1; d <= dmax; ++d)
            for (std::size_t i = w_; i-- > 0;)
                for (std::size_t j = i; j < w_; ++j) {
                    Link& best = chain[d][i * w_ + j];
                    if (const auto& g = g_[i * w_ + j])
                        best = Link{g->v, j, 0, true};
                    if (d == 1)
                        continue;
                    for (std::size_t h = i; h < j; ++h) {
                        const auto& first = g_[i * w_ + h];
                        if (!first)
                            continue;
                        for (std::size_t i2 = h + 1; i2 <= j; ++i2) {
                            const Link& rest = chain[d - 1][i2 * w_ + j];
                            if (!rest.set)
                                continue;
                            Rational v = first->v + rest.v;
                            if (!best.set || v > best.v)
                                best = Link{v, h, i2, true};
                        }
                    }
                }
        std::vector<std::optional<Cell>> out(w_ * w_ * (lmax_ + 1));
        for (std::size_t i = 0; i < w_; ++i)
            for (std::size_t j = i; j < w_; ++j)
                for (std::uint64_t l = 2; l <= lmax_; ++l) {
                    std::size_t d = std::size_t(std::min<std::uint64_t>(l, dmax));
                    const Link& lk = chain[d][i * w_ + j];
                    if (!lk.set)
                        continue;
                    std::vector<Functional> kids;
                    std::size_t a = i, dd = d;
                    while (true) {
                        const Link& cur = chain[dd][a * w_ + j];
                        kids.push_back(g_[a * w_ + cur.h]->f);
                        if (cur.h == j)
                            break;
                        a = cur.next;
                        --dd;
                    }
                    out[aidx(i, j, l)] = Cell{lk.v / Rational(long(l)), Functional::average(l, std::move(kids))};
                }
        return out;
    }

    struct SchEntry {
        Rational v;
        std::uint64_t prev = 0;
        bool has_prev = false;
        std::size_t ai = 0, aj = 0;
        std::uint64_t al = 0;
    };

    static std::uint64_t skey(std::size_t i0, std::size_t j, std::uint64_t t, std::uint32_t st)
    {
        return (std::uint64_t(i0) << 56) ^ (std::uint64_t(j) << 48) ^ (t << 32) ^ st;
    }

    // sequences of W_m averages: admissible minima, increasing sizes, size > previous max supp;
    // states keyed by the threshold t = max(size, max supp) the next size must exceed
    void schreier(std::vector<std::optional<Cell>>& g_next)
    {
        std::vector<std::unordered_map<std::uint64_t, SchEntry>> byj(w_);
        auto offer = [&](std::size_t j, std::uint64_t k, SchEntry e) {
            auto [it, fresh] = byj[j].try_emplace(k, e);
            if (!fresh && e.v > it->second.v)
                it->second = e;
        };
        for (std::size_t i = 0; i < w_; ++i) {
            MachineState st = machine_.step(FamilyMachine::initial(), c_[i]);
            if (FamilyMachine::is_dead(st))
                continue;
            for (std::size_t j = i; j < w_; ++j)
                for (std::uint64_t l = 2; l <= lmax_; ++l)
                    if (const auto& a = a_[aidx(i, j, l)]) {
                        std::uint64_t t = std::max<std::uint64_t>(l, c_[j]);
                        offer(j, skey(i, j, t, st.id), SchEntry{a->v, 0, false, i, j, l});
                    }
        }
        for (std::size_t j = 0; j < w_; ++j) {
            for (const auto& [k, e] : byj[j]) {
                std::size_t i0 = std::size_t(k >> 56);
                std::uint64_t t = (k >> 32) & 0xFFFF;
                MachineState st{std::uint32_t(k & 0xFFFFFFFFu)};
                if (e.has_prev) {
                    auto& dst = g_next[i0 * w_ + j];
                    if (!dst || e.v > dst->v)
                        dst = Cell{e.v, rebuild(byj, k)};
                }
                for (std::size_t i2 = j + 1; i2 < w_; ++i2) {
                    MachineState st2 = machine_.step(st, c_[i2]);
                    if (FamilyMachine::is_dead(st2))
                        continue;
                    for (std::size_t j2 = i2; j2 < w_; ++j2)
                        for (std::uint64_t l = t + 1; l <= lmax_; ++l)
                            if (const auto& a = a_[aidx(i2, j2, l)]) {
                                std::uint64_t t2 = std::max<std::uint64_t>(l, c_[j2]);
                                offer(j2, skey(i0, j2, t2, st2.id), SchEntry{e.v + a->v, k, true, i2, j2, l});
                            }
                }
            }
        }
    }

    Functional rebuild(const std::vector<std::unordered_map<std::uint64_t, SchEntry>>& byj, std::uint64_t k) const
    {
        std::vector<Functional> alphas;
        while (true) {
            std::size_t j = std::size_t((k >> 48) & 0xFF);
            const SchEntry& e = byj[j].at(k);
            alphas.push_back(a_[aidx(e.ai, e.aj, e.al)]->f);
            if (!e.has_prev)
                break;
            k = e.prev;
        }
        std::reverse(alphas.begin(), alphas.end());
        return Functional::schreier(std::move(alphas));
    }

    FamilyMachine machine_;
    std::vector<Index> c_;
    std::vector<Rational> mag_;
    std::size_t w_ = 0;
    std::uint64_t lmax_ = 0;
    std::vector<std::optional<Cell>> g_;
    std::vector<std::optional<Cell>> a_;
    bool have_a_ = false;
};

} // namespace detail

/// Exact max of f(x) over f in W_depth supported in the window, with a
/// witness whose leaf signs follow x.
inline WMax max_over_W(const Ordinal& xi, const Vector& x, const FinSet& window, std::size_t depth)
{
    if (window.size() > 255)
        throw std::invalid_argument("max_over_W window too large");
    detail::WTarget t(xi, x, window);
    for (std::size_t m = 0; m < depth; ++m)
        t.advance();
    WMax out = t.best();
    if (out.witness)
        out.witness = with_signs(*out.witness, x);
    return out;
}

inline WMax max_over_W(const Ordinal& xi, const Vector& x, std::size_t depth)
{
    return max_over_W(xi, x, x.support(), depth);
}

} // namespace sdist

#endif // SDIST_NORMING_SET_HPP
