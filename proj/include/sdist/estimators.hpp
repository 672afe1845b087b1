#ifndef SDIST_ESTIMATORS_HPP
#define SDIST_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "families.hpp"
#include "norms.hpp"
#include "vecfun.hpp"

namespace sdist {

/// A norm on c00 with an exact evaluator and a fast floating one for searches.
struct NormEvaluator {
    std::string name;
    std::function<Rational(const Vector&)> exact;
    std::function<double(const Vector&)> fast;
    bool exact_values = true;
};

namespace detail {

inline void split_view(const Vector& x, std::vector<Index>& c, std::vector<double>& m)
{
    c.clear();
    m.clear();
    for (const auto& [i, v] : x) {
        c.push_back(i);
        m.push_back(std::fabs(v.get_d()));
    }
}

} // namespace detail

inline NormEvaluator evaluator(const NormSpace& space)
{
    NormEvaluator ev;
    ev.name = to_string(space);
    ev.exact = [space](const Vector& x) { return norm(space, x).value; };
    ev.exact_values = space.exact();
    switch (space.kind) {
    case NormSpace::Kind::L1:
        ev.fast = [](const Vector& x) { return x.l1().get_d(); };
        break;
    case NormSpace::Kind::C0:
        ev.fast = [](const Vector& x) { return x.linf().get_d(); };
        break;
    case NormSpace::Kind::Tsirelson:
        ev.fast = [](const Vector& x) {
            std::vector<Index> c;
            std::vector<double> m;
            detail::split_view(x, c, m);
            return tsirelson_norm(c, m);
        };
        break;
    default:
        ev.fast = [space](const Vector& x) { return double(norm(space, x).approx); };
        break;
    }
    return ev;
}

/// |x|_n over the given space.
inline NormEvaluator interval_evaluator(const NormSpace& space, std::size_t n)
{
    NormEvaluator ev;
    ev.name = "|.|_" + std::to_string(n) + " over " + to_string(space);
    ev.exact = [space, n](const Vector& x) { return interval_norm(space, x, n).value; };
    ev.exact_values = space.exact();
    if (space.kind == NormSpace::Kind::Tsirelson) {
        ev.fast = [n](const Vector& x) {
            std::vector<Index> c;
            std::vector<double> m;
            detail::split_view(x, c, m);
            const std::size_t s = c.size();
            if (s == 0)
                return 0.0;
            detail::TsirelsonTable<double> t(c, m);
            std::vector<std::vector<double>> best(s + 1, std::vector<double>(n + 1, 0.0));
            for (std::size_t a = s; a-- > 0;)
                for (std::size_t k = 1; k <= n; ++k) {
                    double b = best[a + 1][k];
                    for (std::size_t e = a; e < s; ++e)
                        b = std::max(b, t.at(a, e) + best[e + 1][k - 1]);
                    best[a][k] = b;
                }
            return best[0][n];
        };
    } else if (space.kind == NormSpace::Kind::L1) {
        ev.fast = [](const Vector& x) { return x.l1().get_d(); };
    } else if (space.kind == NormSpace::Kind::C0) {
        ev.fast = [n](const Vector& x) {
            std::vector<double> a;
            for (const auto& [i, v] : x)
                a.push_back(std::fabs(v.get_d()));
            std::sort(a.begin(), a.end(), std::greater<>());
            double s = 0;
            for (std::size_t i = 0; i < a.size() && i < n; ++i)
                s += a[i];
            return s;
        };
    } else {
        ev.fast = [space, n](const Vector& x) { return double(interval_norm(space, x, n).approx); };
    }
    return ev;
}

struct CoefficientWitness {
    FinSet set;
    std::vector<Rational> coeffs;
    Rational value;
};

struct SpreadingEstimate {
    FamilyExpr family = FamilyExpr::schreier(Ordinal::natural(1));
    std::size_t horizon = 0;
    Rational l1_lower, l1_upper, c0_lower, c0_upper;
    CoefficientWitness l1_lower_witness, l1_upper_witness, c0_lower_witness, c0_upper_witness;
    std::size_t sets_examined = 0;
    /// sets were sampled rather than exhausted
    bool budget_exhausted = false;
    bool exact = true;
};

struct SearchOptions {
    std::size_t set_budget = 2000;
    std::size_t local_rounds = 2;
    std::uint64_t seed = 1;
    Index first = 1;
};

/// Members of fam inside [first, horizon] that cannot be extended inside it.
/// Exhaustive when there are at most `budget` of them, else a seeded sample.
inline std::vector<FinSet> family_sets(const FamilyExpr& fam, Index first, Index horizon, std::size_t budget,
                                       std::uint64_t seed, bool& sampled)
{
    sampled = false;
    std::vector<FinSet> out;
    for (Index f = first; f <= horizon; ++f) {
        Enumeration en = enumerate_maximal(fam, f, horizon, budget * 8);
        if (en.budget_exhausted || out.size() + en.sets.size() > budget) {
            sampled = true;
            break;
        }
        for (auto& m : en.sets)
            out.push_back(std::move(m.set));
    }
    if (!sampled)
        return out;
    out.clear();
    std::mt19937_64 rng(seed);
    FamilyMachine machine(fam);
    std::set<std::vector<Index>> seen;
    for (std::size_t tries = 0; out.size() < budget && tries < budget * 20; ++tries) {
        std::vector<Index> e;
        MachineState st = FamilyMachine::initial();
        Index next = first + Index(rng() % (horizon - first + 1));
        for (Index c = next; c <= horizon; ++c) {
            MachineState st2 = machine.step(st, c);
            if (FamilyMachine::is_dead(st2) || !machine.accepts(st2))
                continue;
            if (!e.empty() && rng() % 3 == 0)
                continue;
            e.push_back(c);
            st = st2;
        }
        if (seen.insert(e).second)
            out.emplace_back(std::move(e));
    }
    return out;
}

namespace detail {

inline Vector combo(const BlockSequence& bs, const FinSet& e, const std::vector<double>& a)
{
    std::vector<Rational> r;
    for (double v : a)
        r.push_back(Rational(v));
    return bs.combine(e, r);
}

/// Snaps floating coefficients to dyadic rationals summing to 1.
inline std::vector<Rational> snap(const std::vector<double>& a)
{
    std::vector<Rational> r;
    Rational total = 0;
    for (double v : a) {
        Rational q(std::round(v * 1048576.0), 1048576);
        q.canonicalize();
        r.push_back(q);
        total += q;
    }
    if (total == 0)
        return r;
    for (auto& q : r)
        q /= total;
    return r;
}

} // namespace detail

/// min ||sum a_i x_i|| over a >= 0, sum a_i = 1, supported in e; a floating
/// local search whose best point is re-evaluated exactly. An upper estimate.
inline CoefficientWitness l1_lower_on_set(const NormEvaluator& ev, const BlockSequence& bs, const FinSet& e,
                                          std::size_t rounds = 2)
{
    const std::size_t m = e.size();
    std::vector<std::vector<double>> starts;
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> a(m, 0.0);
        for (std::size_t i = lo; i < hi; ++i)
            a[i] = 1.0 / double(hi - lo);
        starts.push_back(std::move(a));
    };
    uniform(0, m);
    for (std::size_t i = 0; i < m; ++i) {
        uniform(i, i + 1);
        if (i + 2 <= m)
            uniform(i, i + 2);
        if (i > 0)
            uniform(0, i + 1), uniform(i, m);
    }
    std::vector<double> best;
    double best_v = 0;
    for (auto& a : starts) {
        double v = ev.fast(detail::combo(bs, e, a));
        if (best.empty() || v < best_v - 1e-15) {
            best = a;
            best_v = v;
        }
    }
    for (std::size_t r = 0; r < rounds; ++r) {
        bool moved = false;
        for (double frac : {0.5, 0.25, 0.125}) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    if (i == j || best[i] <= 0)
                        continue;
                    std::vector<double> a = best;
                    double d = a[i] * frac;
                    a[i] -= d;
                    a[j] += d;
                    double v = ev.fast(detail::combo(bs, e, a));
                    if (v < best_v - 1e-12) {
                        best = std::move(a);
                        best_v = v;
                        moved = true;
                    }
                }
        }
        if (!moved)
            break;
    }
    std::vector<Rational> q = detail::snap(best);
    std::vector<Index> supp;
    std::vector<Rational> coeffs;
    std::size_t k = 0;
    for (Index i : e) {
        if (q[k] != 0) {
            supp.push_back(i);
            coeffs.push_back(q[k]);
        }
        ++k;
    }
    FinSet s(std::move(supp));
    return CoefficientWitness{s, coeffs, ev.exact(bs.combine(s, coeffs))};
}

/// max ||sum a_i x_i|| over a in the unit cube on e, by a dense grid (floating).
inline double c0_upper_dense(const NormEvaluator& ev, const BlockSequence& bs, const FinSet& e, std::size_t steps)
{
    const std::size_t m = e.size();
    std::vector<std::size_t> idx(m, 0);
    double best = 0;
    while (true) {
        std::vector<double> a(m);
        for (std::size_t i = 0; i < m; ++i)
            a[i] = -1.0 + 2.0 * double(idx[i]) / double(steps);
        best = std::max(best, ev.fast(detail::combo(bs, e, a)));
        std::size_t i = 0;
        while (i < m && ++idx[i] > steps)
            idx[i++] = 0;
        if (i == m)
            break;
    }
    return best;
}

/// Spreading-model constants of bs over members of fam inside [first, horizon].
/// l1_upper, c0_lower and c0_upper are exact for 1-unconditional norms;
/// l1_lower is the best point found, certified exactly.
inline SpreadingEstimate spreading_profile(const NormEvaluator& ev, const BlockSequence& bs, const FamilyExpr& fam,
                                           std::size_t horizon, const SearchOptions& opt = {})
{
    if (horizon > bs.size())
        throw std::invalid_argument("horizon " + std::to_string(horizon) + " exceeds the " +
                                    std::to_string(bs.size()) + " available blocks");
    if (horizon < opt.first)
        throw std::invalid_argument("empty horizon");
    SpreadingEstimate out;
    out.family = fam;
    out.horizon = horizon;
    out.exact = ev.exact_values;
    for (Index i = opt.first; i <= horizon; ++i) {
        Rational v = ev.exact(bs.at(i));
        CoefficientWitness w{FinSet{i}, {Rational(1)}, v};
        if (i == opt.first || v > out.l1_upper) {
            out.l1_upper = v;
            out.l1_upper_witness = w;
        }
        if (i == opt.first || v < out.c0_lower) {
            out.c0_lower = v;
            out.c0_lower_witness = w;
        }
    }
    bool sampled = false;
    std::vector<FinSet> sets = family_sets(fam, opt.first, Index(horizon), opt.set_budget, opt.seed, sampled);
    out.budget_exhausted = sampled;
    out.sets_examined = sets.size();
    double c0_best = -1;
    const FinSet* c0_arg = nullptr;
    bool have_l1 = false;
    for (const auto& e : sets) {
        double v = ev.fast(bs.combine(e, std::vector<Rational>(e.size(), Rational(1))));
        if (v > c0_best) {
            c0_best = v;
            c0_arg = &e;
        }
        CoefficientWitness w = l1_lower_on_set(ev, bs, e, opt.local_rounds);
        if (!have_l1 || w.value < out.l1_lower) {
            out.l1_lower = w.value;
            out.l1_lower_witness = std::move(w);
            have_l1 = true;
        }
    }
    if (c0_arg) {
        std::vector<Rational> ones(c0_arg->size(), Rational(1));
        out.c0_upper = ev.exact(bs.combine(*c0_arg, ones));
        out.c0_upper_witness = CoefficientWitness{*c0_arg, ones, out.c0_upper};
    }
    return out;
}

inline SpreadingEstimate spreading_profile(const NormSpace& space, const BlockSequence& bs, const FamilyExpr& fam,
                                           std::size_t horizon, const SearchOptions& opt = {})
{
    return spreading_profile(evaluator(space), bs, fam, horizon, opt);
}

} // namespace sdist

#endif // SDIST_ESTIMATORS_HPP
