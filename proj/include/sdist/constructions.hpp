#ifndef SDIST_CONSTRUCTIONS_HPP
#define SDIST_CONSTRUCTIONS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "estimators.hpp"
#include "families.hpp"
#include "finset.hpp"
#include "norms.hpp"
#include "ordinal.hpp"
#include "rational.hpp"
#include "vecfun.hpp"

namespace sdist {

// ---------------------------------------------------------------------------
// special convex combinations
// ---------------------------------------------------------------------------

struct SccResult {
    Vector vector;
    FinSet F;
    Ordinal xi, zeta;
    Rational eps;
    MassResult mass_certificate;
    /// first position of M used
    std::size_t tail_start = 1;
};

struct SccCheck {
    bool nonnegative_unit_sum = false;
    bool in_family = false;
    bool mass_small = false;
    Rational mass;
    bool ok() const { return nonnegative_unit_sum && in_family && mass_small; }
};

/// Re-verifies (i)-(iii) of a basic s.c.c. from scratch.
inline SccCheck verify_scc(const Vector& v, const Ordinal& xi, const Ordinal& zeta, const Rational& eps)
{
    SccCheck c;
    Rational total = 0;
    bool nonneg = true;
    std::map<Index, Rational> coeffs;
    for (const auto& [i, a] : v) {
        nonneg = nonneg && a >= 0;
        total += a;
        coeffs[i] = a;
    }
    c.nonnegative_unit_sum = nonneg && total == 1;
    MembershipSession session;
    c.in_family = session.contains(v.support(), FamilyExpr::schreier(xi));
    if (nonneg) {
        c.mass = family_mass(coeffs, FamilyExpr::schreier(zeta)).mass;
        c.mass_small = c.mass < eps;
    }
    return c;
}

inline SccCheck verify_scc(const SccResult& r) { return verify_scc(r.vector, r.xi, r.zeta, r.eps); }

namespace detail {

struct SccBuilder {
    const IndexSequence& m;
    std::size_t budget;
    std::map<Index, Rational> out;
    std::size_t used = 0;

    // repeated average of order xi starting at position pos, scaled by w
    std::size_t build(const Ordinal& xi, std::size_t pos, const Rational& w)
    {
        if (used >= budget)
            throw ConstructionError("scc support budget exhausted");
        Index here = m.at(pos);
        if (xi.is_zero()) {
            out[here] += w;
            ++used;
            return pos + 1;
        }
        if (xi.is_limit())
            return build(fundamental(xi, here), pos, w);
        Ordinal beta = xi.predecessor();
        Rational part = w / Rational(long(here));
        for (Index j = 0; j < here; ++j)
            pos = build(beta, pos, part);
        return pos;
    }
};

} // namespace detail

/// (xi, zeta, eps) basic s.c.c. supported in M: the repeated average of
/// order xi starting at the t-th element of M, for t = 1, 2, ... until the
/// S_zeta mass drops below eps.
inline SccResult scc_basic(const Ordinal& xi, const Ordinal& zeta, const Rational& eps, const IndexSequence& m,
                           std::size_t support_budget = 3000, std::size_t max_restarts = 64)
{
    if (!(zeta < xi))
        throw std::invalid_argument("scc_basic needs zeta < xi");
    if (eps <= 0)
        throw std::invalid_argument("scc_basic needs eps > 0");
    std::optional<Rational> best;
    for (std::size_t t = 1; t <= max_restarts; ++t) {
        detail::SccBuilder b{m, support_budget, {}, 0};
        try {
            b.build(xi, t, Rational(1));
        } catch (const ConstructionError&) {
            break;
        } catch (const std::out_of_range&) {
            break;
        }
        MassResult mass = family_mass(b.out, FamilyExpr::schreier(zeta));
        if (!best || mass.mass < *best)
            best = mass.mass;
        if (mass.mass < eps) {
            SccResult r;
            r.vector = Vector::from_map(b.out);
            r.F = r.vector.support();
            r.xi = xi;
            r.zeta = zeta;
            r.eps = eps;
            r.mass_certificate = std::move(mass);
            r.tail_start = t;
            return r;
        }
    }
    throw ConstructionError("no basic s.c.c. within budget; best mass " + (best ? to_string(*best) : "none"));
}

struct SccBlocks {
    Vector vector;
    SccResult basic;
    /// (block index, coefficient), 1-based block indices
    std::vector<std::pair<std::size_t, Rational>> coefficients;
};

/// sum c_k x_k where sum c_k e_{phi_k} is a basic s.c.c., phi_k = min supp x_k.
inline SccBlocks scc_on_blocks(const BlockSequence& bs, const Ordinal& xi, const Ordinal& zeta, const Rational& eps,
                               std::size_t support_budget = 3000)
{
    std::vector<Index> phi = bs.minima();
    SccBlocks out;
    out.basic = scc_basic(xi, zeta, eps, IndexSequence::explicit_prefix(phi), support_budget);
    std::vector<Vector::Entry> acc;
    for (const auto& [i, c] : out.basic.vector) {
        std::size_t k = std::size_t(std::find(phi.begin(), phi.end(), i) - phi.begin()) + 1;
        out.coefficients.emplace_back(k, c);
        for (const auto& [n, v] : bs.at(k))
            acc.emplace_back(n, v * c);
    }
    out.vector = Vector(std::move(acc));
    return out;
}

// ---------------------------------------------------------------------------
// averages and rapidly increasing sequences
// ---------------------------------------------------------------------------

struct L1Average {
    /// (1/k) sum_{i in F} x_i
    Vector average;
    /// average / ||average||
    Vector normalized;
    Rational norm;
    /// block indices used
    FinSet indices;
};

/// First window of k consecutive blocks, starting at a block whose minimal
/// support is >= k, at or after block `from`, whose average has norm >= quality.
inline L1Average build_l1_average(const NormSpace& space, std::size_t k, const BlockSequence& bs,
                                  const Rational& quality, std::size_t from = 1)
{
    if (k == 0)
        throw std::invalid_argument("build_l1_average needs k >= 1");
    std::optional<Rational> best;
    for (std::size_t s = std::max<std::size_t>(from, 1); s + k - 1 <= bs.size(); ++s) {
        if (bs.at(s).min_support() < Index(k))
            continue;
        FinSet idx = FinSet::interval(Index(s), Index(s + k - 1));
        Vector avg = bs.combine(idx, std::vector<Rational>(k, make_rational(1, long(k))));
        Rational n = norm(space, avg).value;
        if (!best || n > *best)
            best = n;
        if (n >= quality)
            return L1Average{avg, avg * (Rational(1) / n), n, idx};
    }
    throw ConstructionError("no l1 average of length " + std::to_string(k) + " reaches quality " + to_string(quality) +
                            "; best " + (best ? to_string(*best) : "none"));
}

/// y_1 < y_2 < ... with y_q an average of sizes[q] blocks and
/// sizes[q] > max supp y_{q-1}.
inline std::vector<L1Average> build_ris(const NormSpace& space, const std::vector<std::size_t>& sizes,
                                        const BlockSequence& bs, const Rational& quality = 0)
{
    std::vector<L1Average> out;
    std::size_t from = 1;
    for (std::size_t q = 0; q < sizes.size(); ++q) {
        if (q > 0 && sizes[q] <= sizes[q - 1])
            throw std::invalid_argument("build_ris needs strictly increasing sizes");
        if (q > 0 && Index(sizes[q]) <= out.back().average.max_support())
            throw ConstructionError("size " + std::to_string(sizes[q]) + " does not exceed previous maximum support " +
                                    std::to_string(out.back().average.max_support()));
        L1Average y = build_l1_average(space, sizes[q], bs, quality, from);
        from = std::size_t(y.indices.max()) + 1;
        out.push_back(std::move(y));
    }
    return out;
}

inline BlockSequence ris_blocks(const std::vector<L1Average>& ris)
{
    std::vector<Vector> v;
    std::vector<FinSet> origins;
    for (const auto& y : ris) {
        v.push_back(y.normalized);
        origins.push_back(y.indices);
    }
    return BlockSequence(std::move(v), std::move(origins));
}

// ---------------------------------------------------------------------------
// Schreier functionals
// ---------------------------------------------------------------------------

/// Flips every leaf sign.
inline Functional negate(const Functional& f)
{
    if (f.kind() == Functional::Kind::Unit)
        return Functional::unit(-f.sign(), f.coord());
    std::vector<Functional> cs;
    for (const auto& c : f.children())
        cs.push_back(negate(c));
    return f.kind() == Functional::Kind::Average ? Functional::average(f.size(), std::move(cs))
                                                 : Functional::schreier(std::move(cs));
}

/// g = sum_i sgn_i sum_{q in group i} alpha_q, validated against S_{w^xi}.
inline Functional build_schreier_functional(const std::vector<int>& signs,
                                            const std::vector<std::vector<Functional>>& groups, const Ordinal& xi)
{
    if (signs.size() != groups.size())
        throw std::invalid_argument("one sign per group required");
    std::vector<Functional> alphas;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1)
            throw std::invalid_argument("signs must be +1 or -1");
        for (const auto& a : groups[i])
            alphas.push_back(signs[i] > 0 ? a : negate(a));
    }
    if (alphas.empty())
        throw std::invalid_argument("no averages given");
    Functional g = Functional::schreier(std::move(alphas));
    ValidationReport r = validate_functional(g, xi);
    if (!r.valid)
        throw ConstructionError(r.violation + " in " + r.where);
    return g;
}

// ---------------------------------------------------------------------------
// blockings
// ---------------------------------------------------------------------------

/// Largest p/q with q <= max_den and (p/q)^2 <= k.
inline Rational rational_sqrt_below(const Rational& k, long max_den = 10)
{
    if (k < 0)
        throw std::invalid_argument("negative argument");
    Rational best = 0;
    for (long q = 1; q <= max_den; ++q) {
        double guess = std::sqrt(k.get_d()) * double(q);
        for (long p = std::max(0L, long(guess) - 2); p <= long(guess) + 2; ++p) {
            Rational r = make_rational(p, q);
            if (r * r <= k && r > best)
                best = r;
        }
    }
    return best;
}

/// S_{xi_n}, the n-th approximating family of S_{w^xi}; A_n when xi = 0.
inline FamilyExpr approximating_family(const Ordinal& xi, std::uint64_t n)
{
    if (xi.is_zero())
        return FamilyExpr::cardinality(n);
    return FamilyExpr::schreier(fundamental(Ordinal::power(xi), n));
}

struct BlockingCertificate {
    /// true: ImprovedBlocking, false: PropertyPn
    bool improved = false;
    std::size_t n = 0;
    Rational target;
    FamilyExpr family = FamilyExpr::schreier(Ordinal::natural(1));
    std::size_t horizon = 0;
    // ImprovedBlocking
    BlockSequence blocking;
    std::vector<BlockGroup> groups;
    /// sum |a_j| = 1 combinations and their exact norms (< 1/target)
    std::vector<CoefficientWitness> combinations;
    // PropertyPn
    Rational constant;
    CoefficientWitness constant_witness;
    std::size_t sets_examined = 0;
    bool budget_exhausted = false;
};

/// One finite stage of the James blocking argument. Looks for E in
/// S_{xi_n}, n <= E <= horizon, and a on the l1 sphere with
/// ||sum a_i x_i|| < 1/t, t = rational_sqrt_below(K). If found, blocks the
/// whole sequence with successive spreads of that pattern (fresh searches
/// where a spread fails), normalized; otherwise reports property P_n.
inline BlockingCertificate james_blocking_step(const NormEvaluator& ev, const BlockSequence& bs, std::size_t n,
                                               const Rational& K, std::size_t horizon, const Ordinal& xi = Ordinal::natural(1),
                                               const SearchOptions& opt = {})
{
    if (K <= 1)
        throw std::invalid_argument("james_blocking_step needs K > 1");
    if (n == 0 || horizon > bs.size() || horizon < n)
        throw std::invalid_argument("james_blocking_step needs 1 <= n <= horizon <= blocks");
    BlockingCertificate out;
    out.n = n;
    out.target = rational_sqrt_below(K);
    for (long den = 100; out.target <= 1 && den <= 100000; den *= 10)
        out.target = rational_sqrt_below(K, den);
    out.family = approximating_family(xi, n);
    out.horizon = horizon;
    const Rational limit = Rational(1) / out.target;

    auto search = [&](Index lo, Index hi, std::optional<CoefficientWitness>& best, std::size_t& examined,
                      bool& sampled) -> std::optional<CoefficientWitness> {
        std::vector<FinSet> sets;
        MembershipSession ms;
        for (Index m = lo; m <= hi; ++m) {
            Index top = m;
            while (top < hi && ms.contains(FinSet::interval(m, top + 1), out.family))
                ++top;
            sets.push_back(FinSet::interval(m, top));
        }
        for (auto& e : family_sets(out.family, lo, hi, opt.set_budget, opt.seed, sampled))
            sets.push_back(std::move(e));
        for (const auto& e : sets) {
            ++examined;
            CoefficientWitness w = l1_lower_on_set(ev, bs, e, opt.local_rounds);
            if (!best || w.value < best->value)
                best = w;
            if (w.value < limit)
                return w;
        }
        return std::nullopt;
    };

    std::optional<CoefficientWitness> best;
    auto first = search(Index(n), Index(horizon), best, out.sets_examined, out.budget_exhausted);
    if (!first) {
        out.constant = best ? best->value : Rational(0);
        if (best)
            out.constant_witness = *best;
        return out;
    }
    out.improved = true;
    MembershipSession session;
    const FinSet& pat = first->set;
    const Index span = pat.max() - pat.min() + 1;
    Index next = pat.min();
    while (true) {
        std::optional<CoefficientWitness> piece;
        if (next + (pat.max() - pat.min()) <= bs.size()) {
            std::vector<Index> shifted;
            for (Index i : pat)
                shifted.push_back(i - pat.min() + next);
            FinSet e(std::move(shifted));
            if (session.contains(e, out.family)) {
                Rational v = ev.exact(bs.combine(e, first->coeffs));
                if (v < limit)
                    piece = CoefficientWitness{e, first->coeffs, v};
            }
        }
        if (!piece && next <= bs.size()) {
            std::optional<CoefficientWitness> b;
            std::size_t ex = 0;
            bool smp = false;
            Index hi = std::min<Index>(Index(bs.size()), next + span + Index(horizon));
            piece = search(std::max<Index>(next, Index(n)), hi, b, ex, smp);
        }
        if (!piece)
            break;
        Rational scale = Rational(1) / piece->value;
        std::vector<Rational> cs;
        for (const auto& a : piece->coeffs)
            cs.push_back(a * scale);
        out.groups.push_back(BlockGroup{piece->set, cs});
        next = piece->set.max() + 1;
        out.combinations.push_back(std::move(*piece));
    }
    out.blocking = block_combine(bs, out.groups);
    return out;
}

inline BlockingCertificate james_blocking_step(const NormSpace& space, const BlockSequence& bs, std::size_t n,
                                               const Rational& K, std::size_t horizon)
{
    return james_blocking_step(evaluator(space), bs, n, K, horizon);
}

struct TwoNormBlocking {
    BlockSequence blocking;
    std::vector<BlockingCertificate> rounds;
    SpreadingEstimate first, second;
    /// union of origins over every checked family set stayed in the family
    std::size_t support_checks = 0;
};

/// Iterates james_blocking_step against the second norm until the target
/// drops to 1 + eps or no violation is left, checking after every round
/// that unions of origins over members of S_{w^xi} stay in S_{w^xi}.
inline TwoNormBlocking two_norm_blocking(const NormEvaluator& first, const NormEvaluator& second,
                                         const BlockSequence& bs, const Rational& eps, std::size_t horizon,
                                         const Ordinal& xi = Ordinal::natural(1), std::size_t max_rounds = 4,
                                         const SearchOptions& opt = {})
{
    if (eps <= 0)
        throw std::invalid_argument("two_norm_blocking needs eps > 0");
    const FamilyExpr fam = FamilyExpr::schreier(Ordinal::power(xi));
    TwoNormBlocking out;
    out.blocking = bs;
    SpreadingEstimate est = spreading_profile(second, bs, fam, std::min(horizon, bs.size()), opt);
    Rational K = est.l1_lower > 0 ? est.l1_upper / est.l1_lower : Rational(0);
    MembershipSession session;
    for (std::size_t r = 0; r < max_rounds && K > 1 + eps; ++r) {
        std::size_t h = std::min(horizon, out.blocking.size());
        BlockingCertificate c = james_blocking_step(second, out.blocking, 1, K, h, xi, opt);
        bool improved = c.improved && c.blocking.size() >= 2;
        if (improved) {
            bool sampled = false;
            for (const auto& f : family_sets(fam, 1, Index(c.blocking.size()), opt.set_budget, opt.seed, sampled)) {
                FinSet u;
                for (Index i : f)
                    u = u.union_with(c.blocking.origin(i));
                ++out.support_checks;
                if (!session.contains(u, fam))
                    throw ConstructionError("support union " + to_string(u) + " left " + to_string(fam));
            }
            out.blocking = c.blocking;
        }
        K = c.target;
        out.rounds.push_back(std::move(c));
        if (!improved)
            break;
    }
    std::size_t h = std::min(horizon, out.blocking.size());
    out.first = spreading_profile(first, out.blocking, fam, h, opt);
    out.second = spreading_profile(second, out.blocking, fam, h, opt);
    return out;
}

/// y_k = sum_{i in F_k} x_i for successive F_k in S_1 of increasing size.
inline BlockSequence c0_to_l1_blocking(const BlockSequence& bs, const std::vector<FinSet>& sets)
{
    MembershipSession session;
    std::vector<BlockGroup> groups;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        if (!session.contains(sets[k], FamilyExpr::schreier(Ordinal::natural(1))))
            throw ConstructionError("set " + to_string(sets[k]) + " is not in S(1)");
        if (k > 0 && sets[k].size() <= sets[k - 1].size())
            throw ConstructionError("cardinalities not strictly increasing");
        if (k > 0 && !(sets[k - 1].max() < sets[k].min()))
            throw ConstructionError("sets not successive");
        groups.push_back(BlockGroup{sets[k], std::vector<Rational>(sets[k].size(), Rational(1))});
    }
    return block_combine(bs, groups);
}

struct SccBlocking {
    BlockSequence blocking;
    std::vector<SccBlocks> combinations;
    std::vector<Rational> eps;
    /// stopped because the next s.c.c. did not fit the budget
    bool budget_exhausted = false;
};

/// y_k a normalized (xi_{k+1}, xi_k, eps_k) s.c.c. of the tail of bs,
/// eps_k = eps / 4^(k-1), for k = 1..count or until the budget stops it.
inline SccBlocking l1_to_c0_blocking(const NormEvaluator& ev, const BlockSequence& bs, const Ordinal& xi,
                                     const Rational& eps, std::size_t count, std::size_t support_budget = 3000)
{
    if (xi.is_zero())
        throw std::invalid_argument("l1_to_c0_blocking needs xi >= 1");
    SccBlocking out;
    std::vector<BlockGroup> groups;
    std::size_t from = 1;
    Rational e = eps;
    const Ordinal top = Ordinal::power(xi);
    for (std::size_t k = 1; k <= count; ++k, e /= 4) {
        if (from > bs.size()) {
            out.budget_exhausted = true;
            break;
        }
        std::vector<Vector> tail(bs.blocks().begin() + std::ptrdiff_t(from - 1), bs.blocks().end());
        SccBlocks c;
        try {
            c = scc_on_blocks(BlockSequence(tail), fundamental(top, k + 1), fundamental(top, k), e, support_budget);
        } catch (const ConstructionError&) {
            out.budget_exhausted = true;
            break;
        }
        Rational nv = ev.exact(c.vector);
        std::vector<Index> idx;
        std::vector<Rational> cs;
        for (const auto& [j, a] : c.coefficients) {
            idx.push_back(Index(j + from - 1));
            cs.push_back(a / nv);
        }
        from = std::size_t(idx.back()) + 1;
        groups.push_back(BlockGroup{FinSet(std::move(idx)), std::move(cs)});
        out.combinations.push_back(std::move(c));
        out.eps.push_back(e);
    }
    out.blocking = block_combine(bs, groups);
    return out;
}

// ---------------------------------------------------------------------------
// lemma checks
// ---------------------------------------------------------------------------

struct LemmaInstance {
    Rational lhs, rhs;
    bool holds() const { return lhs < rhs; }
};

/// |alpha(sum c_k x_k)| against (1/s(alpha)) sum_{G} c_i + 2 max_{G} c_i,
/// G = blocks whose range meets the range of alpha. Empty G gives nullopt.
inline std::optional<LemmaInstance> check_average_on_blocks(const Functional& alpha, const BlockSequence& bs,
                                                            const std::vector<Rational>& c)
{
    if (alpha.kind() != Functional::Kind::Average)
        throw std::invalid_argument("alpha must be an average");
    if (c.size() != bs.size())
        throw std::invalid_argument("one coefficient per block required");
    Rational sum = 0, mx = 0;
    bool any = false;
    std::vector<Vector::Entry> acc;
    for (std::size_t k = 0; k < bs.size(); ++k) {
        const Vector& x = bs.blocks()[k];
        for (const auto& [i, v] : x)
            acc.emplace_back(i, v * c[k]);
        if (x.max_support() < alpha.min_support() || alpha.max_support() < x.min_support())
            continue;
        any = true;
        sum += c[k];
        mx = std::max(mx, c[k]);
    }
    if (!any)
        return std::nullopt;
    Rational lhs = sdist::abs(evaluate(alpha, Vector(std::move(acc))));
    return LemmaInstance{lhs, sum / Rational(long(alpha.size())) + 2 * mx};
}

/// sum_q |alpha_q(x)| against 1/s(alpha_1) + 6 eps.
inline LemmaInstance check_average_on_scc(const std::vector<Functional>& alphas, const Vector& x, const Rational& eps)
{
    if (alphas.empty())
        throw std::invalid_argument("no averages given");
    Rational lhs = 0;
    for (const auto& a : alphas)
        lhs += sdist::abs(evaluate(a, x));
    return LemmaInstance{lhs, Rational(1) / Rational(long(alphas.front().size())) + 6 * eps};
}

/// Very fast growing and admissible for fam.
inline bool very_fast_growing_admissible(const std::vector<Functional>& alphas, const FamilyExpr& fam)
{
    std::vector<Index> minima;
    for (std::size_t q = 0; q < alphas.size(); ++q) {
        if (alphas[q].kind() != Functional::Kind::Average)
            return false;
        if (q > 0) {
            if (!(alphas[q - 1].max_support() < alphas[q].min_support()))
                return false;
            if (!(alphas[q - 1].size() < alphas[q].size()))
                return false;
            if (!(alphas[q].size() > alphas[q - 1].max_support()))
                return false;
        }
        minima.push_back(alphas[q].min_support());
    }
    MembershipSession session;
    return session.contains(FinSet(minima), fam);
}

} // namespace sdist

#endif // SDIST_CONSTRUCTIONS_HPP
