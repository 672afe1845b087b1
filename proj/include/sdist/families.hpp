#ifndef SDIST_FAMILIES_HPP
#define SDIST_FAMILIES_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "family_expr.hpp"
#include "family_machine.hpp"
#include "finset.hpp"
#include "ordinal.hpp"
#include "rational.hpp"

namespace sdist {

// ---------------------------------------------------------------------------
// membership with witness
// ---------------------------------------------------------------------------

/// Decomposition certifying E in a family.
///   rule "empty"      : E is empty
///   rule "singleton"  : S(0), |E| <= 1
///   rule "cardinality": A(n), |E| <= n
///   rule "schreier1"  : S(1), |E| <= min E
///   rule "successor"  : S(b+1), blocks = successive S(b) pieces, #blocks <= min E
///   rule "limit"      : S(l), limit_index = n <= min E and parts[0] certifies S(l[n])
///   rule "relabel"    : F(M), parts[0] certifies the preimage in F
///   rule "bracket"    : F[G], blocks = G pieces, parts[0] certifies their minima in F
struct MembershipWitness {
    std::string rule;
    FinSet set;
    std::uint64_t limit_index = 0;
    std::vector<MembershipWitness> blocks;
    std::vector<MembershipWitness> parts;
};

struct MembershipResult {
    bool member = false;
    std::optional<MembershipWitness> witness;
};

/// Membership oracle with a session-local cache. Greedy maximal-prefix
/// decompositions are tried first; if greedy fails, a memoized
/// backtracking search over all split points decides.
class MembershipSession {
public:
    MembershipResult member(const FinSet& e, const FamilyExpr& fam)
    {
        auto w = solve(e, fam);
        if (!w)
            return {false, std::nullopt};
        return {true, *w};
    }

    bool contains(const FinSet& e, const FamilyExpr& fam) { return solve(e, fam).has_value(); }

    std::size_t cache_size() const { return cache_.size(); }

private:
    using WitnessPtr = std::shared_ptr<const MembershipWitness>;

    std::optional<MembershipWitness> solve(const FinSet& e, const FamilyExpr& fam)
    {
        auto p = solve_ptr(e, fam);
        if (!p)
            return std::nullopt;
        return *p;
    }

    WitnessPtr solve_ptr(const FinSet& e, const FamilyExpr& fam)
    {
        if (e.empty())
            return std::make_shared<MembershipWitness>(MembershipWitness{"empty", e, 0, {}, {}});
        std::string key = fam.key() + '#' + to_string(e);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
        WitnessPtr w = compute(e, fam);
        cache_.emplace(std::move(key), w);
        return w;
    }

    WitnessPtr compute(const FinSet& e, const FamilyExpr& fam)
    {
        switch (fam.kind()) {
        case FamilyExpr::Kind::Cardinality:
            if (e.size() <= fam.bound())
                return leaf("cardinality", e);
            return nullptr;
        case FamilyExpr::Kind::Schreier:
            return schreier(e, fam.order());
        case FamilyExpr::Kind::Relabel: {
            std::vector<Index> pre;
            for (Index x : e) {
                auto pos = fam.sequence().position_of(x);
                if (!pos)
                    return nullptr;
                pre.push_back(Index(*pos));
            }
            auto child = solve_ptr(FinSet(std::move(pre)), fam.outer());
            if (!child)
                return nullptr;
            MembershipWitness w{"relabel", e, 0, {}, {*child}};
            return std::make_shared<MembershipWitness>(std::move(w));
        }
        case FamilyExpr::Kind::Bracket:
            return bracket(e, fam.outer(), fam.inner());
        }
        return nullptr;
    }

    static WitnessPtr leaf(const char* rule, const FinSet& e)
    {
        return std::make_shared<MembershipWitness>(MembershipWitness{rule, e, 0, {}, {}});
    }

    static FinSet slice(const FinSet& e, std::size_t from, std::size_t to)
    {
        return FinSet(std::vector<Index>(e.begin() + std::ptrdiff_t(from), e.begin() + std::ptrdiff_t(to)));
    }

    WitnessPtr schreier(const FinSet& e, const Ordinal& xi)
    {
        if (xi.is_zero())
            return e.size() <= 1 ? leaf("singleton", e) : nullptr;
        if (xi == Ordinal::natural(1))
            return e.size() <= e.min() ? leaf("schreier1", e) : nullptr;
        if (xi.is_limit()) {
            for (Index n = 1; n <= e.min(); ++n) {
                FamilyExpr sub = FamilyExpr::schreier(fundamental(xi, n));
                if (auto child = solve_ptr(e, sub)) {
                    MembershipWitness w{"limit", e, n, {}, {*child}};
                    return std::make_shared<MembershipWitness>(std::move(w));
                }
            }
            return nullptr;
        }
        FamilyExpr inner = FamilyExpr::schreier(xi.predecessor());
        auto blocks = split(e, inner, [&](const std::vector<Index>& minima) { return minima.size() <= e.min(); },
                            [&](const std::vector<Index>& minima) { return minima.size() <= e.min(); });
        if (!blocks)
            return nullptr;
        MembershipWitness w{"successor", e, 0, std::move(*blocks), {}};
        return std::make_shared<MembershipWitness>(std::move(w));
    }

    WitnessPtr bracket(const FinSet& e, const FamilyExpr& outer, const FamilyExpr& inner)
    {
        const bool prune = outer.hereditary();
        auto minima_ok = [&](const std::vector<Index>& minima) { return contains(FinSet(minima), outer); };
        auto prefix_ok = [&](const std::vector<Index>& minima) { return !prune || minima_ok(minima); };
        auto blocks = split(e, inner, minima_ok, prefix_ok);
        if (!blocks)
            return nullptr;
        std::vector<Index> minima;
        for (const auto& b : *blocks)
            minima.push_back(b.set.min());
        auto mw = solve_ptr(FinSet(minima), outer);
        MembershipWitness w{"bracket", e, 0, std::move(*blocks), {*mw}};
        return std::make_shared<MembershipWitness>(std::move(w));
    }

    /// Splits e into successive consecutive pieces, each in `inner`, whose
    /// minima satisfy `accept_minima`; `prefix_ok` may prune partial minima.
    template <class Accept, class Prefix>
    std::optional<std::vector<MembershipWitness>> split(const FinSet& e, const FamilyExpr& inner,
                                                        Accept&& accept_minima, Prefix&& prefix_ok)
    {
        const std::size_t k = e.size();
        // piece_end[i]: largest j with e[i..j) in inner (hereditary inner families only)
        // greedy: maximal prefixes
        {
            std::vector<MembershipWitness> blocks;
            std::vector<Index> minima;
            std::size_t i = 0;
            bool ok = true;
            while (i < k) {
                std::size_t j = i + 1;
                WitnessPtr best = solve_ptr(slice(e, i, j), inner);
                if (!best) {
                    ok = false;
                    break;
                }
                while (j < k) {
                    auto w = solve_ptr(slice(e, i, j + 1), inner);
                    if (!w)
                        break;
                    best = w;
                    ++j;
                }
                blocks.push_back(*best);
                minima.push_back(e[i]);
                i = j;
            }
            if (ok && accept_minima(minima))
                return blocks;
        }
        // backtracking over every split; failures are memoized by (position, #pieces)
        // when minima acceptance depends only on the count, and by the full
        // minima prefix otherwise.
        std::vector<MembershipWitness> blocks;
        std::vector<Index> minima;
        std::unordered_set<std::string> failed;
        std::function<bool(std::size_t)> dfs = [&](std::size_t i) -> bool {
            if (i == k)
                return accept_minima(minima);
            std::string key = std::to_string(i) + ':' + to_string(FinSet(minima));
            if (failed.count(key))
                return false;
            for (std::size_t j = k; j > i; --j) {
                auto w = solve_ptr(slice(e, i, j), inner);
                if (!w)
                    continue;
                minima.push_back(e[i]);
                if (prefix_ok(minima)) {
                    blocks.push_back(*w);
                    if (dfs(j))
                        return true;
                    blocks.pop_back();
                }
                minima.pop_back();
            }
            failed.insert(std::move(key));
            return false;
        };
        if (dfs(0))
            return blocks;
        return std::nullopt;
    }

    std::unordered_map<std::string, WitnessPtr> cache_;
};

inline MembershipResult member(const FinSet& e, const FamilyExpr& fam)
{
    MembershipSession session;
    return session.member(e, fam);
}

/// Re-derives membership bottom-up from a witness alone (no search).
inline bool check_witness(const MembershipWitness& w, const FamilyExpr& fam)
{
    const FinSet& e = w.set;
    if (w.rule == "empty")
        return e.empty();
    auto blocks_cover = [&] {
        std::vector<Index> all;
        for (std::size_t i = 0; i < w.blocks.size(); ++i) {
            const FinSet& b = w.blocks[i].set;
            if (b.empty())
                return false;
            if (i > 0 && !(w.blocks[i - 1].set.max() < b.min()))
                return false;
            all.insert(all.end(), b.begin(), b.end());
        }
        return FinSet(all) == e;
    };
    switch (fam.kind()) {
    case FamilyExpr::Kind::Cardinality:
        return w.rule == "cardinality" && e.size() <= fam.bound();
    case FamilyExpr::Kind::Schreier: {
        const Ordinal& xi = fam.order();
        if (xi.is_zero())
            return w.rule == "singleton" && e.size() <= 1;
        if (xi == Ordinal::natural(1))
            return w.rule == "schreier1" && e.size() <= e.min();
        if (xi.is_limit()) {
            return w.rule == "limit" && w.limit_index >= 1 && w.limit_index <= e.min() && w.parts.size() == 1 &&
                   w.parts[0].set == e &&
                   check_witness(w.parts[0], FamilyExpr::schreier(fundamental(xi, w.limit_index)));
        }
        if (w.rule != "successor" || !blocks_cover() || w.blocks.size() > e.min())
            return false;
        FamilyExpr inner = FamilyExpr::schreier(xi.predecessor());
        return std::all_of(w.blocks.begin(), w.blocks.end(),
                           [&](const MembershipWitness& b) { return check_witness(b, inner); });
    }
    case FamilyExpr::Kind::Relabel: {
        if (w.rule != "relabel" || w.parts.size() != 1)
            return false;
        if (fam.sequence().apply(w.parts[0].set) != e)
            return false;
        return check_witness(w.parts[0], fam.outer());
    }
    case FamilyExpr::Kind::Bracket: {
        if (w.rule != "bracket" || w.parts.size() != 1 || !blocks_cover())
            return false;
        std::vector<Index> minima;
        for (const auto& b : w.blocks) {
            if (!check_witness(b, fam.inner()))
                return false;
            minima.push_back(b.set.min());
        }
        return w.parts[0].set == FinSet(minima) && check_witness(w.parts[0], fam.outer());
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// relabeling
// ---------------------------------------------------------------------------

/// M(E) = (m_i : i in E).
inline FinSet relabel(const FinSet& e, const IndexSequence& m) { return m.apply(e); }

/// F(M) as a family expression.
inline FamilyExpr relabel(const FamilyExpr& fam, const IndexSequence& m) { return FamilyExpr::relabel(fam, m); }

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

struct MaximalSet {
    FinSet set;
    /// Some extension by an element beyond the horizon is still a member.
    bool truncated = false;
};

struct Enumeration {
    std::vector<MaximalSet> sets;
    bool all_truncated = false;
    bool budget_exhausted = false;
};

/// All subset-maximal members with min = first and support in [first, horizon].
inline Enumeration enumerate_maximal(const FamilyExpr& fam, Index first, Index horizon,
                                     std::size_t budget = 5'000'000)
{
    if (first > horizon || first == 0)
        throw std::invalid_argument("enumerate_maximal needs 1 <= first <= horizon");
    FamilyMachine machine(fam);
    Enumeration out;
    std::size_t visited = 0;
    FinSet current;

    auto is_member_with = [&](const FinSet& base, Index x) {
        std::vector<Index> v(base.begin(), base.end());
        v.insert(std::upper_bound(v.begin(), v.end(), x), x);
        return machine.member(FinSet(std::move(v)));
    };
    auto maximal = [&](const FinSet& a) {
        for (Index x = first + 1; x <= horizon; ++x)
            if (!a.contains(x) && is_member_with(a, x))
                return false;
        return true;
    };
    auto truncated = [&](const FinSet& a) {
        Index probe = horizon + 1;
        if (fam.kind() == FamilyExpr::Kind::Relabel) {
            // next value of the relabeling beyond the horizon
            for (std::size_t i = 1;; ++i) {
                if (auto n = fam.sequence().length(); n && i > *n)
                    return false;
                if (fam.sequence().at(i) > horizon) {
                    probe = fam.sequence().at(i);
                    break;
                }
            }
        }
        return is_member_with(a, probe);
    };

    std::function<void(const MachineState&)> dfs = [&](const MachineState& s) {
        if (++visited > budget) {
            out.budget_exhausted = true;
            return;
        }
        if (machine.accepts(s) && maximal(current))
            out.sets.push_back({current, truncated(current)});
        for (Index x = current.max() + 1; x <= horizon && !out.budget_exhausted; ++x) {
            MachineState t = machine.step(s, x);
            if (FamilyMachine::is_dead(t))
                continue;
            current.push_back(x);
            dfs(t);
            current.pop_back();
        }
    };
    MachineState s0 = machine.step(FamilyMachine::initial(), first);
    if (!FamilyMachine::is_dead(s0)) {
        current.push_back(first);
        dfs(s0);
    }
    out.all_truncated = !out.sets.empty() && std::all_of(out.sets.begin(), out.sets.end(),
                                                         [](const MaximalSet& m) { return m.truncated; });
    return out;
}

// ---------------------------------------------------------------------------
// inclusion checks
// ---------------------------------------------------------------------------

struct InclusionReport {
    bool pass = true;
    std::optional<FinSet> counterexample;
    Index certified_horizon = 0;
    std::size_t states_explored = 0;
    bool budget_exhausted = false;
};

/// Checks that every member of `lhs` with support in [min_first, horizon]
/// is a member of `rhs`. Exhaustive: walks the product of the two
/// membership automata over all increasing sequences. A node
/// (lhs state, rhs state, last element) is skipped when an explored node
/// with the same lhs state, an earlier-or-equal last element and a rhs
/// state accepting fewer continuations already covers it.
inline InclusionReport verify_inclusion(const FamilyExpr& lhs, const FamilyExpr& rhs, Index horizon,
                                        Index min_first = 1, std::size_t budget = 20'000'000)
{
    FamilyMachine left(lhs), right(rhs);
    InclusionReport rep;
    rep.certified_horizon = horizon;
    std::unordered_map<std::uint32_t, std::vector<std::pair<Index, MachineState>>> explored;
    std::vector<Index> path;

    auto covered = [&](MachineState l, MachineState r, Index x) {
        auto& list = explored[l.id];
        for (const auto& [x0, r0] : list)
            if (x0 <= x && right.weaker(r0, r))
                return true;
        list.emplace_back(x, r);
        return false;
    };

    std::function<bool(MachineState, MachineState, Index)> dfs = [&](MachineState ls, MachineState rs,
                                                                    Index last) -> bool {
        for (Index x = std::max<Index>(last + 1, min_first); x <= horizon; ++x) {
            MachineState l2 = left.step(ls, x);
            if (FamilyMachine::is_dead(l2))
                continue;
            MachineState r2 = right.step(rs, x);
            path.push_back(x);
            if (left.accepts(l2) && !right.accepts(r2)) {
                rep.pass = false;
                rep.counterexample = FinSet(path);
                return false;
            }
            if (!covered(l2, r2, x)) {
                if (++rep.states_explored > budget) {
                    rep.budget_exhausted = true;
                    path.pop_back();
                    return false;
                }
                if (!dfs(l2, r2, x)) {
                    path.pop_back();
                    return false;
                }
            }
            path.pop_back();
        }
        return true;
    };
    dfs(FamilyMachine::initial(), FamilyMachine::initial(), 0);
    if (rep.budget_exhausted)
        rep.pass = false;
    return rep;
}

inline InclusionReport verify_bracket_inclusion(const FamilyExpr& lhs, const FamilyExpr& rhs, Index horizon)
{
    return verify_inclusion(lhs, rhs, horizon);
}

// ---------------------------------------------------------------------------
// threshold search
// ---------------------------------------------------------------------------

struct ThresholdReport {
    Index n = 0;
    Index certified_horizon = 0;
    /// (rejected n, counterexample)
    std::vector<std::pair<Index, FinSet>> rejected;
    bool budget_exhausted = false;
};

/// Least n such that every E in S_xi with n <= min E and E within [n, horizon]
/// lies in S_zeta. Certified to the horizon only.
inline ThresholdReport threshold_search(const Ordinal& xi, const Ordinal& zeta, Index horizon)
{
    if (compare(xi, zeta) > 0)
        throw std::invalid_argument("threshold_search requires xi <= zeta");
    ThresholdReport rep;
    rep.certified_horizon = horizon;
    FamilyExpr lhs = FamilyExpr::schreier(xi), rhs = FamilyExpr::schreier(zeta);
    for (Index n = 1;; ++n) {
        if (n > horizon) {
            rep.n = n;
            return rep;
        }
        InclusionReport r = verify_inclusion(lhs, rhs, horizon, n);
        if (r.budget_exhausted) {
            rep.budget_exhausted = true;
            rep.n = n;
            return rep;
        }
        if (r.pass) {
            rep.n = n;
            return rep;
        }
        rep.rejected.emplace_back(n, *r.counterexample);
    }
}

// ---------------------------------------------------------------------------
// the constructive sequences
// ---------------------------------------------------------------------------

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stage log of construct_L for reports.
struct LStage {
    std::uint64_t n = 0;
    Ordinal xi_n;
    Ordinal gamma_k;
    std::uint64_t k_n = 0;
    Index r_n = 0;
    Index ell_n = 0;
};

struct LConstruction {
    IndexSequence sequence = IndexSequence::naturals();
    std::vector<LStage> stages;
    Index certified_horizon = 0;
};

namespace detail {

/// Least k with a < lim[k].
inline std::uint64_t first_index_above(const Ordinal& a, const Ordinal& lim)
{
    for (std::uint64_t k = 1; k < 1'000'000; ++k)
        if (compare(a, fundamental(lim, k)) < 0)
            return k;
    throw ConstructionError("no fundamental-sequence term exceeds " + to_string(a));
}

/// Table of every term <= horizon, then an arithmetic tail above the last one.
inline IndexSequence extend_table(std::vector<Index> table, Index horizon)
{
    Index tail = std::max<Index>(horizon, table.empty() ? 0 : table.back()) + 1;
    if (table.empty())
        return IndexSequence::arithmetic(tail, 1);
    return IndexSequence::table_extended(std::move(table), tail, 1);
}

inline LConstruction construct_L(const Ordinal& xi, const Ordinal& zeta, const IndexSequence& m, Index horizon,
                                 Index threshold_horizon, std::vector<LStage>* log)
{
    if (xi.is_zero())
        return LConstruction{m, {}, horizon};
    if (xi.is_successor())
        return construct_L(xi.predecessor(), zeta, m, horizon, threshold_horizon, log);

    const Ordinal target = add(zeta, xi);
    std::vector<Index> diag;
    IndexSequence prev = m;
    for (std::uint64_t n = 1;; ++n) {
        LStage st;
        st.n = n;
        st.xi_n = fundamental(xi, n);
        Ordinal lower = add(zeta, st.xi_n);
        st.k_n = first_index_above(lower, target);
        st.gamma_k = fundamental(target, st.k_n);
        ThresholdReport thr = threshold_search(lower, st.gamma_k, threshold_horizon);
        if (thr.budget_exhausted)
            throw ConstructionError("threshold search budget exhausted at stage " + std::to_string(n));
        st.r_n = std::max<Index>(thr.n, Index(st.k_n));
        IndexSequence tail = prev.tail_from(st.r_n);
        LConstruction inner = construct_L(st.xi_n, zeta, tail, horizon, threshold_horizon, log);
        IndexSequence ln = inner.sequence;
        Index ell;
        try {
            ell = ln.at(n);
        } catch (const std::out_of_range&) {
            throw ConstructionError("index sequence exhausted at stage " + std::to_string(n));
        }
        if (ell > horizon)
            break;
        if (!diag.empty() && ell <= diag.back())
            throw ConstructionError("diagonal sequence not increasing at stage " + std::to_string(n));
        st.ell_n = ell;
        diag.push_back(ell);
        if (log)
            log->push_back(st);
        prev = ln;
    }
    if (diag.empty())
        throw ConstructionError("horizon " + std::to_string(horizon) + " too small: no diagonal term reached");
    return LConstruction{extend_table(std::move(diag), horizon), {}, horizon};
}

} // namespace detail

/// L in [M] with S_xi(L)[S_zeta] contained in S_{zeta+xi}, following the
/// inductive recipe: L = M at 0, unchanged at successors, and at limits the
/// diagonal of nested L_n with thresholds k_n, r_n. Terms above the horizon
/// are an arbitrary increasing tail.
inline LConstruction construct_L(const Ordinal& xi, const Ordinal& zeta, const IndexSequence& m, Index horizon,
                                 Index threshold_horizon = 0)
{
    if (threshold_horizon == 0)
        threshold_horizon = std::min<Index>(horizon, 24);
    LConstruction out;
    std::vector<LStage> log;
    LConstruction built = detail::construct_L(xi, zeta, m, horizon, threshold_horizon, &log);
    out.sequence = built.sequence;
    out.stages = std::move(log);
    out.certified_horizon = horizon;
    return out;
}

/// L with S_xi[S_zeta](L) contained in S_{zeta+xi}: construct_L with M = N.
inline LConstruction construct_L_bracket(const Ordinal& xi, const Ordinal& zeta, Index horizon,
                                         Index threshold_horizon = 0)
{
    return construct_L(xi, zeta, IndexSequence::naturals(), horizon, threshold_horizon);
}

struct NConstruction {
    IndexSequence n_sequence = IndexSequence::naturals();
    IndexSequence l_sequence = IndexSequence::naturals();
    Index certified_horizon = 0;
};

/// N = (n_i) with union_{i in E} F_i in S_{zeta+xi} for all E in S_xi(N):
/// m_i = min F_i, L = (m_{n_i}) from construct_L on M = (m_i).
inline NConstruction construct_N(const Ordinal& xi, const Ordinal& zeta, const std::vector<FinSet>& blocks,
                                 Index horizon, Index threshold_horizon = 0)
{
    MembershipSession session;
    FamilyExpr fz = FamilyExpr::schreier(zeta);
    std::vector<Index> mins;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].empty())
            throw ConstructionError("block " + std::to_string(i + 1) + " is empty");
        if (i > 0 && !(blocks[i - 1].max() < blocks[i].min()))
            throw ConstructionError("blocks " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                    " are not successive");
        if (!session.contains(blocks[i], fz))
            throw ConstructionError("block " + std::to_string(i + 1) + " is not in S(" + to_string(zeta) + ")");
        mins.push_back(blocks[i].min());
    }
    IndexSequence m = IndexSequence::explicit_prefix(mins);
    Index bound = std::min<Index>(horizon, mins.empty() ? 0 : mins.back());
    LConstruction lc = construct_L(xi, zeta, m, bound, threshold_horizon);
    std::vector<Index> ns, ls;
    for (Index v : lc.sequence.values_up_to(bound)) {
        auto pos = m.position_of(v);
        if (!pos)
            break;
        ns.push_back(Index(*pos));
        ls.push_back(v);
    }
    NConstruction out;
    out.n_sequence = IndexSequence::explicit_prefix(ns);
    out.l_sequence = IndexSequence::explicit_prefix(ls);
    out.certified_horizon = horizon;
    return out;
}

/// For every E in S_xi(N) with E inside the available block indices,
/// checks union_{i in E} F_i in S_target; returns the first failing E.
inline InclusionReport verify_union_inclusion(const Ordinal& xi, const IndexSequence& n,
                                              const std::vector<FinSet>& blocks, const Ordinal& target)
{
    InclusionReport rep;
    rep.certified_horizon = Index(blocks.size());
    FamilyExpr lhs = FamilyExpr::relabel(FamilyExpr::schreier(xi), n);
    FamilyMachine left(lhs);
    MembershipSession session;
    FamilyExpr rhs = FamilyExpr::schreier(target);
    FinSet current;
    std::function<bool(const MachineState&)> dfs = [&](const MachineState& s) -> bool {
        for (Index i = current.max() + 1; i <= blocks.size(); ++i) {
            MachineState t = left.step(s, i);
            if (FamilyMachine::is_dead(t))
                continue;
            current.push_back(i);
            ++rep.states_explored;
            if (left.accepts(t)) {
                FinSet u;
                for (Index j : current)
                    u = u.union_with(blocks[j - 1]);
                if (!session.contains(u, rhs)) {
                    rep.pass = false;
                    rep.counterexample = current;
                    return false;
                }
            }
            if (!dfs(t))
                return false;
            current.pop_back();
        }
        return true;
    };
    dfs(FamilyMachine::initial());
    return rep;
}

// ---------------------------------------------------------------------------
// mass maximisation
// ---------------------------------------------------------------------------

struct MassResult {
    Rational mass;
    FinSet argmax;
};

/// max over G in fam of sum_{i in G} c_i, exact. Coefficients must be
/// nonnegative and fam hereditary (G is taken inside the support).
/// Branch and bound over the support in increasing order; subproblems are
/// shared through the automaton state.
inline MassResult family_mass(const std::map<Index, Rational>& coeffs, const FamilyExpr& fam)
{
    std::vector<std::pair<Index, Rational>> items;
    for (const auto& [i, c] : coeffs) {
        if (c < 0)
            throw std::invalid_argument("family_mass needs nonnegative coefficients");
        if (c > 0)
            items.emplace_back(i, c);
    }
    const std::size_t n = items.size();
    // integer weights over a common denominator
    mpz_class denom = 1;
    for (const auto& it : items)
        mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), it.second.get_den_mpz_t());
    std::vector<mpz_class> w(n), suffix(n + 1, mpz_class(0));
    for (std::size_t i = 0; i < n; ++i)
        w[i] = items[i].second.get_num() * (denom / items[i].second.get_den());
    for (std::size_t i = n; i-- > 0;)
        suffix[i] = suffix[i + 1] + w[i];

    FamilyMachine machine(fam);
    struct Entry {
        mpz_class best;
        bool take;
    };
    std::unordered_map<std::uint64_t, Entry> memo;
    auto key_of = [](MachineState s, std::size_t pos) { return (std::uint64_t(s.id) << 32) | std::uint64_t(pos); };

    // best completion value from position pos in state s (>= 0; empty completion allowed
    // when s accepts, which always holds for hereditary families)
    std::function<mpz_class(MachineState, std::size_t)> best = [&](MachineState s, std::size_t pos) -> mpz_class {
        if (pos == n)
            return mpz_class(0);
        std::uint64_t key = key_of(s, pos);
        if (auto it = memo.find(key); it != memo.end())
            return it->second.best;
        Entry e{best(s, pos + 1), false};
        // bound: taking cannot beat skip if the whole remainder does not
        if (e.best < suffix[pos]) {
            MachineState t = machine.step(s, items[pos].first);
            if (!FamilyMachine::is_dead(t)) {
                mpz_class take = w[pos] + best(t, pos + 1);
                if (take > e.best)
                    e = Entry{take, true};
            }
        }
        memo.emplace(key, e);
        return e.best;
    };

    MachineState s = FamilyMachine::initial();
    MassResult out{Rational(best(s, 0), denom), FinSet{}};
    out.mass.canonicalize();
    for (std::size_t pos = 0; pos < n; ++pos) {
        auto it = memo.find(key_of(s, pos));
        if (it == memo.end() || !it->second.take)
            continue;
        out.argmax.push_back(items[pos].first);
        s = machine.step(s, items[pos].first);
    }
    return out;
}

} // namespace sdist

#endif // SDIST_FAMILIES_HPP
