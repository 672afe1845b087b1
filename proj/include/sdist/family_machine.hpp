#ifndef SDIST_FAMILY_MACHINE_HPP
#define SDIST_FAMILY_MACHINE_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "family_expr.hpp"

namespace sdist {

/// Interned state of the online membership automaton after reading a set
/// in increasing order. Equal ids accept exactly the same continuations.
struct MachineState {
    std::uint32_t id = 0;

    friend bool operator==(const MachineState&, const MachineState&) = default;
    friend auto operator<=>(const MachineState&, const MachineState&) = default;
};

/// Reads the elements of a set one at a time, in increasing order, and
/// decides membership in a family. Successor Schreier levels use greedy
/// maximal blocks (optimal for hereditary inner families); limit levels
/// keep one branch per admissible n <= min E; brackets track every
/// (outer, inner) pair reachable by a block decomposition.
///
/// States and sub-families are hash-consed, and transitions memoized, so
/// nested limit levels share structure instead of copying it.
class FamilyMachine {
public:
    explicit FamilyMachine(FamilyExpr fam) : fam_(std::move(fam))
    {
        nodes_.push_back({}); // empty
        nodes_.push_back({}); // dead
        root_ = intern_family(fam_);
    }

    const FamilyExpr& family() const { return fam_; }

    static MachineState initial() { return {kEmpty}; }
    static MachineState dead_state() { return {kDead}; }
    static bool is_dead(MachineState s) { return s.id == kDead; }

    MachineState step(MachineState s, Index x) { return {step(root_, s.id, x)}; }
    bool accepts(MachineState s) { return accepts(root_, s.id); }

    bool member(const FinSet& e)
    {
        MachineState s = initial();
        for (Index x : e) {
            s = step(s, x);
            if (is_dead(s))
                return false;
        }
        return accepts(s);
    }

    /// Sufficient test for L(a) <= L(b), where L(s) is the set of
    /// continuations accepted from s. Sound but not complete.
    bool weaker(MachineState a, MachineState b) { return weaker(root_, a.id, b.id); }

    std::size_t state_count() const { return nodes_.size(); }

private:
    static constexpr std::uint32_t kEmpty = 0;
    static constexpr std::uint32_t kDead = 1;

    struct Node {
        std::vector<std::int64_t> ints;
        std::vector<std::uint32_t> kids;
    };

    enum class FKind { Zero, One, Successor, Limit, Cardinality, Bracket, Relabel };

    struct FamNode {
        FKind kind;
        Ordinal order;
        std::uint64_t bound = 0;
        std::uint32_t a = 0, b = 0; // predecessor / outer, inner
        const IndexSequence* seq = nullptr;
        std::vector<std::uint32_t> fundamentals; // lazily extended, index n-1
    };

    struct Key3 {
        std::uint32_t f, s, x;
        bool operator==(const Key3&) const = default;
    };
    struct Key3Hash {
        std::size_t operator()(const Key3& k) const
        {
            std::uint64_t h = (std::uint64_t(k.f) << 32) ^ (std::uint64_t(k.s) * 0x9E3779B97F4A7C15ull) ^ k.x;
            return std::size_t(h ^ (h >> 29));
        }
    };

    std::uint32_t intern_family(const FamilyExpr& f)
    {
        switch (f.kind()) {
        case FamilyExpr::Kind::Schreier:
            return intern_schreier(f.order());
        case FamilyExpr::Kind::Cardinality: {
            FamNode n{FKind::Cardinality, {}, f.bound(), 0, 0, nullptr, {}};
            return add_family("A" + std::to_string(f.bound()), std::move(n));
        }
        case FamilyExpr::Kind::Bracket: {
            std::uint32_t o = intern_family(f.outer()), i = intern_family(f.inner());
            FamNode n{FKind::Bracket, {}, 0, o, i, nullptr, {}};
            return add_family("B" + std::to_string(o) + "," + std::to_string(i), std::move(n));
        }
        case FamilyExpr::Kind::Relabel: {
            std::uint32_t o = intern_family(f.outer());
            seqs_.push_back(std::make_unique<IndexSequence>(f.sequence()));
            FamNode n{FKind::Relabel, {}, 0, o, 0, seqs_.back().get(), {}};
            return add_family("R" + std::to_string(o) + "," + to_string(f.sequence()), std::move(n));
        }
        }
        return 0;
    }

    std::uint32_t intern_schreier(const Ordinal& xi)
    {
        std::string key = "S" + to_string(xi);
        if (auto it = fam_ids_.find(key); it != fam_ids_.end())
            return it->second;
        FamNode n{FKind::Zero, xi, 0, 0, 0, nullptr, {}};
        if (xi.is_zero())
            n.kind = FKind::Zero;
        else if (xi == Ordinal::natural(1))
            n.kind = FKind::One;
        else if (xi.is_successor()) {
            n.kind = FKind::Successor;
            n.a = intern_schreier(xi.predecessor());
        } else
            n.kind = FKind::Limit;
        return add_family(std::move(key), std::move(n));
    }

    std::uint32_t add_family(std::string key, FamNode n)
    {
        if (auto it = fam_ids_.find(key); it != fam_ids_.end())
            return it->second;
        auto id = std::uint32_t(fams_.size());
        fams_.push_back(std::move(n));
        fam_ids_.emplace(std::move(key), id);
        return id;
    }

    std::uint32_t fundamental_family(std::uint32_t f, std::uint64_t n)
    {
        while (fams_[f].fundamentals.size() < n) {
            Ordinal o = fundamental(fams_[f].order, fams_[f].fundamentals.size() + 1);
            std::uint32_t id = intern_schreier(o);
            fams_[f].fundamentals.push_back(id);
        }
        return fams_[f].fundamentals[n - 1];
    }

    std::uint32_t make(Node n)
    {
        std::string key;
        auto put = [&](auto v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
        put(std::uint32_t(n.ints.size()));
        for (auto v : n.ints)
            put(v);
        for (auto v : n.kids)
            put(v);
        if (auto it = node_ids_.find(key); it != node_ids_.end())
            return it->second;
        auto id = std::uint32_t(nodes_.size());
        nodes_.push_back(std::move(n));
        node_ids_.emplace(std::move(key), id);
        return id;
    }

    std::uint32_t step(std::uint32_t f, std::uint32_t s, Index x)
    {
        if (s == kDead)
            return kDead;
        Key3 key{f, s, x};
        if (auto it = step_memo_.find(key); it != step_memo_.end())
            return it->second;
        std::uint32_t r = compute_step(f, s, x);
        step_memo_.emplace(key, r);
        return r;
    }

    std::uint32_t compute_step(std::uint32_t f, std::uint32_t s, Index x)
    {
        const bool fresh = s == kEmpty;
        switch (fams_[f].kind) {
        case FKind::Zero:
            return fresh ? make({{0}, {}}) : kDead;
        case FKind::One: {
            // remaining capacity
            std::int64_t rem = fresh ? std::int64_t(x) - 1 : nodes_[s].ints[0] - 1;
            return rem < 0 ? kDead : make({{rem}, {}});
        }
        case FKind::Cardinality: {
            std::int64_t rem = (fresh ? std::int64_t(fams_[f].bound) : nodes_[s].ints[0]) - 1;
            return rem < 0 ? kDead : make({{rem}, {}});
        }
        case FKind::Successor: {
            // remaining blocks after the current one, current block state
            std::uint32_t beta = fams_[f].a;
            if (fresh)
                return make({{std::int64_t(x) - 1}, {step(beta, kEmpty, x)}});
            std::int64_t rem = nodes_[s].ints[0];
            std::uint32_t cand = step(beta, nodes_[s].kids[0], x);
            if (cand != kDead)
                return make({{rem}, {cand}});
            if (rem == 0)
                return kDead;
            return make({{rem - 1}, {step(beta, kEmpty, x)}});
        }
        case FKind::Limit: {
            // E in S_xi iff E in S_{xi[n]} for some n <= min E
            Node out;
            if (fresh) {
                for (Index n = 1; n <= x; ++n) {
                    std::uint32_t c = step(fundamental_family(f, n), kEmpty, x);
                    if (c != kDead) {
                        out.ints.push_back(n);
                        out.kids.push_back(c);
                    }
                }
            } else {
                const Node cur = nodes_[s];
                for (std::size_t i = 0; i < cur.kids.size(); ++i) {
                    std::uint32_t c = step(fundamental_family(f, std::uint64_t(cur.ints[i])), cur.kids[i], x);
                    if (c != kDead) {
                        out.ints.push_back(cur.ints[i]);
                        out.kids.push_back(c);
                    }
                }
            }
            return out.kids.empty() ? kDead : make(std::move(out));
        }
        case FKind::Relabel: {
            auto pos = fams_[f].seq->position_of(x);
            if (!pos)
                return kDead;
            return step(fams_[f].a, s, Index(*pos));
        }
        case FKind::Bracket: {
            std::uint32_t outer = fams_[f].a, inner = fams_[f].b;
            std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
            auto push = [&](std::uint32_t fs, std::uint32_t gs) {
                if (fs != kDead && gs != kDead)
                    pairs.emplace_back(fs, gs);
            };
            if (fresh) {
                push(step(outer, kEmpty, x), step(inner, kEmpty, x));
            } else {
                const Node cur = nodes_[s];
                for (std::size_t i = 0; i < cur.kids.size(); i += 2) {
                    // extend the current block
                    push(cur.kids[i], step(inner, cur.kids[i + 1], x));
                    // close it and open a new block at x
                    if (accepts(inner, cur.kids[i + 1]))
                        push(step(outer, cur.kids[i], x), step(inner, kEmpty, x));
                }
            }
            if (pairs.empty())
                return kDead;
            std::sort(pairs.begin(), pairs.end());
            pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
            // keep only pairs not covered by another pair
            std::vector<bool> drop(pairs.size(), false);
            for (std::size_t i = 0; i < pairs.size(); ++i)
                for (std::size_t j = 0; j < pairs.size() && !drop[i]; ++j)
                    if (j != i && !drop[j] && weaker(outer, pairs[i].first, pairs[j].first) &&
                        weaker(inner, pairs[i].second, pairs[j].second))
                        drop[i] = true;
            Node out;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (drop[i])
                    continue;
                auto [a, b] = pairs[i];
                out.kids.push_back(a);
                out.kids.push_back(b);
            }
            return make(std::move(out));
        }
        }
        return kDead;
    }

    bool accepts(std::uint32_t f, std::uint32_t s)
    {
        if (s == kEmpty)
            return true;
        if (s == kDead)
            return false;
        switch (fams_[f].kind) {
        case FKind::Relabel:
            return accepts(fams_[f].a, s);
        case FKind::Bracket: {
            const Node cur = nodes_[s];
            for (std::size_t i = 0; i < cur.kids.size(); i += 2)
                if (accepts(fams_[f].a, cur.kids[i]) && accepts(fams_[f].b, cur.kids[i + 1]))
                    return true;
            return false;
        }
        default:
            // Schreier and cardinality levels are hereditary: live means member
            return true;
        }
    }

    bool weaker(std::uint32_t f, std::uint32_t a, std::uint32_t b)
    {
        if (a == b || a == kDead)
            return true;
        if (b == kDead || a == kEmpty || b == kEmpty)
            return false;
        Key3 key{f, a, b};
        if (auto it = weaker_memo_.find(key); it != weaker_memo_.end())
            return it->second;
        bool r = compute_weaker(f, a, b);
        weaker_memo_.emplace(key, r);
        return r;
    }

    bool compute_weaker(std::uint32_t f, std::uint32_t a, std::uint32_t b)
    {
        const Node na = nodes_[a], nb = nodes_[b];
        switch (fams_[f].kind) {
        case FKind::Zero:
            return true;
        case FKind::One:
        case FKind::Cardinality:
            return na.ints[0] <= nb.ints[0];
        case FKind::Successor:
            // a spare block in b can host whatever extends a's current block
            if (nb.ints[0] > na.ints[0])
                return true;
            return na.ints[0] == nb.ints[0] && weaker(fams_[f].a, na.kids[0], nb.kids[0]);
        case FKind::Limit: {
            std::size_t j = 0;
            for (std::size_t i = 0; i < na.kids.size(); ++i) {
                while (j < nb.kids.size() && nb.ints[j] < na.ints[i])
                    ++j;
                if (j == nb.kids.size() || nb.ints[j] != na.ints[i])
                    return false;
                if (!weaker(fundamental_family(f, std::uint64_t(na.ints[i])), na.kids[i], nb.kids[j]))
                    return false;
            }
            return true;
        }
        case FKind::Relabel:
            return weaker(fams_[f].a, a, b);
        case FKind::Bracket:
            for (std::size_t i = 0; i < na.kids.size(); i += 2) {
                bool covered = false;
                for (std::size_t j = 0; j < nb.kids.size() && !covered; j += 2)
                    covered = weaker(fams_[f].a, na.kids[i], nb.kids[j]) &&
                              weaker(fams_[f].b, na.kids[i + 1], nb.kids[j + 1]);
                if (!covered)
                    return false;
            }
            return true;
        }
        return false;
    }

    FamilyExpr fam_;
    std::uint32_t root_ = 0;
    std::vector<FamNode> fams_;
    std::unordered_map<std::string, std::uint32_t> fam_ids_;
    std::vector<std::unique_ptr<IndexSequence>> seqs_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::uint32_t> node_ids_;
    std::unordered_map<Key3, std::uint32_t, Key3Hash> step_memo_;
    std::unordered_map<Key3, bool, Key3Hash> weaker_memo_;
};

/// Byte encoding used as part of hash keys.
inline void encode(MachineState s, std::string& out) { out.append(reinterpret_cast<const char*>(&s.id), sizeof s.id); }

inline std::string encode(MachineState s)
{
    std::string out;
    encode(s, out);
    return out;
}

} // namespace sdist

#endif // SDIST_FAMILY_MACHINE_HPP
