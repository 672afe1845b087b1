#ifndef SDIST_FAMILY_EXPR_HPP
#define SDIST_FAMILY_EXPR_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "finset.hpp"
#include "ordinal.hpp"

namespace sdist {

/// Algebraic descriptor of a regular family of finite sets:
/// S(xi), A(n), F[G] and F(M).
class FamilyExpr {
public:
    enum class Kind { Schreier, Cardinality, Bracket, Relabel };

    static FamilyExpr schreier(Ordinal xi) { return FamilyExpr(Node{Kind::Schreier, std::move(xi), 0, {}, {}, {}}); }
    static FamilyExpr schreier(std::uint64_t n) { return schreier(Ordinal::natural(n)); }
    static FamilyExpr cardinality(std::uint64_t n) { return FamilyExpr(Node{Kind::Cardinality, {}, n, {}, {}, {}}); }
    static FamilyExpr bracket(const FamilyExpr& outer, const FamilyExpr& inner)
    {
        return FamilyExpr(Node{Kind::Bracket, {}, 0, outer.node_, inner.node_, {}});
    }
    static FamilyExpr relabel(const FamilyExpr& fam, IndexSequence m)
    {
        return FamilyExpr(Node{Kind::Relabel, {}, 0, fam.node_, {}, std::make_shared<IndexSequence>(std::move(m))});
    }

    Kind kind() const { return node_->kind; }
    const Ordinal& order() const { return node_->order; }
    std::uint64_t bound() const { return node_->bound; }
    /// F in F[G], or the relabeled family in F(M).
    FamilyExpr outer() const { return FamilyExpr(node_->left); }
    /// G in F[G].
    FamilyExpr inner() const { return FamilyExpr(node_->right); }
    const IndexSequence& sequence() const { return *node_->seq; }

    /// Closed under subsets. Bracket needs a spreading outer family for this.
    bool hereditary() const
    {
        switch (kind()) {
        case Kind::Schreier:
        case Kind::Cardinality:
            return true;
        case Kind::Relabel:
            return outer().hereditary();
        case Kind::Bracket:
            return outer().hereditary() && outer().spreading() && inner().hereditary();
        }
        return false;
    }

    /// Closed under spreads (conservative: relabelings are reported as not spreading).
    bool spreading() const
    {
        switch (kind()) {
        case Kind::Schreier:
        case Kind::Cardinality:
            return true;
        case Kind::Relabel:
            return false;
        case Kind::Bracket:
            return outer().spreading() && inner().spreading();
        }
        return false;
    }

    /// Stable identity for memo keys.
    std::string key() const
    {
        switch (kind()) {
        case Kind::Schreier:
            return "S(" + to_string(order()) + ")";
        case Kind::Cardinality:
            return "A(" + std::to_string(bound()) + ")";
        case Kind::Bracket:
            return outer().key() + "[" + inner().key() + "]";
        case Kind::Relabel:
            return outer().key() + "(" + to_string(sequence()) + ")";
        }
        return {};
    }

private:
    struct Node {
        Kind kind;
        Ordinal order;
        std::uint64_t bound;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
        std::shared_ptr<const IndexSequence> seq;
    };

    explicit FamilyExpr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
    explicit FamilyExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
};

/// Printer for the family grammar: `S(w)[A(2)](even)`.
inline std::string to_string(const FamilyExpr& f)
{
    switch (f.kind()) {
    case FamilyExpr::Kind::Schreier:
        return "S(" + to_string(f.order()) + ")";
    case FamilyExpr::Kind::Cardinality:
        return "A(" + std::to_string(f.bound()) + ")";
    case FamilyExpr::Kind::Bracket:
        return to_string(f.outer()) + "[" + to_string(f.inner()) + "]";
    case FamilyExpr::Kind::Relabel:
        return to_string(f.outer()) + "(" + to_string(f.sequence()) + ")";
    }
    return {};
}

inline bool operator==(const FamilyExpr& a, const FamilyExpr& b) { return a.key() == b.key(); }

} // namespace sdist

#endif // SDIST_FAMILY_EXPR_HPP
