#ifndef SDIST_VECFUN_HPP
#define SDIST_VECFUN_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "families.hpp"
#include "finset.hpp"
#include "ordinal.hpp"
#include "rational.hpp"

namespace sdist {

// ---------------------------------------------------------------------------
// vectors
// ---------------------------------------------------------------------------

/// Finitely supported sequence with exact rational entries; zero entries
/// are never stored.
class Vector {
public:
    using Entry = std::pair<Index, Rational>;

    Vector() = default;

    /// Coordinates must be strictly increasing and >= 1; zeros are dropped.
    explicit Vector(std::vector<Entry> entries)
    {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].first == 0)
                throw std::invalid_argument("vector coordinates start at 1");
            if (i > 0 && entries[i - 1].first >= entries[i].first)
                throw std::invalid_argument("vector coordinates must be strictly increasing");
        }
        for (auto& e : entries)
            if (e.second != 0)
                entries_.push_back(std::move(e));
    }

    static Vector from_map(const std::map<Index, Rational>& m) { return Vector(std::vector<Entry>(m.begin(), m.end())); }

    static Vector unit(Index n, Rational value = 1) { return Vector({{n, std::move(value)}}); }

    /// value on every coordinate of e
    static Vector flat(const FinSet& e, const Rational& value)
    {
        std::vector<Entry> v;
        for (Index i : e)
            v.emplace_back(i, value);
        return Vector(std::move(v));
    }

    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    Rational operator[](Index n) const
    {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const Entry& e, Index k) { return e.first < k; });
        return it != entries_.end() && it->first == n ? it->second : Rational(0);
    }

    FinSet support() const
    {
        std::vector<Index> s;
        s.reserve(entries_.size());
        for (const auto& e : entries_)
            s.push_back(e.first);
        return FinSet(std::move(s));
    }
    Index min_support() const { return entries_.empty() ? kOmegaIndex : entries_.front().first; }
    Index max_support() const { return entries_.empty() ? 0 : entries_.back().first; }

    /// Restriction to the coordinates in [lo, hi].
    Vector restrict(Index lo, Index hi) const
    {
        Vector r;
        for (const auto& e : entries_)
            if (e.first >= lo && e.first <= hi)
                r.entries_.push_back(e);
        return r;
    }

    Vector restrict(const FinSet& s) const
    {
        Vector r;
        for (const auto& e : entries_)
            if (s.contains(e.first))
                r.entries_.push_back(e);
        return r;
    }

    Vector abs() const
    {
        Vector r = *this;
        for (auto& e : r.entries_)
            e.second = sdist::abs(e.second);
        return r;
    }

    Rational linf() const
    {
        Rational m = 0;
        for (const auto& e : entries_)
            m = std::max(m, Rational(sdist::abs(e.second)));
        return m;
    }

    Rational l1() const
    {
        Rational s = 0;
        for (const auto& e : entries_)
            s += sdist::abs(e.second);
        return s;
    }

    Vector& operator*=(const Rational& c)
    {
        if (c == 0) {
            entries_.clear();
            return *this;
        }
        for (auto& e : entries_)
            e.second *= c;
        return *this;
    }

    friend Vector operator*(const Rational& c, Vector v) { return v *= c; }
    friend Vector operator*(Vector v, const Rational& c) { return v *= c; }

    friend Vector operator+(const Vector& a, const Vector& b)
    {
        std::map<Index, Rational> m(a.entries_.begin(), a.entries_.end());
        for (const auto& [i, v] : b.entries_)
            m[i] += v;
        return from_map(m);
    }
    friend Vector operator-(const Vector& a, const Vector& b) { return a + Rational(-1) * b; }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<Entry> entries_;
};

/// `coord:value` pairs, comma separated, values as `p/q`.
inline std::string to_string(const Vector& x)
{
    std::string out;
    for (const auto& [i, v] : x) {
        if (!out.empty())
            out += ',';
        out += std::to_string(i) + ':' + to_string(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// block sequences
// ---------------------------------------------------------------------------

/// Successive vectors x_1 < x_2 < ...; origin(i) records which blocks of
/// an underlying sequence were combined into x_i.
class BlockSequence {
public:
    BlockSequence() = default;

    explicit BlockSequence(std::vector<Vector> blocks) : blocks_(std::move(blocks))
    {
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            origins_.push_back(FinSet{Index(i + 1)});
        check();
    }

    BlockSequence(std::vector<Vector> blocks, std::vector<FinSet> origins)
        : blocks_(std::move(blocks)), origins_(std::move(origins))
    {
        if (origins_.size() != blocks_.size())
            throw std::invalid_argument("one origin set per block required");
        check();
    }

    /// e_first, e_{first+1}, ..., count vectors.
    static BlockSequence unit_vectors(Index count, Index first = 1)
    {
        std::vector<Vector> v;
        for (Index i = 0; i < count; ++i)
            v.push_back(Vector::unit(first + i));
        return BlockSequence(std::move(v));
    }

    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    const std::vector<Vector>& blocks() const { return blocks_; }
    const std::vector<FinSet>& origins() const { return origins_; }
    /// 1-based
    const Vector& at(std::size_t i) const { return blocks_.at(i - 1); }
    const FinSet& origin(std::size_t i) const { return origins_.at(i - 1); }

    /// min supp x_i for every block.
    std::vector<Index> minima() const
    {
        std::vector<Index> m;
        for (const auto& b : blocks_)
            m.push_back(b.min_support());
        return m;
    }

    /// sum_{i in E} a_i x_i
    Vector combine(const FinSet& e, const std::vector<Rational>& a) const
    {
        if (a.size() != e.size())
            throw std::invalid_argument("coefficient count does not match index set");
        std::vector<Vector::Entry> out;
        std::size_t k = 0;
        for (Index i : e) {
            if (i == 0 || i > blocks_.size())
                throw std::out_of_range("block index " + std::to_string(i) + " out of range");
            for (const auto& [c, v] : blocks_[i - 1])
                out.emplace_back(c, v * a[k]);
            ++k;
        }
        return Vector(std::move(out));
    }

private:
    void check() const
    {
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            if (blocks_[i].empty())
                throw std::invalid_argument("block " + std::to_string(i + 1) + " is zero");
            if (i > 0 && blocks_[i - 1].max_support() >= blocks_[i].min_support())
                throw std::invalid_argument("blocks " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                            " are not successive");
        }
    }

    std::vector<Vector> blocks_;
    std::vector<FinSet> origins_;
};

struct BlockGroup {
    FinSet indices;
    std::vector<Rational> coeffs;
};

/// y_i = sum_{j in E_i} a_j x_j. The origin of y_i is the union of the
/// origins of the x_j used, so composing blockings composes bookkeeping.
inline BlockSequence block_combine(const BlockSequence& bs, const std::vector<BlockGroup>& groups)
{
    std::vector<Vector> out;
    std::vector<FinSet> origins;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& grp = groups[g];
        if (grp.indices.empty())
            throw std::invalid_argument("group " + std::to_string(g + 1) + " is empty");
        if (g > 0 && !(groups[g - 1].indices.max() < grp.indices.min()))
            throw std::invalid_argument("groups " + std::to_string(g) + " and " + std::to_string(g + 1) +
                                        " are not successive");
        Vector y = bs.combine(grp.indices, grp.coeffs);
        if (y.empty())
            throw std::invalid_argument("group " + std::to_string(g + 1) + " combines to zero");
        FinSet o;
        for (Index j : grp.indices)
            o = o.union_with(bs.origin(j));
        out.push_back(std::move(y));
        origins.push_back(std::move(o));
    }
    return BlockSequence(std::move(out), std::move(origins));
}

// ---------------------------------------------------------------------------
// functionals of the norming set
// ---------------------------------------------------------------------------

/// Tree-shaped functional: +-e_n^*, an average (1/l) sum f_q with declared
/// size l, or a Schreier node sum alpha_q of averages.
class Functional {
public:
    enum class Kind { Unit, Average, Schreier };

    static Functional unit(int sign, Index coord)
    {
        Node n;
        n.kind = Kind::Unit;
        n.sign = sign;
        n.coord = coord;
        n.min_supp = n.max_supp = coord;
        return Functional(std::make_shared<const Node>(std::move(n)));
    }

    static Functional average(std::uint64_t size, std::vector<Functional> children)
    {
        return composite(Kind::Average, size, std::move(children));
    }

    static Functional schreier(std::vector<Functional> children)
    {
        return composite(Kind::Schreier, 0, std::move(children));
    }

    Kind kind() const { return node_->kind; }
    int sign() const { return node_->sign; }
    Index coord() const { return node_->coord; }
    /// declared size s(alpha) of an average
    std::uint64_t size() const { return node_->size; }
    const std::vector<Functional>& children() const { return node_->children; }
    Index min_support() const { return node_->min_supp; }
    Index max_support() const { return node_->max_supp; }
    /// least m with the functional in W_m
    std::size_t level() const { return node_->level; }

    FinSet support() const
    {
        std::vector<Index> out;
        collect(out);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return FinSet(std::move(out));
    }

    /// Generic evaluation; value(n) returns the coordinate n of the vector.
    template <class Scalar, class Lookup>
    Scalar apply(const Lookup& value) const
    {
        switch (kind()) {
        case Kind::Unit:
            return sign() > 0 ? Scalar(value(coord())) : Scalar(-value(coord()));
        case Kind::Average:
        case Kind::Schreier: {
            Scalar s = 0;
            for (const auto& c : children())
                s += c.template apply<Scalar>(value);
            if (kind() == Kind::Average)
                s /= Scalar(static_cast<long>(size()));
            return s;
        }
        }
        return Scalar(0);
    }

    friend bool operator==(const Functional& a, const Functional& b)
    {
        if (a.node_ == b.node_)
            return true;
        if (a.kind() != b.kind() || a.sign() != b.sign() || a.coord() != b.coord() || a.size() != b.size())
            return false;
        return a.children() == b.children();
    }

private:
    struct Node {
        Kind kind = Kind::Unit;
        int sign = 1;
        Index coord = 0;
        std::uint64_t size = 0;
        std::vector<Functional> children;
        Index min_supp = kOmegaIndex;
        Index max_supp = 0;
        std::size_t level = 0;
    };

    explicit Functional(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Functional composite(Kind k, std::uint64_t size, std::vector<Functional> children)
    {
        Node n;
        n.kind = k;
        n.size = size;
        for (const auto& c : children) {
            n.min_supp = std::min(n.min_supp, c.min_support());
            n.max_supp = std::max(n.max_supp, c.max_support());
            n.level = std::max(n.level, c.level() + 1);
        }
        if (children.empty())
            n.level = 1;
        n.children = std::move(children);
        return Functional(std::make_shared<const Node>(std::move(n)));
    }

    void collect(std::vector<Index>& out) const
    {
        if (kind() == Kind::Unit) {
            out.push_back(coord());
            return;
        }
        for (const auto& c : children())
            c.collect(out);
    }

    std::shared_ptr<const Node> node_;
};

/// f(x), exact.
inline Rational evaluate(const Functional& f, const Vector& x)
{
    return f.apply<Rational>([&](Index n) { return x[n]; });
}

/// f(x) for a dense vector indexed by coordinate (index 0 unused).
template <class Scalar>
Scalar evaluate_dense(const Functional& f, const std::vector<Scalar>& x)
{
    return f.apply<Scalar>([&](Index n) { return n < x.size() ? x[n] : Scalar(0); });
}

/// Nested text: `(U +3)`, `(AVG(2) (U +1) (U +2))`, `(SCH (AVG(2) ...) ...)`.
inline std::string to_string(const Functional& f)
{
    switch (f.kind()) {
    case Functional::Kind::Unit:
        return std::string("(U ") + (f.sign() > 0 ? "+" : "-") + std::to_string(f.coord()) + ")";
    case Functional::Kind::Average:
    case Functional::Kind::Schreier: {
        std::string out = f.kind() == Functional::Kind::Average ? "(AVG(" + std::to_string(f.size()) + ")" : "(SCH";
        for (const auto& c : f.children())
            out += ' ' + to_string(c);
        return out + ")";
    }
    }
    return {};
}

// ---------------------------------------------------------------------------
// validity
// ---------------------------------------------------------------------------

struct ValidationReport {
    bool valid = true;
    std::string violation;
    /// offending functional, printed
    std::string where;
    /// minimal-support set that fails admissibility
    std::optional<FinSet> family_counterexample;
};

namespace detail {

inline bool successive_children(const std::vector<Functional>& cs)
{
    for (std::size_t i = 1; i < cs.size(); ++i)
        if (!(cs[i - 1].max_support() < cs[i].min_support()))
            return false;
    return true;
}

inline ValidationReport fail(std::string why, const Functional& f)
{
    return ValidationReport{false, std::move(why), to_string(f), std::nullopt};
}

inline ValidationReport validate(const Functional& f, const FamilyExpr& admissible, MembershipSession& session)
{
    switch (f.kind()) {
    case Functional::Kind::Unit:
        if (f.sign() != 1 && f.sign() != -1)
            return fail("unit sign must be +1 or -1", f);
        if (f.coord() == 0)
            return fail("unit coordinate must be >= 1", f);
        return {};
    case Functional::Kind::Average:
        if (f.size() < 2)
            return fail("average size must be at least 2", f);
        if (f.children().empty())
            return fail("average has no children", f);
        if (f.children().size() > f.size())
            return fail("average has more children than its size", f);
        if (!successive_children(f.children()))
            return fail("children supports not successive", f);
        break;
    case Functional::Kind::Schreier: {
        const auto& cs = f.children();
        if (cs.empty())
            return fail("schreier node has no children", f);
        if (!successive_children(cs))
            return fail("children supports not successive", f);
        std::vector<Index> minima;
        for (std::size_t q = 0; q < cs.size(); ++q) {
            if (cs[q].kind() != Functional::Kind::Average)
                return fail("schreier node child is not an average", f);
            if (q > 0 && !(cs[q - 1].size() < cs[q].size()))
                return fail("sizes not strictly increasing", f);
            if (q > 0 && !(cs[q].size() > cs[q - 1].max_support()))
                return fail("size does not exceed previous maximum support", f);
            minima.push_back(cs[q].min_support());
        }
        FinSet m(minima);
        if (!session.contains(m, admissible)) {
            ValidationReport r = fail("minimal supports not " + to_string(admissible) + "-admissible", f);
            r.family_counterexample = m;
            return r;
        }
        break;
    }
    }
    for (const auto& c : f.children()) {
        ValidationReport r = validate(c, admissible, session);
        if (!r.valid)
            return r;
    }
    return {};
}

} // namespace detail

/// Checks every invariant of the norming set W for X^{w^xi}: average sizes,
/// successive children, very fast growth and S_{w^xi}-admissibility.
inline ValidationReport validate_functional(const Functional& f, const Ordinal& xi)
{
    MembershipSession session;
    return detail::validate(f, FamilyExpr::schreier(Ordinal::power(xi)), session);
}

} // namespace sdist

#endif // SDIST_VECFUN_HPP
