#ifndef SDIST_FINSET_HPP
#define SDIST_FINSET_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdist {

using Index = std::uint32_t;

/// min of the empty set, read as w.
inline constexpr Index kOmegaIndex = std::numeric_limits<Index>::max();

/// Strictly increasing finite set of naturals >= 1.
class FinSet {
public:
    FinSet() = default;
    FinSet(std::initializer_list<Index> xs) : FinSet(std::vector<Index>(xs)) {}
    explicit FinSet(std::vector<Index> xs) : elems_(std::move(xs))
    {
        for (std::size_t i = 0; i < elems_.size(); ++i) {
            if (elems_[i] == 0)
                throw std::invalid_argument("FinSet elements must be >= 1");
            if (i > 0 && elems_[i - 1] >= elems_[i])
                throw std::invalid_argument("FinSet elements must be strictly increasing");
        }
    }

    /// [a, b]; empty when a > b.
    static FinSet interval(Index a, Index b)
    {
        FinSet s;
        for (Index i = a; i <= b && a <= b; ++i)
            s.elems_.push_back(i);
        return s;
    }

    const std::vector<Index>& elements() const { return elems_; }
    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    Index min() const { return elems_.empty() ? kOmegaIndex : elems_.front(); }
    Index max() const { return elems_.empty() ? 0 : elems_.back(); }
    Index operator[](std::size_t i) const { return elems_[i]; }
    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

    bool contains(Index x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

    /// Appends x > max().
    void push_back(Index x)
    {
        if (x == 0 || (!elems_.empty() && x <= elems_.back()))
            throw std::invalid_argument("FinSet::push_back must keep the set increasing");
        elems_.push_back(x);
    }
    void pop_back() { elems_.pop_back(); }

    FinSet union_with(const FinSet& other) const
    {
        std::vector<Index> out;
        std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                       std::back_inserter(out));
        return FinSet(std::move(out));
    }

    bool subset_of(const FinSet& other) const
    {
        return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
    }

    friend bool operator==(const FinSet&, const FinSet&) = default;
    friend auto operator<=>(const FinSet&, const FinSet&) = default;

private:
    std::vector<Index> elems_;
};

/// E < F  iff  max E < min F (vacuous for empty sets).
inline bool successive(const FinSet& e, const FinSet& f)
{
    return e.empty() || f.empty() || e.max() < f.min();
}

/// True iff b is a spread of a: equal length and a_i <= b_i pointwise.
inline bool spread_of(const FinSet& a, const FinSet& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("spread_of requires sets of equal length");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i])
            return false;
    return true;
}

inline std::string to_string(const FinSet& s)
{
    std::string out;
    for (Index x : s) {
        if (!out.empty())
            out += ',';
        out += std::to_string(x);
    }
    return out;
}

/// Strictly increasing infinite sequence of naturals M = (m_1, m_2, ...).
/// Either a finite table that errors past its end, an arithmetic progression,
/// or a table followed by an arithmetic tail.
class IndexSequence {
public:
    enum class Kind { ExplicitPrefix, Arithmetic, TableExtended };

    static IndexSequence explicit_prefix(std::vector<Index> table)
    {
        IndexSequence s(Kind::ExplicitPrefix, std::move(table), 0, 0);
        return s;
    }
    static IndexSequence arithmetic(Index start, Index step)
    {
        return IndexSequence(Kind::Arithmetic, {}, start, step);
    }
    /// Table followed by tail_start, tail_start + step, ...
    static IndexSequence table_extended(std::vector<Index> table, Index tail_start, Index step)
    {
        return IndexSequence(Kind::TableExtended, std::move(table), tail_start, step);
    }
    static IndexSequence naturals() { return arithmetic(1, 1); }
    static IndexSequence evens() { return arithmetic(2, 2); }

    Kind kind() const { return kind_; }
    const std::vector<Index>& table() const { return table_; }
    Index start() const { return start_; }
    Index step() const { return step_; }

    /// m_i for i >= 1.
    Index at(std::size_t i) const
    {
        if (i == 0)
            throw std::out_of_range("IndexSequence positions start at 1");
        if (i <= table_.size())
            return table_[i - 1];
        if (kind_ == Kind::ExplicitPrefix)
            throw std::out_of_range("explicit-prefix sequence exhausted at position " + std::to_string(i));
        std::uint64_t v = std::uint64_t(start_) + std::uint64_t(step_) * (i - table_.size() - 1);
        if (v >= kOmegaIndex)
            throw std::out_of_range("sequence value overflow");
        return Index(v);
    }

    /// Number of positions available without error; nullopt for infinite sequences.
    std::optional<std::size_t> length() const
    {
        if (kind_ == Kind::ExplicitPrefix)
            return table_.size();
        return std::nullopt;
    }

    /// i with m_i == v, if any.
    std::optional<std::size_t> position_of(Index v) const
    {
        auto it = std::lower_bound(table_.begin(), table_.end(), v);
        if (it != table_.end())
            return *it == v ? std::optional<std::size_t>(std::size_t(it - table_.begin()) + 1) : std::nullopt;
        if (kind_ == Kind::ExplicitPrefix || v < start_)
            return std::nullopt;
        if ((v - start_) % step_ != 0)
            return std::nullopt;
        return table_.size() + 1 + (v - start_) / step_;
    }

    /// M(E) = (m_i : i in E)
    FinSet apply(const FinSet& e) const
    {
        std::vector<Index> out;
        out.reserve(e.size());
        for (Index i : e)
            out.push_back(at(i));
        return FinSet(std::move(out));
    }

    /// Values m_i <= bound, in order.
    std::vector<Index> values_up_to(Index bound) const
    {
        std::vector<Index> out;
        for (std::size_t i = 1;; ++i) {
            if (auto n = length(); n && i > *n)
                break;
            Index v = at(i);
            if (v > bound)
                break;
            out.push_back(v);
        }
        return out;
    }

    /// The subsequence of terms >= lower_bound.
    IndexSequence tail_from(Index lower_bound) const
    {
        std::vector<Index> tab;
        for (Index v : table_)
            if (v >= lower_bound)
                tab.push_back(v);
        if (kind_ == Kind::ExplicitPrefix)
            return explicit_prefix(std::move(tab));
        Index s = start_;
        if (s < lower_bound)
            s += step_ * ((lower_bound - s + step_ - 1) / step_);
        if (tab.empty())
            return arithmetic(s, step_);
        return table_extended(std::move(tab), s, step_);
    }

    friend bool operator==(const IndexSequence&, const IndexSequence&) = default;

private:
    IndexSequence(Kind k, std::vector<Index> table, Index start, Index step)
        : kind_(k), table_(std::move(table)), start_(start), step_(step)
    {
        for (std::size_t i = 1; i < table_.size(); ++i)
            if (table_[i - 1] >= table_[i])
                throw std::invalid_argument("index sequence table must be strictly increasing");
        if (!table_.empty() && table_.front() == 0)
            throw std::invalid_argument("index sequence values must be >= 1");
        if (k != Kind::ExplicitPrefix) {
            if (step_ == 0 || start_ == 0)
                throw std::invalid_argument("arithmetic tail needs start >= 1 and step >= 1");
            if (!table_.empty() && table_.back() >= start_)
                throw std::invalid_argument("arithmetic tail must start above the table");
        }
    }

    Kind kind_;
    std::vector<Index> table_;
    Index start_;
    Index step_;
};

/// Grammar text: `[n1,n2,...]`, `arith(a,d)`, `even`, or `[n1,...]+arith(a,d)`.
inline std::string to_string(const IndexSequence& m)
{
    auto table = [&] {
        std::string s = "[";
        for (std::size_t i = 0; i < m.table().size(); ++i)
            s += (i ? "," : "") + std::to_string(m.table()[i]);
        return s + "]";
    };
    switch (m.kind()) {
    case IndexSequence::Kind::ExplicitPrefix:
        return table();
    case IndexSequence::Kind::Arithmetic:
        if (m.start() == 2 && m.step() == 2)
            return "even";
        return "arith(" + std::to_string(m.start()) + "," + std::to_string(m.step()) + ")";
    case IndexSequence::Kind::TableExtended:
        return table() + "+arith(" + std::to_string(m.start()) + "," + std::to_string(m.step()) + ")";
    }
    return {};
}

} // namespace sdist

#endif // SDIST_FINSET_HPP
