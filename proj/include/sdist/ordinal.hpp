#ifndef SDIST_ORDINAL_HPP
#define SDIST_ORDINAL_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdist {

/// Countable ordinal below epsilon_0 in Cantor normal form
/// w^e1*c1 + ... + w^ek*ck with e1 > ... > ek and every ck >= 1.
/// The empty term list is 0.
class Ordinal {
public:
    struct Term;

    Ordinal() = default;

    static Ordinal natural(std::uint64_t n);
    static Ordinal omega();
    /// w^e * c
    static Ordinal power(const Ordinal& exponent, std::uint64_t coeff = 1);

    const std::vector<Term>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const;
    bool is_successor() const;
    bool is_limit() const { return !is_zero() && !is_successor(); }
    /// Value of a finite ordinal; throws otherwise.
    std::uint64_t finite_value() const;
    /// a with a + 1 == *this; throws unless successor.
    Ordinal predecessor() const;
    /// Exponent of the leading term; 0 for the zero ordinal.
    Ordinal leading_exponent() const;

private:
    std::vector<Term> terms_;

    friend Ordinal add(const Ordinal& a, const Ordinal& b);
    friend Ordinal mul_natural(const Ordinal& a, std::uint64_t n);
    friend Ordinal fundamental(const Ordinal& limit, std::uint64_t n);
};

struct Ordinal::Term {
    Ordinal exponent;
    std::uint64_t coeff = 1;
};

std::strong_ordering compare(const Ordinal& a, const Ordinal& b);

inline bool operator==(const Ordinal& a, const Ordinal& b) { return compare(a, b) == 0; }
inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) { return compare(a, b); }

inline Ordinal Ordinal::natural(std::uint64_t n)
{
    Ordinal o;
    if (n > 0)
        o.terms_.push_back(Term{Ordinal{}, n});
    return o;
}

inline Ordinal Ordinal::omega() { return power(natural(1)); }

inline Ordinal Ordinal::power(const Ordinal& exponent, std::uint64_t coeff)
{
    Ordinal o;
    if (coeff > 0)
        o.terms_.push_back(Term{exponent, coeff});
    return o;
}

inline bool Ordinal::is_finite() const
{
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline bool Ordinal::is_successor() const
{
    return !terms_.empty() && terms_.back().exponent.is_zero();
}

inline std::uint64_t Ordinal::finite_value() const
{
    if (!is_finite())
        throw std::domain_error("ordinal is not finite");
    return terms_.empty() ? 0 : terms_[0].coeff;
}

inline Ordinal Ordinal::predecessor() const
{
    if (!is_successor())
        throw std::domain_error("predecessor of a non-successor ordinal");
    Ordinal p = *this;
    if (--p.terms_.back().coeff == 0)
        p.terms_.pop_back();
    return p;
}

inline Ordinal Ordinal::leading_exponent() const
{
    return terms_.empty() ? Ordinal{} : terms_.front().exponent;
}

inline std::strong_ordering compare(const Ordinal& a, const Ordinal& b)
{
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    for (std::size_t i = 0; i < ta.size() && i < tb.size(); ++i) {
        if (auto c = compare(ta[i].exponent, tb[i].exponent); c != 0)
            return c;
        if (ta[i].coeff != tb[i].coeff)
            return ta[i].coeff <=> tb[i].coeff;
    }
    return ta.size() <=> tb.size();
}

inline Ordinal add(const Ordinal& a, const Ordinal& b)
{
    if (b.is_zero())
        return a;
    const Ordinal& lead = b.terms_.front().exponent;
    Ordinal r;
    // terms of a below the leading exponent of b are absorbed
    for (const auto& t : a.terms_) {
        auto c = compare(t.exponent, lead);
        if (c > 0) {
            r.terms_.push_back(t);
        } else {
            if (c == 0) {
                r.terms_.push_back(Ordinal::Term{t.exponent, t.coeff + b.terms_.front().coeff});
                r.terms_.insert(r.terms_.end(), b.terms_.begin() + 1, b.terms_.end());
                return r;
            }
            break;
        }
    }
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    return r;
}

/// Right multiplication by a natural: a*n.
inline Ordinal mul_natural(const Ordinal& a, std::uint64_t n)
{
    if (n == 0 || a.is_zero())
        return Ordinal{};
    Ordinal r = a;
    r.terms_.front().coeff *= n;
    return r;
}

/// Canonical fundamental sequence:
///   (g + w^(b+1))[n] = g + w^b * n
///   (g + w^l)[n]     = g + w^(l[n])   for limit l
inline Ordinal fundamental(const Ordinal& limit, std::uint64_t n)
{
    if (!limit.is_limit())
        throw std::domain_error("fundamental sequence requested for a non-limit ordinal");
    if (n == 0)
        throw std::domain_error("fundamental sequence index must be positive");
    Ordinal prefix = limit;
    Ordinal::Term last = prefix.terms_.back();
    if (--prefix.terms_.back().coeff == 0)
        prefix.terms_.pop_back();
    if (last.exponent.is_successor())
        return add(prefix, Ordinal::power(last.exponent.predecessor(), n));
    return add(prefix, Ordinal::power(fundamental(last.exponent, n)));
}

/// Canonical text in the literal grammar, e.g. `w^2*3+w+7`.
inline std::string to_string(const Ordinal& a)
{
    if (a.is_zero())
        return "0";
    std::string out;
    for (const auto& t : a.terms()) {
        if (!out.empty())
            out += '+';
        if (t.exponent.is_zero()) {
            out += std::to_string(t.coeff);
            continue;
        }
        out += 'w';
        if (!(t.exponent == Ordinal::natural(1))) {
            out += '^';
            std::string e = to_string(t.exponent);
            if (t.exponent.is_finite() || e == "w")
                out += e;
            else
                out += '(' + e + ')';
        }
        if (t.coeff != 1)
            out += '*' + std::to_string(t.coeff);
    }
    return out;
}

struct OrdinalLess {
    bool operator()(const Ordinal& a, const Ordinal& b) const { return compare(a, b) < 0; }
};

} // namespace sdist

#endif // SDIST_ORDINAL_HPP
