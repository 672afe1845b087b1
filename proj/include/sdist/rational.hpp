#ifndef SDIST_RATIONAL_HPP
#define SDIST_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdist {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Prints `p/q`, or `p` when the denominator is one.
inline std::string to_string(const Rational& r)
{
    return r.get_str();
}

/// Accepts `p`, `-p`, `p/q`; the result is canonicalized.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal '" + s + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return ::abs(r); }

} // namespace sdist

#endif // SDIST_RATIONAL_HPP
