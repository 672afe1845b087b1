#ifndef SDIST_PARSE_HPP
#define SDIST_PARSE_HPP

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "family_expr.hpp"
#include "finset.hpp"
#include "norms.hpp"
#include "ordinal.hpp"
#include "rational.hpp"
#include "vecfun.hpp"

namespace sdist {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("syntax error at byte " + std::to_string(offset) + ": " + what), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

class Cursor {
public:
    explicit Cursor(std::string_view text) : s_(text) {}

    std::size_t pos() const { return p_; }
    void skip()
    {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_])))
            ++p_;
    }
    bool done()
    {
        skip();
        return p_ == s_.size();
    }
    char peek()
    {
        skip();
        return p_ < s_.size() ? s_[p_] : '\0';
    }
    bool accept(std::string_view tok)
    {
        skip();
        if (s_.substr(p_, tok.size()) != tok)
            return false;
        p_ += tok.size();
        return true;
    }
    void expect(std::string_view tok)
    {
        if (!accept(tok))
            fail("expected '" + std::string(tok) + "'");
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(p_, what); }
    void finish()
    {
        if (!done())
            fail("unexpected trailing input");
    }

    std::uint64_t natural()
    {
        skip();
        std::size_t start = p_;
        std::uint64_t v = 0;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) {
            std::uint64_t d = std::uint64_t(s_[p_] - '0');
            if (v > (UINT64_MAX - d) / 10)
                throw ParseError(start, "number too large");
            v = v * 10 + d;
            ++p_;
        }
        if (p_ == start)
            fail("expected a natural number");
        return v;
    }

    Rational rational()
    {
        bool neg = accept("-");
        skip();
        std::size_t digits = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_])))
            ++p_;
        if (p_ == digits)
            fail("expected a rational");
        mpz_class num(std::string(s_.substr(digits, p_ - digits)));
        mpz_class den = 1;
        if (p_ < s_.size() && s_[p_] == '/') {
            std::size_t d0 = ++p_;
            while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_])))
                ++p_;
            if (p_ == d0)
                fail("expected a denominator");
            den = mpz_class(std::string(s_.substr(d0, p_ - d0)));
            if (den == 0)
                throw ParseError(d0, "zero denominator");
        }
        Rational r(neg ? mpz_class(-num) : num, den);
        r.canonicalize();
        return r;
    }

    double real()
    {
        skip();
        std::string tmp(s_.substr(p_));
        char* end = nullptr;
        double v = std::strtod(tmp.c_str(), &end);
        if (end == tmp.c_str())
            fail("expected a number");
        p_ += std::size_t(end - tmp.c_str());
        return v;
    }

private:
    std::string_view s_;
    std::size_t p_ = 0;
};

inline Ordinal ordinal_expr(Cursor& c);

inline Ordinal ordinal_exponent(Cursor& c)
{
    if (c.accept("("))
    {
        Ordinal e = ordinal_expr(c);
        c.expect(")");
        return e;
    }
    if (c.accept("w"))
        return Ordinal::omega();
    return Ordinal::natural(c.natural());
}

inline Ordinal ordinal_term(Cursor& c)
{
    Ordinal base;
    if (c.accept("(")) {
        base = ordinal_expr(c);
        c.expect(")");
    } else if (c.accept("w")) {
        Ordinal e = Ordinal::natural(1);
        if (c.accept("^"))
            e = ordinal_exponent(c);
        base = Ordinal::power(e);
    } else if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        base = Ordinal::natural(c.natural());
    } else {
        c.fail("expected an ordinal term");
    }
    while (c.accept("*"))
        base = mul_natural(base, c.natural());
    return base;
}

inline Ordinal ordinal_expr(Cursor& c)
{
    Ordinal a = ordinal_term(c);
    while (c.accept("+"))
        a = add(a, ordinal_term(c));
    return a;
}

inline std::vector<Index> index_list(Cursor& c, char close)
{
    std::vector<Index> out;
    if (c.peek() == close)
        return out;
    do
        out.push_back(Index(c.natural()));
    while (c.accept(","));
    return out;
}

inline IndexSequence sequence_expr(Cursor& c)
{
    if (c.accept("even"))
        return IndexSequence::evens();
    auto arith = [&](Index& a, Index& d) {
        c.expect("(");
        a = Index(c.natural());
        c.expect(",");
        d = Index(c.natural());
        c.expect(")");
        if (a == 0 || d == 0)
            c.fail("arith needs positive start and step");
    };
    if (c.accept("arith")) {
        Index a, d;
        arith(a, d);
        return IndexSequence::arithmetic(a, d);
    }
    if (c.accept("[")) {
        std::vector<Index> t = index_list(c, ']');
        c.expect("]");
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] == 0 || (i > 0 && !(t[i - 1] < t[i])))
                c.fail("table must be strictly increasing positive integers");
        if (c.accept("+")) {
            c.expect("arith");
            Index a, d;
            arith(a, d);
            return IndexSequence::table_extended(std::move(t), a, d);
        }
        return IndexSequence::explicit_prefix(std::move(t));
    }
    c.fail("expected a sequence");
}

inline FamilyExpr family_expr(Cursor& c)
{
    FamilyExpr f = FamilyExpr::cardinality(0);
    if (c.accept("S(")) {
        f = FamilyExpr::schreier(ordinal_expr(c));
        c.expect(")");
    } else if (c.accept("A(")) {
        f = FamilyExpr::cardinality(c.natural());
        c.expect(")");
    } else if (c.accept("(")) {
        f = family_expr(c);
        c.expect(")");
    } else {
        c.fail("expected S(..), A(..) or (..)");
    }
    while (true) {
        if (c.accept("[")) {
            FamilyExpr inner = family_expr(c);
            c.expect("]");
            f = FamilyExpr::bracket(f, inner);
        } else if (c.accept("(")) {
            IndexSequence m = sequence_expr(c);
            c.expect(")");
            f = FamilyExpr::relabel(f, std::move(m));
        } else {
            return f;
        }
    }
}

inline Functional functional_expr(Cursor& c)
{
    std::size_t at = c.pos();
    c.expect("(");
    if (c.accept("U")) {
        int sign = c.accept("+") ? 1 : c.accept("-") ? -1 : 0;
        if (sign == 0)
            c.fail("expected '+' or '-'");
        Index coord = Index(c.natural());
        c.expect(")");
        if (coord == 0)
            throw ParseError(at, "coordinates start at 1");
        return Functional::unit(sign, coord);
    }
    bool avg = c.accept("AVG(");
    std::uint64_t size = 0;
    if (avg) {
        size = c.natural();
        c.expect(")");
    } else if (!c.accept("SCH")) {
        c.fail("expected U, AVG or SCH");
    }
    std::vector<Functional> kids;
    while (c.peek() == '(')
        kids.push_back(functional_expr(c));
    c.expect(")");
    try {
        return avg ? Functional::average(size, std::move(kids)) : Functional::schreier(std::move(kids));
    } catch (const std::exception& e) {
        throw ParseError(at, e.what());
    }
}

} // namespace detail

/// `w^2*3+w+7`, `w^(w+1)`, `(w+1)*2`; forms outside normal form are normalized.
inline Ordinal parse_ordinal(std::string_view text)
{
    detail::Cursor c(text);
    Ordinal a = detail::ordinal_expr(c);
    c.finish();
    return a;
}

/// `S(<ordinal>)`, `A(n)`, `F[G]`, `F(<sequence>)`, parentheses.
inline FamilyExpr parse_family(std::string_view text)
{
    detail::Cursor c(text);
    FamilyExpr f = detail::family_expr(c);
    c.finish();
    return f;
}

/// `even`, `arith(a,d)`, `[n1,...]`, `[n1,...]+arith(a,d)`.
inline IndexSequence parse_sequence(std::string_view text)
{
    detail::Cursor c(text);
    IndexSequence m = detail::sequence_expr(c);
    c.finish();
    return m;
}

/// `n1,n2,...` or `{n1,...}`, strictly increasing; `a..b` for an interval.
inline FinSet parse_set(std::string_view text)
{
    detail::Cursor c(text);
    bool brace = c.accept("{");
    std::vector<Index> v;
    if (!c.done() && c.peek() != '}') {
        Index a = Index(c.natural());
        if (c.accept("..")) {
            Index b = Index(c.natural());
            if (a == 0 || b < a)
                c.fail("bad interval");
            for (Index i = a; i <= b; ++i)
                v.push_back(i);
        } else {
            v.push_back(a);
            while (c.accept(",")) {
                std::size_t at = c.pos();
                Index x = Index(c.natural());
                if (!(v.back() < x))
                    throw ParseError(at, "set must be strictly increasing");
                v.push_back(x);
            }
        }
        if (v.front() == 0)
            c.fail("elements start at 1");
    }
    if (brace)
        c.expect("}");
    c.finish();
    return FinSet(std::move(v));
}

/// `coord:value,...` with values `p/q`; empty text or `0` is the zero vector.
inline Vector parse_vector(std::string_view text)
{
    detail::Cursor c(text);
    std::map<Index, Rational> m;
    if (c.done())
        return Vector();
    if (c.accept("0") && c.done())
        return Vector();
    c = detail::Cursor(text);
    do {
        std::size_t at = c.pos();
        Index i = Index(c.natural());
        if (i == 0)
            throw ParseError(at, "coordinates start at 1");
        c.expect(":");
        Rational v = c.rational();
        if (!m.emplace(i, v).second)
            throw ParseError(at, "repeated coordinate");
    } while (c.accept(","));
    c.finish();
    return Vector::from_map(m);
}

/// `l1`, `lp(p)`, `c0`, `T`, `S` or `S(tol=..)`, `X(<ordinal>)` or `X(<ordinal>, cap=n)`.
inline NormSpace parse_space(std::string_view text)
{
    detail::Cursor c(text);
    NormSpace s;
    std::size_t at = c.pos();
    try {
        if (c.accept("l1")) {
            s = NormSpace::l1();
        } else if (c.accept("lp(")) {
            Rational p = c.rational();
            c.expect(")");
            s = NormSpace::lp(p);
        } else if (c.accept("c0")) {
            s = NormSpace::c0();
        } else if (c.accept("T")) {
            s = NormSpace::tsirelson();
        } else if (c.accept("S")) {
            double tol = 1e-9;
            if (c.accept("(")) {
                c.expect("tol");
                c.expect("=");
                tol = c.real();
                c.expect(")");
            }
            s = NormSpace::schlumprecht(tol);
        } else if (c.accept("X(")) {
            Ordinal xi = detail::ordinal_expr(c);
            std::size_t cap = 64;
            if (c.accept(",")) {
                c.expect("cap");
                c.expect("=");
                cap = c.natural();
            }
            c.expect(")");
            s = NormSpace::x_omega(xi, cap);
        } else {
            c.fail("expected l1, lp(p), c0, T, S or X(..)");
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(at, e.what());
    }
    c.finish();
    return s;
}

/// `(U +n)`, `(AVG(l) f...)`, `(SCH f...)`.
inline Functional parse_functional(std::string_view text)
{
    detail::Cursor c(text);
    Functional f = detail::functional_expr(c);
    c.finish();
    return f;
}

} // namespace sdist

#endif // SDIST_PARSE_HPP
