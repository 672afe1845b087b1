#ifndef SDIST_TESTS_GENERATORS_HPP
#define SDIST_TESTS_GENERATORS_HPP

// Random expressions for the parser round trips.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "sdist/parse.hpp"

namespace gen {

using namespace sdist;

using Rng = std::mt19937_64;

inline std::uint64_t pick(Rng& rng, std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); }

inline Ordinal random_ordinal(Rng& rng, int depth)
{
    Ordinal a;
    std::uint64_t terms = pick(rng, 0, 3);
    for (std::uint64_t t = 0; t < terms; ++t) {
        Ordinal e = depth > 0 && rng() % 2 ? random_ordinal(rng, depth - 1) : Ordinal::natural(pick(rng, 0, 3));
        a = add(a, Ordinal::power(e, pick(rng, 1, 4)));
    }
    return a;
}

inline IndexSequence random_sequence(Rng& rng)
{
    switch (rng() % 4) {
    case 0:
        return IndexSequence::evens();
    case 1:
        return IndexSequence::arithmetic(Index(pick(rng, 1, 9)), Index(pick(rng, 1, 5)));
    default: {
        std::vector<Index> t;
        Index x = 0;
        for (std::uint64_t i = pick(rng, 1, 5); i > 0; --i)
            t.push_back(x += Index(pick(rng, 1, 4)));
        if (rng() % 2)
            return IndexSequence::explicit_prefix(t);
        return IndexSequence::table_extended(t, x + Index(pick(rng, 1, 3)), Index(pick(rng, 1, 3)));
    }
    }
}

inline FamilyExpr random_family(Rng& rng, int depth)
{
    FamilyExpr f = rng() % 3 ? FamilyExpr::schreier(random_ordinal(rng, 1)) : FamilyExpr::cardinality(pick(rng, 0, 6));
    for (int d = 0; d < depth; ++d)
        switch (rng() % 3) {
        case 0:
            f = FamilyExpr::bracket(f, random_family(rng, depth - 1));
            break;
        case 1:
            f = FamilyExpr::relabel(f, random_sequence(rng));
            break;
        default:
            break;
        }
    return f;
}

inline Vector random_vector(Rng& rng)
{
    std::map<Index, Rational> m;
    for (std::uint64_t i = pick(rng, 0, 6); i > 0; --i) {
        Rational v(long(pick(rng, 1, 40)) * (rng() % 2 ? 1 : -1), long(pick(rng, 1, 12)));
        v.canonicalize();
        m[Index(pick(rng, 1, 60))] = v;
    }
    return Vector::from_map(m);
}

inline NormSpace random_space(Rng& rng)
{
    switch (rng() % 6) {
    case 0:
        return NormSpace::l1();
    case 1:
        return NormSpace::lp(1 + make_rational(long(pick(rng, 0, 8)), long(pick(rng, 1, 3))));
    case 2:
        return NormSpace::c0();
    case 3:
        return NormSpace::tsirelson();
    case 4:
        return NormSpace::schlumprecht(std::ldexp(double(pick(rng, 1, 1000)), -int(pick(rng, 10, 40))));
    default: {
        Ordinal xi = random_ordinal(rng, 1);
        return NormSpace::x_omega(xi.is_zero() ? Ordinal::natural(1) : xi, pick(rng, 1, 100));
    }
    }
}

inline Functional random_functional(Rng& rng, Index& next, int depth)
{
    if (depth == 0 || rng() % 3 == 0) {
        next += Index(pick(rng, 0, 2));
        return Functional::unit(rng() % 2 ? 1 : -1, next++);
    }
    std::vector<Functional> kids;
    std::uint64_t d = pick(rng, 1, 3);
    bool sch = rng() % 3 == 0;
    for (std::uint64_t i = 0; i < d; ++i) {
        if (sch) {
            std::vector<Functional> inner{random_functional(rng, next, depth - 1)};
            kids.push_back(Functional::average(pick(rng, 2, 5), inner));
        } else {
            kids.push_back(random_functional(rng, next, depth - 1));
        }
    }
    if (sch)
        return Functional::schreier(kids);
    return Functional::average(std::max<std::uint64_t>(d, 2) + pick(rng, 0, 3), kids);
}

} // namespace gen

#endif // SDIST_TESTS_GENERATORS_HPP
