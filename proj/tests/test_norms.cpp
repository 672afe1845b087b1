#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sdist/norms.hpp"

using namespace sdist;

namespace {

Vector units(std::initializer_list<Index> idx, Rational c = 1)
{
    std::map<Index, Rational> m;
    for (Index i : idx)
        m[i] = c;
    return Vector::from_map(m);
}

Vector random_vector(std::mt19937& rng, std::size_t max_supp, Index max_coord, int max_mag)
{
    std::map<Index, Rational> m;
    std::size_t n = 1 + rng() % max_supp;
    while (m.size() < n) {
        int v = 1 + int(rng() % unsigned(max_mag));
        m[1 + Index(rng() % max_coord)] = rng() % 2 ? v : -v;
    }
    return Vector::from_map(m);
}

Rational oracle_tsirelson(const Vector& x)
{
    constexpr std::int64_t scale = std::int64_t(1) << 20;
    std::vector<Index> coords;
    std::vector<std::int64_t> mags;
    for (const auto& [i, v] : x) {
        coords.push_back(i);
        mags.push_back(sdist::abs(v).get_num().get_si() * scale);
    }
    return make_rational(oracle::Tsirelson(coords, mags).norm(), scale);
}

} // namespace

TEST(Classical, ClosedForms)
{
    Vector x = Vector::from_map({{2, 3}, {5, -4}});
    EXPECT_EQ(norm(NormSpace::l1(), x).value, 7);
    EXPECT_EQ(norm(NormSpace::c0(), x).value, 4);
    NormResult l2 = norm(NormSpace::lp(2), x);
    EXPECT_FALSE(l2.exact);
    EXPECT_NEAR(double(l2.approx), 5.0, 1e-12);
    for (const auto& sp : {NormSpace::l1(), NormSpace::c0()}) {
        NormResult r = norm(sp, x);
        ASSERT_TRUE(r.witness);
        EXPECT_EQ(evaluate(*r.witness, x), r.value);
    }
}

TEST(Tsirelson, Examples)
{
    EXPECT_EQ(norm(NormSpace::tsirelson(), units({5})).value, 1);
    NormResult r = norm(NormSpace::tsirelson(), units({3, 4, 5}));
    EXPECT_EQ(r.value, make_rational(3, 2));
    EXPECT_EQ(r.pieces.size(), 3u);
    EXPECT_EQ(norm(NormSpace::tsirelson(), units({1, 2})).value, 1);
    EXPECT_EQ(norm(NormSpace::tsirelson(), units({5, 6, 7})).value, make_rational(3, 2));
}

TEST(Tsirelson, AgreesWithExhaustiveOracle)
{
    std::mt19937 rng(11);
    for (int it = 0; it < 60; ++it) {
        Vector x = random_vector(rng, 9, 14, 4);
        NormResult r = norm(NormSpace::tsirelson(), x);
        EXPECT_EQ(r.value, oracle_tsirelson(x)) << to_string(x);
        ASSERT_TRUE(r.witness);
        EXPECT_EQ(evaluate(*r.witness, x), r.value) << to_string(x);
        EXPECT_GE(r.value, x.linf());
        EXPECT_EQ(r.value, norm(NormSpace::tsirelson(), x.abs()).value);
    }
}

TEST(Tsirelson, FloatingMatchesExact)
{
    std::mt19937 rng(5);
    for (int it = 0; it < 20; ++it) {
        Vector x = random_vector(rng, 8, 12, 5);
        std::vector<Index> c;
        std::vector<double> m;
        for (const auto& [i, v] : x) {
            c.push_back(i);
            m.push_back(sdist::abs(v).get_d());
        }
        EXPECT_NEAR(tsirelson_norm(c, m), norm(NormSpace::tsirelson(), x).value.get_d(), 1e-12);
    }
}

TEST(Schlumprecht, Examples)
{
    NormResult r = norm(NormSpace::schlumprecht(), units({1, 2}));
    EXPECT_FALSE(r.exact);
    EXPECT_NEAR(double(r.approx), 2.0 / std::log2(3.0), 1e-12);
    EXPECT_NEAR(double(norm(NormSpace::schlumprecht(), units({4})).approx), 1.0, 1e-15);
}

TEST(XSpace, Examples)
{
    NormResult r = norm(NormSpace::x_omega(Ordinal::natural(1)), units({2, 3}));
    EXPECT_EQ(r.value, 1);
    EXPECT_TRUE(r.converged);
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(evaluate(*r.witness, units({2, 3})), 1);

    NormSpace x1 = NormSpace::x_omega(Ordinal::natural(1));
    EXPECT_EQ(norm_j(x1, units({2}), 2).value, make_rational(1, 2));
    EXPECT_EQ(norm_j(x1, units({2, 3}), 2).value, 1);
}

TEST(XSpace, WitnessesAreExactAndAdmissible)
{
    std::mt19937 rng(3);
    for (Ordinal xi : {Ordinal::natural(1), Ordinal::natural(2)}) {
        NormSpace sp = NormSpace::x_omega(xi);
        for (int it = 0; it < 25; ++it) {
            Vector x = random_vector(rng, 7, 12, 3);
            NormResult r = norm(sp, x);
            EXPECT_TRUE(r.converged);
            EXPECT_GE(r.value, x.linf());
            EXPECT_LE(r.value, x.l1());
            ASSERT_TRUE(r.witness);
            EXPECT_EQ(evaluate(*r.witness, x), r.value) << to_string(x);
            auto rep = validate_functional(*r.witness, xi);
            EXPECT_TRUE(rep.valid) << rep.violation << " " << to_string(*r.witness);
            EXPECT_EQ(r.value, norm(sp, x.abs()).value);
            for (std::size_t j = 2; j <= 4; ++j) {
                NormResult rj = norm_j(sp, x, j);
                EXPECT_LE(rj.value, r.value);
                ASSERT_TRUE(rj.witness);
                EXPECT_EQ(evaluate(*rj.witness, x), rj.value);
            }
        }
    }
}

TEST(XSpace, IteratesAreMonotone)
{
    std::mt19937 rng(8);
    for (int it = 0; it < 15; ++it) {
        Vector x = random_vector(rng, 6, 10, 3);
        detail::XNormTable t(x, Ordinal::natural(1), 64);
        const std::size_t s = t.size();
        for (std::size_t m = 1; m <= t.depth(); ++m)
            for (std::size_t a = 0; a < s; ++a)
                for (std::size_t b = a; b < s; ++b)
                    EXPECT_GE(t.at_level(m, a, b), t.at_level(m - 1, a, b));
    }
}

TEST(IntervalNorm, Examples)
{
    NormSpace T = NormSpace::tsirelson();
    EXPECT_EQ(interval_norm(T, units({1, 3, 5}), 3).value, 3);
    EXPECT_EQ(interval_norm(T, units({4}), 2).value, 1);
    NormResult r = interval_norm(T, units({4, 5, 6, 7}, make_rational(1, 2)), 2);
    EXPECT_EQ(r.value, make_rational(5, 4));
    ASSERT_EQ(r.pieces.size(), 2u);
    EXPECT_EQ(r.pieces[0], FinSet({4}));
    EXPECT_EQ(r.pieces[1], FinSet({5, 6, 7}));
}

TEST(IntervalNorm, BoundsAndSubadditivity)
{
    std::mt19937 rng(21);
    NormSpace T = NormSpace::tsirelson();
    for (int it = 0; it < 20; ++it) {
        Vector x = random_vector(rng, 8, 12, 4);
        Rational base = norm(T, x).value;
        for (std::size_t n = 1; n <= 4; ++n) {
            Rational v = interval_norm(T, x, n).value;
            EXPECT_GE(v, base);
            EXPECT_LE(v, Rational(long(n)) * base);
            auto supp = x.support();
            for (std::size_t cut = 1; cut < supp.size(); ++cut)
                for (std::size_t k = 1; k < n; ++k) {
                    Vector e = x.restrict(supp[0], supp[cut - 1]);
                    Vector f = x.restrict(supp[cut], supp[supp.size() - 1]);
                    EXPECT_GE(v, interval_norm(T, e, k).value + interval_norm(T, f, n - k).value);
                }
        }
    }
}
