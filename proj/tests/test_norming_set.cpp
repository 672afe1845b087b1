#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sdist/norming_set.hpp"
#include "sdist/norms.hpp"

using namespace sdist;

namespace {

Vector random_vector(std::mt19937& rng, const std::vector<Index>& coords, int max_mag)
{
    std::map<Index, Rational> m;
    for (Index i : coords)
        if (rng() % 4 != 0) {
            int v = 1 + int(rng() % unsigned(max_mag));
            m[i] = rng() % 2 ? v : -v;
        }
    if (m.empty())
        m[coords.front()] = 1;
    return Vector::from_map(m);
}

std::vector<Index> random_coords(std::mt19937& rng, std::size_t n, Index max_coord)
{
    std::set<Index> s;
    while (s.size() < n)
        s.insert(1 + Index(rng() % max_coord));
    return {s.begin(), s.end()};
}

} // namespace

TEST(GenerateW, DepthZeroIsSignedUnits)
{
    auto g = generate_W(Ordinal::natural(1), FinSet({2, 5, 7}), 0);
    EXPECT_FALSE(g.truncated);
    std::set<std::string> got;
    for (const auto& f : g.functionals)
        got.insert(to_string(f));
    std::set<std::string> want;
    for (Index n : {2, 5, 7})
        for (int s : {1, -1})
            want.insert(to_string(Functional::unit(s, n)));
    EXPECT_EQ(got, want);
}

TEST(GenerateW, EmittedFunctionalsAreValid)
{
    for (Ordinal xi : {Ordinal::natural(1), Ordinal::natural(2)}) {
        auto g = generate_W(xi, FinSet({1, 2, 3, 4, 5}), 3, 20000);
        EXPECT_GT(g.functionals.size(), 10u);
        std::set<std::string> keys;
        for (const auto& f : g.functionals) {
            auto r = validate_functional(f, xi);
            EXPECT_TRUE(r.valid) << r.violation << " " << to_string(f);
            EXPECT_TRUE(f.support().subset_of(FinSet({1, 2, 3, 4, 5})));
            EXPECT_TRUE(keys.insert(to_string(f)).second);
        }
    }
}

TEST(GenerateW, BudgetTruncates)
{
    auto g = generate_W(Ordinal::natural(1), FinSet::interval(1, 8), 3, 50);
    EXPECT_TRUE(g.truncated);
    EXPECT_EQ(g.functionals.size(), 50u);
}

TEST(GenerateW, MaxOnTwoUnits)
{
    Vector x = Vector::from_map({{2, 1}, {3, 1}});
    WMax lit = max_over_generated(Ordinal::natural(1), x, FinSet({2, 3}), 2);
    EXPECT_FALSE(lit.truncated);
    EXPECT_EQ(lit.value, 1);
    EXPECT_EQ(max_over_W(Ordinal::natural(1), x, 2).value, 1);
}

TEST(MaxOverW, AgreesWithLiteralStream)
{
    std::mt19937 rng(17);
    for (Ordinal xi : {Ordinal::natural(1), Ordinal::natural(2)})
        for (int it = 0; it < 12; ++it) {
            auto coords = random_coords(rng, 4, 7);
            Vector x = random_vector(rng, coords, 4);
            FinSet window(coords);
            for (std::size_t d = 0; d <= 3; ++d) {
                WMax lit = max_over_generated(xi, x, window, d, 400000);
                ASSERT_FALSE(lit.truncated);
                WMax tgt = max_over_W(xi, x, window, d);
                EXPECT_EQ(lit.value, tgt.value) << to_string(x) << " depth " << d;
                ASSERT_TRUE(tgt.witness);
                EXPECT_EQ(evaluate(*tgt.witness, x), tgt.value);
                EXPECT_TRUE(validate_functional(*tgt.witness, xi).valid);
            }
        }
}

TEST(MaxOverW, SupportWindowSuffices)
{
    std::mt19937 rng(23);
    for (int it = 0; it < 15; ++it) {
        auto coords = random_coords(rng, 4, 9);
        Vector x = random_vector(rng, coords, 3);
        for (std::size_t d = 0; d <= 4; ++d)
            EXPECT_EQ(max_over_W(Ordinal::natural(1), x, d).value,
                      max_over_W(Ordinal::natural(1), x, FinSet::interval(1, x.max_support()), d).value)
                << to_string(x) << " depth " << d;
    }
}

TEST(MaxOverW, MatchesFixpointAtEveryLevel)
{
    std::mt19937 rng(29);
    for (Ordinal xi : {Ordinal::natural(1), Ordinal::natural(2)})
        for (int it = 0; it < 10; ++it) {
            auto coords = random_coords(rng, 6, 12);
            Vector x = random_vector(rng, coords, 4);
            detail::XNormTable t(x, xi, 64);
            ASSERT_TRUE(t.converged());
            for (std::size_t m = 0; m <= t.depth(); ++m)
                EXPECT_EQ(max_over_W(xi, x, m).value, t.at_level(m, 0, t.size() - 1))
                    << to_string(x) << " level " << m;
        }
}
