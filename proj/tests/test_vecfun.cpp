#include <gtest/gtest.h>

#include <random>

#include "sdist/vecfun.hpp"

using namespace sdist;

namespace {

Functional u(Index n, int s = 1) { return Functional::unit(s, n); }

Functional avg(std::uint64_t l, std::vector<Functional> cs) { return Functional::average(l, std::move(cs)); }

Vector sum_units(std::initializer_list<Index> idx)
{
    std::map<Index, Rational> m;
    for (Index i : idx)
        m[i] = 1;
    return Vector::from_map(m);
}

Functional random_functional(std::mt19937& rng, Index lo, Index hi, int depth)
{
    if (depth == 0 || hi - lo < 2 || rng() % 3 == 0)
        return u(lo + Index(rng() % (hi - lo + 1)), rng() % 2 ? 1 : -1);
    std::vector<Functional> cs;
    Index cur = lo;
    while (cur <= hi && cs.size() < 3) {
        Index end = std::min<Index>(hi, cur + Index(rng() % 3));
        cs.push_back(random_functional(rng, cur, end, depth - 1));
        cur = end + 1;
    }
    return avg(cs.size() + rng() % 3 + 1, std::move(cs));
}

} // namespace

TEST(Vector, Basics)
{
    Vector x({{2, make_rational(1, 2)}, {3, make_rational(1, 2)}, {7, 0}});
    EXPECT_EQ(x.size(), 2u);
    EXPECT_EQ(to_string(x), "2:1/2,3:1/2");
    EXPECT_EQ(x.support(), (FinSet{2, 3}));
    EXPECT_EQ(x.l1(), 1);
    EXPECT_EQ(x.linf(), make_rational(1, 2));
    EXPECT_EQ((x - x).size(), 0u);
    EXPECT_EQ(x.restrict(3, 9), Vector::unit(3, make_rational(1, 2)));
    EXPECT_THROW(Vector({{3, 1}, {2, 1}}), std::invalid_argument);
}

TEST(Functional, EvaluateExamples)
{
    EXPECT_EQ(evaluate(u(3), Vector::unit(3)), 1);
    EXPECT_EQ(evaluate(avg(2, {u(1), u(2)}), sum_units({1, 2})), 1);
    Functional g = Functional::schreier({avg(2, {u(1), u(2)}), avg(4, {u(5), u(6)})});
    EXPECT_EQ(evaluate(g, sum_units({1, 2, 5, 6})), make_rational(3, 2));
    EXPECT_EQ(to_string(g), "(SCH (AVG(2) (U +1) (U +2)) (AVG(4) (U +5) (U +6)))");
    EXPECT_EQ(evaluate_dense<double>(g, std::vector<double>{0, 1, 1, 0, 0, 1, 1}), 1.5);
}

TEST(Functional, Validate)
{
    Ordinal one = Ordinal::natural(1);
    EXPECT_TRUE(validate_functional(avg(2, {u(1), u(2)}), one).valid);
    auto bad = validate_functional(Functional::schreier({avg(3, {u(2)}), avg(3, {u(5)})}), one);
    EXPECT_FALSE(bad.valid);
    EXPECT_EQ(bad.violation, "sizes not strictly increasing");
    // minima {1, 5}: |E| = 2 > 1 = min E, so not in S(w) at n = 1
    auto adm = validate_functional(Functional::schreier({avg(2, {u(1)}), avg(3, {u(5)})}), one);
    EXPECT_FALSE(adm.valid);
    ASSERT_TRUE(adm.family_counterexample);
    EXPECT_EQ(*adm.family_counterexample, (FinSet{1, 5}));
    EXPECT_FALSE(validate_functional(avg(1, {u(1)}), one).valid);
    EXPECT_FALSE(validate_functional(avg(2, {u(1), u(2), u(3)}), one).valid);
    EXPECT_FALSE(validate_functional(avg(2, {u(2), u(1)}), one).valid);
    auto vfg = validate_functional(Functional::schreier({avg(2, {u(2), u(4)}), avg(3, {u(6)})}), one);
    EXPECT_EQ(vfg.violation, "size does not exceed previous maximum support");
    EXPECT_TRUE(validate_functional(Functional::schreier({avg(2, {u(2), u(3)}), avg(4, {u(6)})}), one).valid);
}

TEST(Functional, LinearAndCrudeBound)
{
    std::mt19937 rng(5);
    for (int t = 0; t < 300; ++t) {
        Functional f = random_functional(rng, 1, 12, 3);
        std::map<Index, Rational> mx, my;
        for (Index i = 1; i <= 12; ++i) {
            if (rng() % 2)
                mx[i] = make_rational(long(rng() % 11) - 5, long(1 + rng() % 4));
            if (rng() % 2)
                my[i] = make_rational(long(rng() % 11) - 5, long(1 + rng() % 4));
        }
        Vector x = Vector::from_map(mx), y = Vector::from_map(my);
        Rational a = make_rational(long(rng() % 7) - 3, 2), b = make_rational(long(rng() % 5) - 2, 3);
        ASSERT_EQ(evaluate(f, a * x + b * y), a * evaluate(f, x) + b * evaluate(f, y));
        std::size_t overlap = 0;
        for (Index i : f.support())
            overlap += x.support().contains(i);
        ASSERT_LE(abs(evaluate(f, x)), x.linf() * Rational(long(overlap)));
    }
}

TEST(BlockSequence, Combine)
{
    BlockSequence e = BlockSequence::unit_vectors(12);
    std::vector<BlockGroup> id;
    for (Index i = 1; i <= 12; ++i)
        id.push_back({FinSet{i}, {1}});
    auto same = block_combine(e, id);
    EXPECT_EQ(same.blocks(), e.blocks());

    std::vector<BlockGroup> pairs;
    for (Index i = 1; i + 1 <= 12; i += 2)
        pairs.push_back({FinSet{i, i + 1}, {make_rational(1, 2), make_rational(1, 2)}});
    auto avgd = block_combine(e, pairs);
    EXPECT_EQ(avgd.size(), 6u);
    EXPECT_EQ(avgd.at(2), Vector({{3, make_rational(1, 2)}, {4, make_rational(1, 2)}}));
    EXPECT_EQ(avgd.origin(2), (FinSet{3, 4}));

    // difference blocking (x_{2i} - x_{2i+1}) / 2
    std::vector<BlockGroup> diff;
    for (Index i = 1; 2 * i + 1 <= 12; ++i)
        diff.push_back({FinSet{2 * i, 2 * i + 1}, {make_rational(1, 2), make_rational(-1, 2)}});
    auto d = block_combine(e, diff);
    EXPECT_EQ(d.at(1), Vector({{2, make_rational(1, 2)}, {3, make_rational(-1, 2)}}));

    // composition of blockings tracks origins
    auto twice = block_combine(avgd, {{FinSet{1, 2}, {1, 1}}, {FinSet{3}, {2}}});
    EXPECT_EQ(twice.origin(1), (FinSet{1, 2, 3, 4}));
    EXPECT_EQ(twice.origin(2), (FinSet{5, 6}));
    auto direct = block_combine(e, {{FinSet{1, 2, 3, 4}, {make_rational(1, 2), make_rational(1, 2), make_rational(1, 2),
                                                           make_rational(1, 2)}},
                                    {FinSet{5, 6}, {1, 1}}});
    EXPECT_EQ(twice.blocks(), direct.blocks());

    EXPECT_THROW(block_combine(e, {{FinSet{3, 4}, {1, 1}}, {FinSet{2}, {1}}}), std::invalid_argument);
    EXPECT_THROW(block_combine(e, {{FinSet{3, 4}, {1}}}), std::invalid_argument);
}
