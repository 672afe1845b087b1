#include <gtest/gtest.h>

#include "sdist/analysis.hpp"

using namespace sdist;

namespace {

FamilyExpr s1() { return FamilyExpr::schreier(Ordinal::natural(1)); }

BlockSequence flat_blocks(std::size_t count, Index width)
{
    std::vector<Vector> out;
    for (Index k = 0; k < Index(count); ++k) {
        std::map<Index, Rational> m;
        for (Index j = 0; j < width; ++j)
            m[width * k + 1 + j] = 1;
        out.push_back(Vector::from_map(m));
    }
    return BlockSequence(out);
}

} // namespace

TEST(Distortion, TsirelsonIntervalNorm)
{
    NormSpace T = NormSpace::tsirelson();
    Vector x = Vector::from_map({{4, make_rational(1, 2)}, {5, make_rational(1, 2)}, {6, make_rational(1, 2)}, {7, make_rational(1, 2)}});
    Vector y = Vector::unit(4);
    ASSERT_EQ(norm(T, x).value, 1);
    EXPECT_EQ(interval_norm(T, x, 2).value / interval_norm(T, y, 2).value, make_rational(5, 4));

    NormEvaluator first = evaluator(T), second = interval_evaluator(T, 2);
    BlockSequence bs = BlockSequence::unit_vectors(12);
    DistortionReport r = distortion_witness(first, second, s1(), bs, make_rational(6, 5), 12);
    ASSERT_TRUE(r.found);
    EXPECT_GT(r.witness->ratio, make_rational(6, 5));
    EXPECT_GE(r.best->ratio, make_rational(5, 4));
    EXPECT_TRUE(revalidate(*r.witness, first, second, s1(), bs));
    EXPECT_TRUE(revalidate(*r.best, first, second, s1(), bs));
}

TEST(Distortion, ClassicalNullControls)
{
    for (std::size_t n = 1; n <= 4; ++n) {
        DistortionReport l1 = distortion_witness(evaluator(NormSpace::l1()), interval_evaluator(NormSpace::l1(), n), s1(),
                                                 BlockSequence::unit_vectors(12), make_rational(101, 100), 12);
        EXPECT_FALSE(l1.found);
        EXPECT_EQ(l1.best->ratio, 1);
        DistortionReport c0 = distortion_witness(evaluator(NormSpace::c0()), interval_evaluator(NormSpace::c0(), n), s1(),
                                                 flat_blocks(12, 4), make_rational(101, 100), 12);
        EXPECT_FALSE(c0.found);
        EXPECT_EQ(c0.best->ratio, 1);
    }
}

TEST(Distortion, Preconditions)
{
    EXPECT_THROW(distortion_witness(evaluator(NormSpace::l1()), evaluator(NormSpace::l1()), s1(),
                                    BlockSequence::unit_vectors(4), 1, 4),
                 std::invalid_argument);
}

TEST(IntervalBound, Formula)
{
    // (4 / (101/100)^2) (100 / 108) = 4 * 10000 * 100 / (10201 * 108)
    Rational oracle(mpz_class(4 * 10000 * 100), mpz_class(10201 * 108));
    oracle.canonicalize();
    EXPECT_EQ(interval_bound_formula(4, 100, make_rational(1, 100)), oracle);
    EXPECT_EQ(interval_bound_formula(1, 1, make_rational(1, 1)), make_rational(1, 12));
}

TEST(IntervalBound, DeskRun)
{
    for (std::uint64_t n = 1; n <= 3; ++n) {
        IntervalBoundReport r = theorem3_experiment(Ordinal::natural(1), n, 2 * n, make_rational(1, 100), 1000);
        EXPECT_TRUE(r.combined_member);
        ASSERT_TRUE(r.achieved);
        EXPECT_GE(*r.achieved, make_rational(1, long(n)));
        EXPECT_GE(r.z_interval, r.z_norm);
        EXPECT_LE(r.z_interval, Rational(long(n)) * r.z_norm);
    }
    IntervalBoundReport far = theorem3_experiment(Ordinal::natural(1), 3, 3, make_rational(1, 10), 20);
    EXPECT_TRUE(far.budget_exhausted);
    EXPECT_FALSE(far.achieved);
    EXPECT_THROW(theorem3_experiment(Ordinal::natural(1), 3, 2, make_rational(1, 10), 100), std::invalid_argument);
}

TEST(RatioBound, Chain)
{
    NormSpace T = NormSpace::tsirelson();
    NormEvaluator first = evaluator(T), second = interval_evaluator(T, 2);
    BlockSequence bs = BlockSequence::unit_vectors(12);
    RatioConstants c = ratio_constants(spreading_profile(first, bs, s1(), 12), spreading_profile(second, bs, s1(), 12));
    RatioBoundReport ok = ratio_bound_check(first, second, c, bs, s1(), 150, 12);
    EXPECT_TRUE(ok.ok()) << ok.first_violation;
    EXPECT_EQ(ok.samples, 150u);
    EXPECT_LE(ok.max_ratio, ok.bound);

    RatioBoundReport same = ratio_bound_check(first, first, ratio_constants(spreading_profile(first, bs, s1(), 12),
                                                                             spreading_profile(first, bs, s1(), 12)),
                                              bs, s1(), 50, 12);
    EXPECT_TRUE(same.ok());

    c.b0 = make_rational(1, 2);
    EXPECT_FALSE(ratio_bound_check(first, second, c, bs, s1(), 150, 12).ok());
}

TEST(AlphaIndex, UnitBlocks)
{
    AlphaDiagnostic d = alpha_index_diagnostic(BlockSequence::unit_vectors(40), Ordinal::natural(1), 1, 4, 40);
    EXPECT_EQ(d.value, make_rational(1, 4));
    EXPECT_FALSE(d.truncated);
}

TEST(AlphaIndex, FlatBlocksStayAway)
{
    BlockSequence bs = flat_blocks(16, 6);
    for (std::size_t h : {8u, 12u, 16u}) {
        AlphaDiagnostic d = alpha_index_diagnostic(bs, Ordinal::natural(1), 1, 2, h);
        EXPECT_GE(d.value, make_rational(1, 100));
    }
}

TEST(AlphaIndex, SccBound)
{
    Rational eps = make_rational(1, 2);
    SccResult r = scc_basic(Ordinal::natural(2), Ordinal::natural(1), eps, IndexSequence::naturals());
    for (std::uint64_t floor : {2u, 4u, 8u}) {
        AlphaSum a = alpha_sum(r.vector, s1(), floor, 400000);
        EXPECT_LT(a.value, Rational(1) / Rational(long(floor)) + 6 * eps);
    }
}

TEST(CauseIndex, UnitBlocks)
{
    BlockSequence bs = BlockSequence::unit_vectors(6);
    CauseIndexReport r = cause_index_check(Ordinal::natural(1), bs, {3, 4, 5}, FinSet({1}), 2);
    EXPECT_FALSE(r.hypothesis_holds);
    EXPECT_EQ(r.value, 1);
    EXPECT_TRUE(r.bound_holds);
    EXPECT_THROW(cause_index_check(Ordinal::natural(1), bs, {2, 3, 4}, FinSet({1}), 2), std::invalid_argument);
}

TEST(ConstructionCheck, Constructions)
{
    ConstructionCheck ii = construction_check("ii", Ordinal::natural(2), Ordinal::natural(1), 24);
    EXPECT_TRUE(ii.pass());
    ASSERT_TRUE(ii.spread_sequence);
    for (Index v : ii.sequence.values_up_to(24))
        EXPECT_LE(v, ii.spread_sequence->at(*ii.sequence.position_of(v)));
    EXPECT_TRUE(construction_check("iii", Ordinal::natural(1), Ordinal::natural(1), 20).pass());
    EXPECT_TRUE(construction_check("iv", Ordinal::natural(1), Ordinal::natural(0), 20).pass());
    EXPECT_THROW(construction_check("v", Ordinal::natural(1), Ordinal::natural(1), 20), std::invalid_argument);
}

TEST(ConstructionCheck, RandomBlocksAreSchreierOne)
{
    auto blocks = random_s1_blocks(60, 3);
    ASSERT_FALSE(blocks.empty());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        EXPECT_LE(blocks[i].size(), blocks[i].min());
        if (i > 0) {
            EXPECT_LT(blocks[i - 1].max(), blocks[i].min());
        }
    }
}

TEST(SccSuite, Certificates)
{
    SccSuiteReport s = scc_suite(20, 2);
    EXPECT_EQ(s.checked, 20u);
    EXPECT_TRUE(s.ok());
    for (const auto& r : s.results)
        EXPECT_LT(r.mass_certificate.mass, r.eps);
}
