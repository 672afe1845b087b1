#include <gtest/gtest.h>

#include "sdist/estimators.hpp"

using namespace sdist;

namespace {

FamilyExpr s1() { return FamilyExpr::schreier(Ordinal::natural(1)); }

} // namespace

TEST(SpreadingProfile, TsirelsonUnitVectors)
{
    SpreadingEstimate e = spreading_profile(NormSpace::tsirelson(), BlockSequence::unit_vectors(8), s1(), 8);
    EXPECT_EQ(e.l1_lower, make_rational(1, 2));
    EXPECT_EQ(e.l1_lower_witness.set, FinSet({2, 3}));
    EXPECT_EQ(e.l1_upper, 1);
    EXPECT_EQ(e.c0_lower, 1);
    EXPECT_EQ(e.c0_upper, 2);
    EXPECT_EQ(e.c0_upper_witness.set, FinSet({4, 5, 6, 7}));
    EXPECT_FALSE(e.budget_exhausted);
}

TEST(SpreadingProfile, ClassicalSpaces)
{
    BlockSequence bs = BlockSequence::unit_vectors(10);
    SpreadingEstimate l1 = spreading_profile(NormSpace::l1(), bs, s1(), 10);
    EXPECT_EQ(l1.l1_lower, 1);
    EXPECT_EQ(l1.c0_upper, 5);
    SpreadingEstimate c0 = spreading_profile(NormSpace::c0(), bs, s1(), 10);
    EXPECT_EQ(c0.c0_upper, 1);
    EXPECT_EQ(c0.l1_lower, make_rational(1, 5));
}

TEST(SpreadingProfile, WitnessesAreExact)
{
    NormEvaluator ev = evaluator(NormSpace::tsirelson());
    BlockSequence bs = BlockSequence::unit_vectors(16);
    SpreadingEstimate e = spreading_profile(ev, bs, s1(), 16);
    for (const auto* w : {&e.l1_lower_witness, &e.c0_upper_witness})
        EXPECT_EQ(ev.exact(bs.combine(w->set, w->coeffs)), w->value);
    Rational total = 0;
    for (const auto& a : e.l1_lower_witness.coeffs)
        total += a;
    EXPECT_EQ(total, 1);
}

TEST(SpreadingProfile, HorizonBeyondBlocks)
{
    EXPECT_THROW(spreading_profile(NormSpace::l1(), BlockSequence::unit_vectors(5), s1(), 6), std::invalid_argument);
}

TEST(SpreadingProfile, SampledFamilies)
{
    SearchOptions opt;
    opt.set_budget = 40;
    SpreadingEstimate e = spreading_profile(NormSpace::tsirelson(), BlockSequence::unit_vectors(30), s1(), 30, opt);
    EXPECT_TRUE(e.budget_exhausted);
    EXPECT_LE(e.sets_examined, 40u);
    EXPECT_GE(e.l1_lower, make_rational(1, 2));
}

TEST(Evaluators, FastAgreesWithExact)
{
    BlockSequence bs = BlockSequence::unit_vectors(12);
    for (const NormEvaluator& ev : {evaluator(NormSpace::tsirelson()), interval_evaluator(NormSpace::tsirelson(), 2),
                                    evaluator(NormSpace::l1()), evaluator(NormSpace::c0())})
        for (Index a = 1; a <= 6; ++a) {
            Vector x = bs.combine(FinSet::interval(a, a + 5), {1, -2, 3, 1, make_rational(1, 2), -1});
            EXPECT_NEAR(ev.fast(x), ev.exact(x).get_d(), 1e-9) << ev.name;
        }
}

TEST(Evaluators, DenseGridMatchesSignVertices)
{
    NormEvaluator ev = evaluator(NormSpace::tsirelson());
    BlockSequence bs = BlockSequence::unit_vectors(8);
    FinSet e({3, 4, 5});
    double best = 0;
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<Rational> s;
        for (int i = 0; i < 3; ++i)
            s.push_back(mask >> i & 1 ? 1 : -1);
        best = std::max(best, ev.exact(bs.combine(e, s)).get_d());
    }
    EXPECT_NEAR(c0_upper_dense(ev, bs, e, 4), best, 1e-12);
}
