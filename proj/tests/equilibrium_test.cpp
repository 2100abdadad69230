#include "cmra/equilibrium.hpp"
#include "cmra/error.hpp"

#include <gtest/gtest.h>

#include <atomic>

using namespace cmra;

TEST(ParallelFor, VisitsEveryIndexAndPropagatesErrors)
{
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 3);
  for (const auto& h : hits) {
    EXPECT_EQ(h.load(), 1);
  }
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) {
                   throw DomainError("boom");
                 }
               }),
               DomainError);
}

TEST(MinimalWinningBid, ClosedFormAgreesWithBook)
{
  const auto opponent = ValuationModel::power(2.0, 0.75, 0.6);
  EXPECT_NEAR(minimal_winning_bid(opponent, 0.25, 0.75), 0.0, 1e-12);
  EXPECT_NEAR(minimal_winning_bid(opponent, 0.5, 0.75), opponent.value(0.75) - opponent.value(0.5), 1e-12);

  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  const AdditionalBid small{1, Money::from_real(0.1)};
  book.record_round(0.8, 3, std::span(&small, 1));
  EXPECT_EQ(minimal_winning_bid(book, 1), Money::zero());
  EXPECT_EQ(minimal_winning_bid(book, 3), Money::from_real(0.5));
  EXPECT_EQ(minimal_winning_bid(book, 4), Money::from_real(0.6));
}

TEST(Rdr, ThresholdValues)
{
  const auto types = TypeDistribution::uniform(0.0, 1.0);
  EXPECT_NEAR(rdr_threshold(ValuationModel::power(1.0, 0.75, 1.0), 0.75, types), 0.5, 1e-12);
  EXPECT_NEAR(rdr_threshold(ValuationModel::power(2.0, 0.75, 1.0), 0.75, types), 0.625, 1e-12);
  EXPECT_NEAR(rdr_threshold(ValuationModel::power(0.5, 0.75, 1.0), 0.75, types), 0.4337, 1e-3);
  EXPECT_THROW((void)rdr_threshold(ValuationModel::quadratic(1.0, 0.5), 0.75, types), AssumptionViolation);
}

TEST(Rdr, QuadratureBindsAtTopType)
{
  const auto types = TypeDistribution::uniform(0.0, 1.0);
  RdrConfig cfg;
  const auto linear = check_rdr_bne(ValuationModel::power(1.0, 0.75, 1.0), 0.75, types, 2000, 5, cfg);
  EXPECT_TRUE(linear.ic_satisfied);
  EXPECT_NEAR(linear.binding.theta, 1.0, 1e-12);
  EXPECT_NEAR(linear.binding.slack(), 0.0, 1e-6);
  const auto convex = check_rdr_bne(ValuationModel::power(2.0, 0.75, 1.0), 0.75, types, 2000, 5, cfg);
  EXPECT_FALSE(convex.ic_satisfied);
  EXPECT_NEAR(convex.binding.slack(), -0.125, 1e-6);
  EXPECT_TRUE(convex.simulation_agrees);
}

TEST(Search, SmallGridVerdicts)
{
  const MatrixConfig mc = default_matrix_config();
  SearchConfig sc = mc.non_decreasing_search;
  sc.type_points = 3;
  EXPECT_TRUE(check_expost(StrategyTag::CmraTruthful, mc.non_decreasing, sc).equilibrium());
  EXPECT_FALSE(check_expost(StrategyTag::ClockTruthful, mc.non_decreasing, sc).equilibrium());

  SearchConfig dc = mc.decreasing_search;
  dc.type_points = 3;
  EXPECT_FALSE(check_expost(StrategyTag::CmraTruthful, mc.decreasing, dc).equilibrium());
}

TEST(Search, BestDeviationReplays)
{
  const MatrixConfig mc = default_matrix_config();
  SearchConfig sc = mc.decreasing_search;
  sc.type_points = 3;
  const auto rep = check_expost(StrategyTag::CmraTruthful, mc.decreasing, sc);
  const auto& w = rep.worst;
  ASSERT_TRUE(w.best);
  const double base = deviation_surplus(rep.profile, mc.decreasing, w.theta1, w.theta2, w.deviator, std::nullopt, sc);
  const double dev = deviation_surplus(rep.profile, mc.decreasing, w.theta1, w.theta2, w.deviator, w.best, sc);
  EXPECT_DOUBLE_EQ(base, w.baseline);
  EXPECT_DOUBLE_EQ(dev, w.best_surplus);
  EXPECT_NEAR(dev - base, w.gain, 1e-12);
}

TEST(Search, DeterministicAcrossWorkerCounts)
{
  const MatrixConfig mc = default_matrix_config();
  SearchConfig sc = mc.non_decreasing_search;
  sc.type_points = 2;
  sc.workers = 1;
  const auto one = check_expost(StrategyTag::ClockTruthful, mc.non_decreasing, sc);
  sc.workers = 4;
  const auto four = check_expost(StrategyTag::ClockTruthful, mc.non_decreasing, sc);
  EXPECT_EQ(one.max_gain(), four.max_gain());
  EXPECT_EQ(one.worst.best, four.worst.best);
  EXPECT_EQ(one.runs, four.runs);
}

TEST(Vcg, TruthfulAndConstantMatchVcg)
{
  const MatrixConfig mc = default_matrix_config();
  const auto rep = vcg_equivalence_check(mc.non_decreasing, 5, 9, 8, 1e-3);
  EXPECT_EQ(rep.checks.size(), 10u);
  EXPECT_TRUE(rep.all_match());
}
