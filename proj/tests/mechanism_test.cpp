#include "cmra/mechanism.hpp"

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cmra;

namespace {

const auto kLots = ValuationModel::polynomial({120.0, 0.0, 0.0}, Regime::NonDecreasing);

AuctionConfig lots_config()
{
  AuctionConfig c{QuantityGrid(4, 0.75)};
  c.increment = 4.0;
  c.max_price = 1000.0;
  c.refine = false;
  return c;
}

Money whole(long v)
{
  return Money::from_units(v * Money::kUnitsPerCurrency);
}

}  // namespace

TEST(Closing, HeadlinesAtCapNeverClose)
{
  const QuantityGrid g(4, 0.75);
  BidBook b1(g);
  BidBook b2(g);
  b1.record_round(40.0, 3, {});
  b2.record_round(40.0, 3, {});
  const auto r = solve_closing(b1, b2);
  EXPECT_EQ(r.revenue, whole(30));
  EXPECT_FALSE(r.allocation);
}

TEST(Closing, EmptyBooksHaveZeroRevenue)
{
  const QuantityGrid g(4, 0.75);
  const auto r = solve_closing(BidBook(g), BidBook(g));
  EXPECT_EQ(r.revenue, Money::zero());
  EXPECT_FALSE(r.allocation);
}

TEST(ClosingProperty, MatchesExhaustiveEnumeration)
{
  std::mt19937_64 rng(11);
  int closed = 0;
  for (int i = 0; i < 1000; ++i) {
    const QuantityGrid g(std::uniform_int_distribution<int>(4, 20)(rng), gen::cap_for(rng));
    const int rounds = std::uniform_int_distribution<int>(1, 6)(rng);
    const BidBook b1 = gen::random_book(g, rng, rounds);
    const BidBook b2 = gen::random_book(g, rng, rounds);
    const auto fast = solve_closing(b1, b2);
    const auto slow = gen::brute_force_closing(b1, b2);
    ASSERT_EQ(fast.revenue, slow.revenue) << "case " << i;
    ASSERT_EQ(fast.allocation, slow.allocation) << "case " << i;
    closed += fast.allocation ? 1 : 0;
  }
  // Both outcomes must be exercised.
  EXPECT_GT(closed, 50);
  EXPECT_LT(closed, 950);
}

TEST(Cmra, LotsExample)
{
  const auto c = lots_config();
  const auto clock = run_clock(clock_truthful(kLots, c.grid), clock_truthful(kLots, c.grid), c);
  EXPECT_EQ(clock.revenue, whole(90));
  EXPECT_EQ(clock.excess_supply, 0.25);
  EXPECT_EQ(clock.quantity_index[0], 3);

  const auto truthful = run_cmra(cmra_truthful(kLots, c.grid), cmra_truthful(kLots, c.grid), c);
  EXPECT_EQ(truthful.final_price, 80.0);
  EXPECT_EQ(truthful.revenue, whole(60));
  EXPECT_EQ(truthful.quantity_index[0], 2);
  EXPECT_EQ(truthful.quantity_index[1], 2);
  EXPECT_EQ(truthful.kind[0], BidKind::Additional);

  const auto rdr = run_cmra(rdr_strategy(kLots, c.grid), rdr_strategy(kLots, c.grid), c);
  EXPECT_EQ(rdr.rounds, 1);
  EXPECT_EQ(rdr.revenue, Money::zero());
  EXPECT_EQ(rdr.quantity_index[0], 2);
}

TEST(Cmra, SimultaneousDropFallsBackToBidderOne)
{
  const auto c = lots_config();
  const auto o = run_cmra(clock_truthful(kLots, c.grid), clock_truthful(kLots, c.grid), c);
  EXPECT_EQ(o.quantity_index[0], 3);
  EXPECT_EQ(o.quantity_index[1], 0);
  EXPECT_EQ(o.payment[0], whole(90));
}

TEST(Cmra, MaxPriceHit)
{
  auto c = lots_config();
  c.max_price = 50.0;
  const auto o = run_cmra(clock_truthful(kLots, c.grid), clock_truthful(kLots, c.grid), c);
  EXPECT_EQ(o.termination, Termination::MaxPriceHit);
}

TEST(Cmra, LogMarksClosingRound)
{
  const auto c = lots_config();
  const auto o = run_cmra(cmra_truthful(kLots, c.grid), cmra_truthful(kLots, c.grid), c);
  ASSERT_FALSE(o.log.empty());
  EXPECT_TRUE(o.log.back().closed);
  EXPECT_EQ(o.log.back().round, o.rounds);
  EXPECT_FALSE(o.log.front().closed);
  for (std::size_t i = 1; i < o.log.size(); ++i) {
    EXPECT_LE(o.log[i - 1].clock_price, o.log[i].clock_price);
  }
}

TEST(Cmra, DecreasingFixture)
{
  AuctionConfig c{QuantityGrid(1000, 0.9)};
  c.max_price = 10.0;
  const auto m1 = ValuationModel::quadratic(1.25, 0.5);
  const auto m2 = ValuationModel::quadratic(1.05, 0.5);
  const auto clock = run_clock(clock_truthful(m1, c.grid), clock_truthful(m2, c.grid), c);
  EXPECT_NEAR(clock.final_price, 0.65, 2 * c.increment);
  EXPECT_NEAR(clock.quantity[0], 0.6, 1e-3);
  const auto cmra = run_cmra(cmra_truthful(m1, c.grid), cmra_truthful(m2, c.grid), c);
  EXPECT_LT(cmra.final_price, clock.final_price);
  EXPECT_NEAR(cmra.final_price, 1.05 - std::sqrt(0.38), 1e-5);
  EXPECT_NEAR(cmra.quantity[0], 0.6, 1e-3);

  // At the closing clock the best pair matches the best single acceptance.
  const auto books = books_at(cmra_truthful(m1, c.grid), cmra_truthful(m2, c.grid), c, cmra.final_price);
  const auto curve = revenue_curve(books.first, books.second);
  ASSERT_TRUE(curve.pair_max() && curve.single_max());
  EXPECT_GE(*curve.pair_max(), *curve.single_max());
  EXPECT_NEAR(curve.pair_max()->to_real(), curve.single_max()->to_real(), 1e-6);
}

TEST(Cmra, PowerFixture)
{
  AuctionConfig c{QuantityGrid(8, 0.75)};
  c.max_price = 10.0;
  const auto strong = ValuationModel::power(2.0, 0.75, 0.8);
  const auto weak = ValuationModel::power(2.0, 0.75, 0.5);
  const auto clock = run_clock(clock_truthful(strong, c.grid), clock_truthful(weak, c.grid), c);
  EXPECT_NEAR(clock.final_price, 0.75, 2 * c.increment);
  EXPECT_DOUBLE_EQ(clock.excess_supply, 0.25);
  const auto cmra = run_cmra(cmra_truthful(strong, c.grid), cmra_truthful(weak, c.grid), c);
  EXPECT_NEAR(cmra.final_price, 0.5 / 0.75, 2 * c.increment);
  EXPECT_DOUBLE_EQ(cmra.quantity[0], 0.75);
  EXPECT_DOUBLE_EQ(cmra.quantity[1], 0.25);
  EXPECT_LT(cmra.revenue, clock.revenue);
}

TEST(CmraProperty, HalvingIncrementConverges)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta(0.2, 1.0);
  std::uniform_real_distribution<double> dec_theta(1.0, 1.5);
  for (int i = 0; i < 20; ++i) {
    const bool dec = i % 2 == 0;
    const double cap = dec ? 0.9 : 0.75;
    const auto m1 = dec ? ValuationModel::quadratic(dec_theta(rng), 0.5) : ValuationModel::power(2.0, cap, theta(rng));
    const auto m2 = dec ? ValuationModel::quadratic(dec_theta(rng), 0.5) : ValuationModel::power(2.0, cap, theta(rng));
    const StrategyTag tag = i % 4 < 2 ? StrategyTag::CmraTruthful : StrategyTag::Constant;
    AuctionConfig c{QuantityGrid(dec ? 100 : 8, cap)};
    c.max_price = 10.0;
    c.refine = false;
    c.increment = 0.01;
    double previous = std::nan("");
    for (int h = 0; h < 4; ++h) {
      const auto o = run_cmra(make_strategy(tag, m1, c.grid), make_strategy(tag, m2, c.grid), c);
      ASSERT_EQ(o.termination, Termination::Closed);
      if (!std::isnan(previous)) {
        EXPECT_LE(std::abs(o.final_price - previous), 2 * c.increment + 1e-12) << "scenario " << i;
      }
      previous = o.final_price;
      c.increment /= 2;
    }
  }
}

TEST(Clock, ExcessSupplyStaysUnallocated)
{
  const auto c = lots_config();
  const auto o = run_clock(clock_truthful(kLots, c.grid), clock_truthful(kLots, c.grid), c);
  EXPECT_EQ(o.quantity_index[0] + o.quantity_index[1], 3);
  EXPECT_EQ(o.kind[1], std::nullopt);
}
