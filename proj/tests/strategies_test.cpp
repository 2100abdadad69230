#include "cmra/strategies.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cmra;

namespace {

const auto kLots = ValuationModel::polynomial({120.0, 0.0, 0.0}, Regime::NonDecreasing);
const QuantityGrid kGrid(4, 0.75);

Money whole(long v)
{
  return Money::from_units(v * Money::kUnitsPerCurrency);
}

std::optional<Money> bid_on(const Emission& e, GridIndex k)
{
  const auto it = std::find_if(e.additional.begin(), e.additional.end(), [&](const auto& b) { return b.quantity == k; });
  return it == e.additional.end() ? std::nullopt : std::optional(it->amount);
}

}  // namespace

TEST(Strategies, TagsRoundTrip)
{
  for (auto t : {StrategyTag::ClockTruthful, StrategyTag::CmraTruthful, StrategyTag::Constant, StrategyTag::Rdr}) {
    EXPECT_EQ(strategy_tag_from_string(to_string(t)), t);
  }
  EXPECT_ANY_THROW((void)strategy_tag_from_string("spite"));
}

TEST(Strategies, ClockTruthfulHasNoAdditionalBids)
{
  const auto s = clock_truthful(kLots, kGrid);
  const auto e = s.emit({40.0, 2, 36.0});
  EXPECT_EQ(e.headline, 3);
  EXPECT_TRUE(e.additional.empty());
  EXPECT_EQ(s.emit({124.0, 2, 120.0}).headline, 0);
}

TEST(Strategies, CmraTruthfulBidsIndifferenceAmounts)
{
  const auto s = cmra_truthful(kLots, kGrid);
  // p = 80 per share: V = 90 - 60 = 30; U(1) - V = 0 on one lot, 30 on two.
  const auto e = s.emit({80.0, 21, 76.0});
  EXPECT_EQ(e.headline, 3);
  EXPECT_EQ(bid_on(e, 1), Money::zero());
  EXPECT_EQ(bid_on(e, 2), whole(30));
  // Below the indifference point the one-lot package has negative slack and is skipped.
  EXPECT_FALSE(bid_on(s.emit({40.0, 11, 36.0}), 1));
}

TEST(Strategies, ConstantBidsZeroOnResidualAtFinalPrice)
{
  const auto s = constant_strategy(kLots, kGrid);
  EXPECT_FALSE(bid_on(s.emit({76.0, 20, 72.0}), 1));
  const auto at = s.emit({80.0, 21, 76.0});
  EXPECT_EQ(at.headline, 3);
  EXPECT_EQ(bid_on(at, 1), Money::zero());
  EXPECT_FALSE(bid_on(s.emit({84.0, 22, 80.0}), 1));
  EXPECT_EQ(s.emit({124.0, 32, 120.0}).headline, 0);
}

TEST(Strategies, RdrBidsHalfInFirstRound)
{
  const auto s = rdr_strategy(kLots, kGrid);
  EXPECT_EQ(bid_on(s.emit({0.0, 1, std::nullopt}), 2), Money::zero());
  EXPECT_FALSE(bid_on(s.emit({4.0, 2, 0.0}), 2));
}

TEST(Strategies, HeadlineDropLimitsDemandFromPrice)
{
  const auto s = headline_drop(clock_truthful(kLots, kGrid), 20.0, 1);
  EXPECT_EQ(s.emit({16.0, 5, 12.0}).headline, 3);
  EXPECT_EQ(s.emit({20.0, 6, 16.0}).headline, 1);
  EXPECT_EQ(s.emit({124.0, 32, 120.0}).headline, 0);
}

TEST(Strategies, SinglePackageReplacesAdditionalBids)
{
  const auto s = single_package(cmra_truthful(kLots, kGrid), 1, whole(5), 30.0);
  EXPECT_TRUE(s.emit({80.0, 21, 76.0}).additional.empty());
  const auto e = s.emit({32.0, 9, 28.0});
  ASSERT_EQ(e.additional.size(), 1u);
  EXPECT_EQ(e.additional[0].quantity, 1);
  EXPECT_EQ(e.additional[0].amount, whole(5));
}

TEST(Strategies, GridFinalPrice)
{
  EXPECT_DOUBLE_EQ(grid_final_price(GridValues(kLots, kGrid), kGrid), 80.0);
}
