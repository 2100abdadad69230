#include "cmra/bidbook.hpp"

#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace cmra;

namespace {

Money m(double v)
{
  return Money::from_real(v);
}

BidError::Code code_of(BidBook& book, double price, GridIndex headline, std::vector<AdditionalBid> add = {})
{
  try {
    book.record_round(price, headline, add);
  } catch (const BidError& e) {
    return e.code();
  }
  ADD_FAILURE() << "round was accepted";
  return BidError::Code::NonIncreasingPrice;
}

}  // namespace

TEST(Money, DecimalFormatting)
{
  EXPECT_EQ(m(90).to_string(), "90");
  EXPECT_EQ(m(0.386711732).to_string(), "0.386711732");
  EXPECT_EQ(Money::from_units(-1'500'000'000).to_string(), "-1.5");
  EXPECT_EQ(linear_amount(80.0, 2, 4), m(40));
}

TEST(BidBook, HeadlineRecordsLinearAmount)
{
  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  book.record_round(0.0, 3, {});
  book.record_round(40.0, 3, {});
  EXPECT_EQ(book.bid_at(3), m(30));
  EXPECT_EQ(book.source_at(3), BidKind::Headline);
  EXPECT_FALSE(book.bid_at(2));
  EXPECT_EQ(book.headline(), 3);
}

TEST(BidBook, ZeroHeadlineRecordsEmptyPackage)
{
  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  book.record_round(10.0, 0, {});
  EXPECT_EQ(book.bid_at(0), Money::zero());
}

TEST(BidBook, RunningMaxKeepsOlderOnTies)
{
  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  const AdditionalBid low{1, m(5)};
  book.record_round(40.0, 3, std::span(&low, 1));
  EXPECT_EQ(book.source_at(1), BidKind::Additional);
  book.record_round(60.0, 3, {});
  const AdditionalBid same{1, m(5)};
  book.record_round(80.0, 3, std::span(&same, 1));
  EXPECT_EQ(book.bid_at(1), m(5));
  book.record_round(100.0, 1, {});
  EXPECT_EQ(book.bid_at(1), m(25));
  EXPECT_EQ(book.source_at(1), BidKind::Headline);
}

TEST(BidBook, RejectsIllegalRoundsWithoutMutation)
{
  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  book.record_round(40.0, 2, {});
  EXPECT_EQ(code_of(book, 40.0, 2), BidError::Code::NonIncreasingPrice);
  EXPECT_EQ(code_of(book, 50.0, 3), BidError::Code::NonMonotoneHeadline);
  EXPECT_EQ(code_of(book, 50.0, 2, {{1, m(13)}}), BidError::Code::OverLinearPrice);
  EXPECT_EQ(code_of(book, 50.0, 2, {{4, m(1)}}), BidError::Code::CapExceeded);
  EXPECT_EQ(code_of(book, 50.0, 2, {{1, m(-1)}}), BidError::Code::NegativeAmount);
  EXPECT_EQ(code_of(book, 50.0, 2, {{0, m(1)}}), BidError::Code::NonZeroEmptyPackage);
  EXPECT_EQ(book.rounds(), 1);
  EXPECT_FALSE(book.bid_at(1));
}

TEST(BidBook, ActivityCapFollowsHeadlineDrop)
{
  const QuantityGrid g(4, 0.75);
  BidBook book(g);
  book.record_round(40.0, 3, {});
  book.record_round(60.0, 1, {});
  // Between the drop target and origin: B(1) + 60 * (k - 1) / 4.
  ASSERT_TRUE(book.activity_cap(2));
  EXPECT_EQ(*book.activity_cap(2), m(15 + 15));
  EXPECT_FALSE(book.activity_cap(3));
  EXPECT_EQ(code_of(book, 80.0, 1, {{2, m(36)}}), BidError::Code::ActivityCapViolation);
  const AdditionalBid ok{2, m(30)};
  book.record_round(80.0, 1, std::span(&ok, 1));
  EXPECT_EQ(book.bid_at(2), m(30));
  EXPECT_EQ(book.legal_limit(2, 100.0, 1), m(20 + 20));
}

TEST(BidBookProperty, RandomLegalSequencesAccumulateMonotonically)
{
  std::mt19937_64 rng(20240229);
  for (int seq = 0; seq < 10000; ++seq) {
    const QuantityGrid g(std::uniform_int_distribution<int>(4, 20)(rng), gen::cap_for(rng));
    BidBook book(g);
    double price = 0.0;
    const int rounds = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int r = 0; r < rounds; ++r) {
      std::vector<std::optional<Money>> before;
      for (GridIndex k = 0; k <= g.cap_index(); ++k) {
        before.push_back(book.bid_at(k));
      }
      const auto input = gen::legal_round(book, rng, price);
      ASSERT_NO_THROW(book.record_round(input.price, input.headline, input.additional));
      for (GridIndex k = 0; k <= g.cap_index(); ++k) {
        const auto now = book.bid_at(k);
        const auto& was = before[static_cast<std::size_t>(k)];
        if (was) {
          ASSERT_TRUE(now);
          ASSERT_GE(*now, *was);
        }
        if (now) {
          ASSERT_LE(*now, linear_amount(price, k, g.resolution()));
          ASSERT_GE(now->units(), 0);
        }
      }
      for (const auto& bid : input.additional) {
        if (const auto cap = book.activity_cap(bid.quantity)) {
          ASSERT_LE(bid.amount.units(), cap->units() + 1);
        }
      }
      ASSERT_EQ(book.bid_at(input.headline).value_or(Money::from_units(-1)) >=
                  linear_amount(price, input.headline, g.resolution()),
                true);
      price += std::uniform_real_distribution<double>(0.001, 0.3)(rng);
    }
    const auto& h = book.headline_history();
    for (std::size_t i = 1; i < h.size(); ++i) {
      ASSERT_LT(h[i - 1].price, h[i].price);
      ASSERT_GE(h[i - 1].quantity, h[i].quantity);
    }
  }
}
