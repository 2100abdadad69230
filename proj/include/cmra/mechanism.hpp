#pragma once

#include "cmra/bidbook.hpp"
#include "cmra/grid.hpp"
#include "cmra/money.hpp"
#include "cmra/strategies.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace cmra {

struct AuctionConfig
{
  QuantityGrid grid;
  /// Clock increment per unit share.
  double increment = 1e-3;
  double start_price = 0.0;
  double max_price = 1e6;
  /// Bisect the closing price between the last open and the first closing clock.
  bool refine = true;
  double refine_tolerance = 1e-7;
  /// Clamp emitted headlines and additional bids to what the book accepts
  /// instead of rejecting the round. Used for composed deviation plans.
  bool legalize_emissions = false;
  bool keep_log = true;
};

struct ClosingResult
{
  /// R*: best revenue over bid pairs and single acceptances; zero when nothing was bid.
  Money revenue;
  /// Grid quantities of the accepted pair when the auction can close.
  std::optional<std::pair<GridIndex, GridIndex>> allocation;
};

/// Closing rule. Among revenue-maximizing pairs the one with the larger
/// minimum quantity wins, then the one giving bidder 1 more.
ClosingResult solve_closing(const BidBook& book1, const BidBook& book2);

enum class Termination
{
  Closed,
  MaxPriceHit,
};

std::string_view to_string(Termination t);

struct LogRow
{
  int round;
  double clock_price;
  int bidder;  // 1 or 2
  BidKind kind;
  GridIndex quantity;
  Money amount;
  bool closed;
  Money r_star;
};

struct AuctionOutcome
{
  double final_price = 0.0;
  int resolution = 0;
  std::array<GridIndex, 2> quantity_index{};
  std::array<double, 2> quantity{};
  std::array<Money, 2> payment{};
  std::array<std::optional<BidKind>, 2> kind{};
  Money revenue;
  Termination termination = Termination::Closed;
  int rounds = 0;
  double excess_supply = 0.0;
  std::vector<LogRow> log;
};

AuctionOutcome run_cmra(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config);

/// Plain ascending clock on headline demands with linear prices.
AuctionOutcome run_clock(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config);

struct RevenuePoint
{
  GridIndex x1;
  /// B1(x1) + B2(1 - x1); empty when either side has no bid.
  std::optional<Money> pair;
};

struct RevenueCurve
{
  std::vector<RevenuePoint> points;
  std::array<std::optional<Money>, 2> single;

  std::optional<Money> single_max() const;
  std::optional<Money> pair_max() const;
};

RevenueCurve revenue_curve(const BidBook& book1, const BidBook& book2);

/// Replays both strategies up to and including `clock_price` on the
/// auction's clock ladder, with the last round placed at `clock_price`.
std::pair<BidBook, BidBook> books_at(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config,
                                     double clock_price);

}  // namespace cmra
