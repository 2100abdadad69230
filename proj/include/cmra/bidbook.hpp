#pragma once

#include "cmra/error.hpp"
#include "cmra/grid.hpp"
#include "cmra/money.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cmra {

enum class BidKind
{
  Headline,
  Additional,
};

std::string_view to_string(BidKind k);

/// Package bid at or below the linear clock price. The submission price is
/// the clock of the round it is recorded in.
struct AdditionalBid
{
  GridIndex quantity = 0;
  Money amount;

  bool operator==(const AdditionalBid&) const = default;
};

class BidError : public Error
{
public:
  enum class Code
  {
    NonIncreasingPrice,
    NonMonotoneHeadline,
    OverLinearPrice,
    ActivityCapViolation,
    CapExceeded,
    NegativeAmount,
    NonZeroEmptyPackage,
  };

  BidError(Code code, const std::string& what);
  Code code() const { return code_; }

private:
  Code code_;
};

std::string_view to_string(BidError::Code c);

/// One bidder's cumulative bid function B(x; p) on a quantity grid.
///
/// Every grid point holds the running maximum over headline and additional
/// submissions, or nothing when the bidder never bid there.
class BidBook
{
public:
  struct HeadlineStep
  {
    double price;
    GridIndex quantity;
  };

  /// Headline demand fell from `from` to `to` in the round at `price`.
  struct Drop
  {
    double price;
    GridIndex from;
    GridIndex to;
  };

  explicit BidBook(const QuantityGrid& grid);

  /// Validates the whole round first; the book is untouched when it throws.
  void record_round(double clock_price, GridIndex headline, std::span<const AdditionalBid> additional);

  std::optional<Money> bid_at(GridIndex k) const;
  /// Which submission set the current maximum at k.
  std::optional<BidKind> source_at(GridIndex k) const;
  /// Relative cap from past headline drops, or nullopt when no drop spans k.
  std::optional<Money> activity_cap(GridIndex k) const;
  /// Largest additional bid at k that a round at `clock_price` with the given
  /// headline accepts, ignoring that round's other additional bids.
  Money legal_limit(GridIndex k, double clock_price, GridIndex headline) const;

  GridIndex cap_index() const { return cap_index_; }
  int resolution() const { return resolution_; }
  int rounds() const { return static_cast<int>(history_.size()); }
  std::optional<GridIndex> headline() const;
  std::optional<double> last_price() const;
  const std::vector<HeadlineStep>& headline_history() const { return history_; }
  const std::vector<Drop>& drops() const { return drops_; }

private:
  struct Slot
  {
    std::int64_t units = 0;
    bool present = false;
    BidKind kind = BidKind::Headline;
  };

  std::optional<Money> cap_given(GridIndex k, const std::vector<Drop>& drops,
                                 const std::vector<Slot>& tentative) const;

  int resolution_;
  GridIndex cap_index_;
  std::vector<Slot> slots_;
  std::vector<HeadlineStep> history_;
  std::vector<Drop> drops_;
};

/// Linear clock amount p * k / N rounded to money units.
Money linear_amount(double price, GridIndex k, int resolution);

}  // namespace cmra
