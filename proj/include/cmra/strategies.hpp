#pragma once

#include "cmra/bidbook.hpp"
#include "cmra/grid.hpp"
#include "cmra/valuation.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmra {

struct EmissionContext
{
  double price = 0.0;
  int round = 1;
  /// Clock of the last recorded round; empty in round one.
  std::optional<double> previous_price;

  /// True in the first round whose clock reaches `threshold`.
  bool crosses(double threshold) const { return price >= threshold && (!previous_price || *previous_price < threshold); }
};

struct Emission
{
  GridIndex headline = 0;
  std::vector<AdditionalBid> additional;
};

enum class StrategyTag
{
  ClockTruthful,
  CmraTruthful,
  Constant,
  Rdr,
};

std::string_view to_string(StrategyTag t);
StrategyTag strategy_tag_from_string(std::string_view s);

/// Proxy strategy: a price-indexed plan of headline demands and additional bids.
/// Immutable and cheap to copy.
class Strategy
{
public:
  class Impl
  {
  public:
    virtual ~Impl() = default;
    virtual void emit(const EmissionContext& ctx, Emission& out) const = 0;
    virtual std::string describe() const = 0;
  };

  explicit Strategy(std::shared_ptr<const Impl> impl);

  /// Overwrites `out` with this round's submissions.
  void emit(const EmissionContext& ctx, Emission& out) const;
  Emission emit(const EmissionContext& ctx) const;
  std::string describe() const { return impl_->describe(); }

private:
  std::shared_ptr<const Impl> impl_;
};

/// Truthful headline demand on the grid, no additional bids.
Strategy clock_truthful(const ValuationModel& model, const QuantityGrid& grid);
/// Truthful headline plus A(x) = U(x) - V(p) wherever that is non-negative.
Strategy cmra_truthful(const ValuationModel& model, const QuantityGrid& grid);
/// Headline cap while U(cap) >= p*cap, then 0; one zero bid on 1 - cap at the final price.
Strategy constant_strategy(const ValuationModel& model, const QuantityGrid& grid);
/// Constant strategy plus a zero bid on one half in round one.
Strategy rdr_strategy(const ValuationModel& model, const QuantityGrid& grid);
Strategy make_strategy(StrategyTag tag, const ValuationModel& model, const QuantityGrid& grid);

/// Base plan with headline demand limited to `quantity` from clock `price` on.
Strategy headline_drop(Strategy base, double price, GridIndex quantity);
/// Base headline path, no base additional bids, and one package bid placed
/// in the first round whose clock reaches `price`.
Strategy single_package(Strategy base, GridIndex quantity, Money amount, double price);

/// Final price p^f on the grid: (U(cap) - U(1 - cap)) / cap.
double grid_final_price(const GridValues& values, const QuantityGrid& grid);

}  // namespace cmra
