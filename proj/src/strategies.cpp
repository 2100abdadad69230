#include "cmra/strategies.hpp"

#include "cmra/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmra {

namespace {

double tie_tolerance(double scale)
{
  return 1e-12 * std::max(1.0, std::abs(scale));
}

class ClockTruthful final : public Strategy::Impl
{
public:
  ClockTruthful(const ValuationModel& model, const QuantityGrid& grid)
    : values_(model, grid)
  {}

  void emit(const EmissionContext& ctx, Emission& out) const override
  {
    out.headline = values_.best_response(ctx.price).quantity;
  }

  std::string describe() const override { return "clock-truthful"; }

private:
  GridValues values_;
};

class CmraTruthful final : public Strategy::Impl
{
public:
  CmraTruthful(const ValuationModel& model, const QuantityGrid& grid)
    : values_(model, grid)
    , resolution_(grid.resolution())
  {}

  void emit(const EmissionContext& ctx, Emission& out) const override
  {
    const auto best = values_.best_response(ctx.price);
    out.headline = best.quantity;
    for (GridIndex k = 0; k <= values_.cap_index(); ++k) {
      if (k == best.quantity) {
        continue;
      }
      const double gap = values_.utility(k) - best.surplus;
      if (gap < -tie_tolerance(values_.utility(k))) {
        continue;
      }
      if (k == 0) {
        out.additional.push_back({0, Money::zero()});
        continue;
      }
      const Money amount = std::min(Money::from_real(std::max(gap, 0.0)), linear_amount(ctx.price, k, resolution_));
      out.additional.push_back({k, amount});
    }
  }

  std::string describe() const override { return "cmra-truthful"; }

private:
  GridValues values_;
  int resolution_;
};

class ConstantPlan final : public Strategy::Impl
{
public:
  ConstantPlan(const ValuationModel& model, const QuantityGrid& grid, bool reduce_first_round)
    : values_(model, grid)
    , cap_(grid.cap())
    , residual_(grid.residual_index())
    , half_(grid.half_index())
    , final_price_(grid_final_price(values_, grid))
    , reduce_(reduce_first_round)
  {}

  void emit(const EmissionContext& ctx, Emission& out) const override
  {
    const double top = values_.utility(values_.cap_index());
    out.headline = top - ctx.price * cap_ >= -tie_tolerance(top) ? values_.cap_index() : 0;
    if (reduce_ && ctx.round == 1) {
      out.additional.push_back({half_, Money::zero()});
    }
    if (ctx.crosses(final_price_)) {
      out.additional.push_back({residual_, Money::zero()});
    }
  }

  std::string describe() const override { return reduce_ ? "rdr" : "constant"; }

private:
  GridValues values_;
  double cap_;
  GridIndex residual_;
  GridIndex half_;
  double final_price_;
  bool reduce_;
};

class HeadlineDrop final : public Strategy::Impl
{
public:
  HeadlineDrop(Strategy base, double price, GridIndex quantity)
    : base_(std::move(base))
    , price_(price)
    , quantity_(quantity)
  {}

  void emit(const EmissionContext& ctx, Emission& out) const override
  {
    base_.emit(ctx, out);
    if (ctx.price >= price_) {
      out.headline = std::min(out.headline, quantity_);
    }
  }

  std::string describe() const override
  {
    std::ostringstream s;
    s << base_.describe() << "+drop(q=" << price_ << ",y=" << quantity_ << ")";
    return s.str();
  }

private:
  Strategy base_;
  double price_;
  GridIndex quantity_;
};

class SinglePackage final : public Strategy::Impl
{
public:
  SinglePackage(Strategy base, GridIndex quantity, Money amount, double price)
    : base_(std::move(base))
    , quantity_(quantity)
    , amount_(amount)
    , price_(price)
  {}

  void emit(const EmissionContext& ctx, Emission& out) const override
  {
    base_.emit(ctx, out);
    out.additional.clear();
    if (ctx.crosses(price_)) {
      out.additional.push_back({quantity_, amount_});
    }
  }

  std::string describe() const override
  {
    std::ostringstream s;
    s << base_.describe() << "+package(x=" << quantity_ << ",a=" << amount_.to_string() << ",q=" << price_ << ")";
    return s.str();
  }

private:
  Strategy base_;
  GridIndex quantity_;
  Money amount_;
  double price_;
};

}  // namespace

std::string_view to_string(StrategyTag t)
{
  switch (t) {
  case StrategyTag::ClockTruthful:
    return "clock-truthful";
  case StrategyTag::CmraTruthful:
    return "cmra-truthful";
  case StrategyTag::Constant:
    return "constant";
  case StrategyTag::Rdr:
    return "rdr";
  }
  return "?";
}

StrategyTag strategy_tag_from_string(std::string_view s)
{
  for (auto t : {StrategyTag::ClockTruthful, StrategyTag::CmraTruthful, StrategyTag::Constant, StrategyTag::Rdr}) {
    if (to_string(t) == s) {
      return t;
    }
  }
  throw ScenarioError("unknown strategy '" + std::string(s) + "'");
}

Strategy::Strategy(std::shared_ptr<const Impl> impl)
  : impl_(std::move(impl))
{}

void Strategy::emit(const EmissionContext& ctx, Emission& out) const
{
  out.headline = 0;
  out.additional.clear();
  impl_->emit(ctx, out);
}

Emission Strategy::emit(const EmissionContext& ctx) const
{
  Emission out;
  emit(ctx, out);
  return out;
}

double grid_final_price(const GridValues& values, const QuantityGrid& grid)
{
  return (values.utility(grid.cap_index()) - values.utility(grid.residual_index())) / grid.cap();
}

Strategy clock_truthful(const ValuationModel& model, const QuantityGrid& grid)
{
  return Strategy(std::make_shared<ClockTruthful>(model, grid));
}

Strategy cmra_truthful(const ValuationModel& model, const QuantityGrid& grid)
{
  return Strategy(std::make_shared<CmraTruthful>(model, grid));
}

Strategy constant_strategy(const ValuationModel& model, const QuantityGrid& grid)
{
  return Strategy(std::make_shared<ConstantPlan>(model, grid, false));
}

Strategy rdr_strategy(const ValuationModel& model, const QuantityGrid& grid)
{
  return Strategy(std::make_shared<ConstantPlan>(model, grid, true));
}

Strategy make_strategy(StrategyTag tag, const ValuationModel& model, const QuantityGrid& grid)
{
  switch (tag) {
  case StrategyTag::ClockTruthful:
    return clock_truthful(model, grid);
  case StrategyTag::CmraTruthful:
    return cmra_truthful(model, grid);
  case StrategyTag::Constant:
    return constant_strategy(model, grid);
  case StrategyTag::Rdr:
    return rdr_strategy(model, grid);
  }
  throw ScenarioError("unknown strategy tag");
}

Strategy headline_drop(Strategy base, double price, GridIndex quantity)
{
  return Strategy(std::make_shared<HeadlineDrop>(std::move(base), price, quantity));
}

Strategy single_package(Strategy base, GridIndex quantity, Money amount, double price)
{
  return Strategy(std::make_shared<SinglePackage>(std::move(base), quantity, amount, price));
}

}  // namespace cmra
