#include "cmra/valuation.hpp"

#include "cmra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cmra {

namespace {

constexpr double kRootTolerance = 1e-10;
constexpr double kValidationStep = 1e-3;

void check_share(double x)
{
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "quantity share " << x << " outside [0, 1]";
    throw DomainError(msg.str());
  }
}

void check_price(double p)
{
  if (!(p >= 0.0)) {
    std::ostringstream msg;
    msg << "price " << p << " is negative";
    throw DomainError(msg.str());
  }
}

double power_denominator(double alpha, double cap)
{
  return std::pow(cap, alpha) - std::pow(1.0 - cap, alpha);
}

}  // namespace

std::string_view to_string(Family f)
{
  switch (f) {
  case Family::QuadraticDecreasing:
    return "quadratic-decreasing";
  case Family::Power:
    return "power";
  case Family::CustomPolynomial:
    return "custom-polynomial";
  }
  return "?";
}

std::string_view to_string(Regime r)
{
  return r == Regime::Decreasing ? "decreasing" : "non-decreasing";
}

Family family_from_string(std::string_view s)
{
  if (s == "quadratic-decreasing") {
    return Family::QuadraticDecreasing;
  }
  if (s == "power") {
    return Family::Power;
  }
  if (s == "custom-polynomial") {
    return Family::CustomPolynomial;
  }
  throw ScenarioError("unknown valuation family '" + std::string(s) + "'");
}

Regime regime_from_string(std::string_view s)
{
  if (s == "decreasing") {
    return Regime::Decreasing;
  }
  if (s == "non-decreasing") {
    return Regime::NonDecreasing;
  }
  throw ScenarioError("unknown regime '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// ValuationModel

ValuationModel::ValuationModel(Family f, Regime r, double theta, std::array<double, 3> params)
  : family_(f)
  , regime_(r)
  , theta_(theta)
  , params_(params)
{}

ValuationModel ValuationModel::quadratic(double theta, double curvature)
{
  if (!(curvature > 0.0)) {
    throw AssumptionViolation("quadratic family needs positive curvature");
  }
  return ValuationModel(Family::QuadraticDecreasing, Regime::Decreasing, theta, {curvature, 0.0, 0.0});
}

ValuationModel ValuationModel::power(double alpha, double normalization_cap, double theta)
{
  if (!(alpha > 0.0)) {
    throw AssumptionViolation("power family needs alpha > 0");
  }
  if (!(normalization_cap > 0.5 && normalization_cap < 1.0)) {
    throw DomainError("power family normalization cap must lie in (1/2, 1)");
  }
  if (!(theta > 0.0)) {
    throw AssumptionViolation("power family needs theta > 0");
  }
  const Regime r = alpha < 1.0 ? Regime::Decreasing : Regime::NonDecreasing;
  return ValuationModel(Family::Power, r, theta, {alpha, normalization_cap, 0.0});
}

ValuationModel ValuationModel::polynomial(std::array<double, 3> coefficients, Regime regime, double theta)
{
  if (!(theta > 0.0)) {
    throw AssumptionViolation("custom polynomial needs theta > 0");
  }
  return ValuationModel(Family::CustomPolynomial, regime, theta, coefficients);
}

ValuationModel ValuationModel::with_theta(double theta) const
{
  ValuationModel copy = *this;
  copy.theta_ = theta;
  return copy;
}

double ValuationModel::value(double x) const
{
  check_share(x);
  switch (family_) {
  case Family::QuadraticDecreasing:
    return theta_ * x - params_[0] * x * x;
  case Family::Power:
    return theta_ * std::pow(x, params_[0]) / power_denominator(params_[0], params_[1]);
  case Family::CustomPolynomial:
    return theta_ * x * (params_[0] + x * (params_[1] + x * params_[2]));
  }
  return 0.0;
}

double ValuationModel::marginal(double x) const
{
  check_share(x);
  switch (family_) {
  case Family::QuadraticDecreasing:
    return theta_ - 2.0 * params_[0] * x;
  case Family::Power: {
    const double alpha = params_[0];
    if (x == 0.0 && alpha < 1.0) {
      return std::numeric_limits<double>::infinity();
    }
    return theta_ * alpha * std::pow(x, alpha - 1.0) / power_denominator(alpha, params_[1]);
  }
  case Family::CustomPolynomial:
    return theta_ * (params_[0] + x * (2.0 * params_[1] + 3.0 * x * params_[2]));
  }
  return 0.0;
}

double ValuationModel::marginal_slope(double x) const
{
  check_share(x);
  switch (family_) {
  case Family::QuadraticDecreasing:
    return -2.0 * params_[0];
  case Family::Power: {
    const double alpha = params_[0];
    if (x == 0.0 && alpha < 2.0 && alpha != 1.0) {
      return alpha < 1.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    }
    return theta_ * alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0) / power_denominator(alpha, params_[1]);
  }
  case Family::CustomPolynomial:
    return theta_ * (2.0 * params_[1] + 6.0 * x * params_[2]);
  }
  return 0.0;
}

double ValuationModel::value_per_theta(double x) const
{
  check_share(x);
  if (family_ == Family::QuadraticDecreasing) {
    return x;
  }
  return with_theta(1.0).value(x);
}

bool ValuationModel::normalized(double cap) const
{
  const double gap = value(cap) - value(1.0 - cap);
  return std::abs(gap - theta_) <= 1e-9 * std::max(1.0, std::abs(theta_));
}

void ValuationModel::validate(double cap) const
{
  const auto fail = [&](const std::string& what, double x) {
    std::ostringstream msg;
    msg << to_string(family_) << " valuation (theta=" << theta_ << ") violates " << what << " at x=" << x;
    throw AssumptionViolation(msg.str());
  };
  const int steps = static_cast<int>(std::ceil(cap / kValidationStep));
  for (int k = 1; k <= steps; ++k) {
    const double x = std::min(cap, k * kValidationStep);
    if (!(marginal(x) > 0.0)) {
      fail("strictly positive marginal values", x);
    }
    const double slope = marginal_slope(x);
    if (regime_ == Regime::Decreasing && !(slope < 0.0)) {
      fail("strictly decreasing marginal values", x);
    }
    if (regime_ == Regime::NonDecreasing && slope < -1e-12) {
      fail("non-decreasing marginal values", x);
    }
    if (!(value_per_theta(x) > 0.0)) {
      fail("values increasing in the type", x);
    }
  }
}

// ---------------------------------------------------------------------------
// TypeDistribution

TypeDistribution TypeDistribution::uniform(double low, double high)
{
  if (!(high > low)) {
    throw DomainError("uniform type support needs low < high");
  }
  TypeDistribution d;
  d.low_ = low;
  d.high_ = high;
  return d;
}

TypeDistribution TypeDistribution::discrete(std::vector<double> points, std::vector<double> weights)
{
  if (points.empty() || points.size() != weights.size()) {
    throw DomainError("discrete type grid needs matching non-empty points and weights");
  }
  if (!std::is_sorted(points.begin(), points.end())) {
    throw DomainError("discrete type grid points must be sorted");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0.0; })) {
    throw DomainError("discrete type weights must be non-negative with positive sum");
  }
  TypeDistribution d;
  d.low_ = points.front();
  d.high_ = points.back();
  for (auto& w : weights) {
    w /= total;
  }
  d.points_ = std::move(points);
  d.weights_ = std::move(weights);
  return d;
}

double TypeDistribution::cdf(double theta) const
{
  if (is_uniform()) {
    return std::clamp((theta - low_) / (high_ - low_), 0.0, 1.0);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < points_.size() && points_[i] <= theta; ++i) {
    acc += weights_[i];
  }
  return acc;
}

double TypeDistribution::mean() const
{
  return partial_mean(high_);
}

double TypeDistribution::partial_mean(double theta) const
{
  if (!is_uniform()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] <= theta; ++i) {
      acc += points_[i] * weights_[i];
    }
    return acc;
  }
  const double upper = std::clamp(theta, low_, high_);
  if (upper <= low_) {
    return 0.0;
  }
  // Composite Simpson on t * f(t); exact for the uniform density.
  const int intervals = 2000;
  const double h = (upper - low_) / intervals;
  const double density = 1.0 / (high_ - low_);
  double acc = low_ * density + upper * density;
  for (int k = 1; k < intervals; ++k) {
    const double t = low_ + k * h;
    acc += (k % 2 == 1 ? 4.0 : 2.0) * t * density;
  }
  return acc * h / 3.0;
}

double TypeDistribution::sample(std::mt19937_64& rng) const
{
  if (is_uniform()) {
    std::uniform_real_distribution<double> dist(low_, high_);
    return dist(rng);
  }
  std::discrete_distribution<std::size_t> dist(weights_.begin(), weights_.end());
  return points_[dist(rng)];
}

// ---------------------------------------------------------------------------
// MarketEnv

MarketEnv::MarketEnv(double cap, ValuationModel bidder1, ValuationModel bidder2, TypeDistribution types)
  : cap_(cap)
  , bidders_{std::move(bidder1), std::move(bidder2)}
  , types_(std::move(types))
{
  if (!(cap > 0.5 && cap < 1.0)) {
    throw DomainError("cap must lie in (1/2, 1)");
  }
  if (bidders_[0].regime() != bidders_[1].regime()) {
    throw AssumptionViolation("both bidders must share the same marginal-value regime");
  }
  for (const auto& b : bidders_) {
    b.validate(cap);
  }
  if (regime() == Regime::Decreasing) {
    for (int i = 0; i < 2; ++i) {
      const auto& own = bidders_[static_cast<std::size_t>(i)];
      const auto& other = bidders_[static_cast<std::size_t>(1 - i)];
      if (!(own.marginal(cap) < other.marginal(1.0 - cap))) {
        throw AssumptionViolation("decreasing regime requires u_i(cap) < u_j(1 - cap) for both bidders");
      }
    }
  }
}

MarketEnv MarketEnv::with_thetas(double theta1, double theta2) const
{
  return MarketEnv(cap_, bidders_[0].with_theta(theta1), bidders_[1].with_theta(theta2), types_);
}

// ---------------------------------------------------------------------------
// Closed-form quantities

double value(const ValuationModel& model, double x)
{
  return model.value(x);
}

double truthful_demand(const ValuationModel& model, double price, double cap)
{
  check_price(price);
  if (model.regime() == Regime::NonDecreasing) {
    return model.value(cap) - price * cap >= 0.0 ? cap : 0.0;
  }
  if (model.marginal(cap) >= price) {
    return cap;
  }
  if (model.marginal(0.0) <= price) {
    return 0.0;
  }
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (model.marginal(mid) > price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double indirect_surplus(const ValuationModel& model, double price, double cap)
{
  const double x = truthful_demand(model, price, cap);
  return std::max(0.0, model.value(x) - price * x);
}

double final_price(const ValuationModel& model, double cap)
{
  return (model.value(cap) - model.value(1.0 - cap)) / cap;
}

Allocation efficient_allocation(const MarketEnv& env)
{
  const double cap = env.cap();
  const auto& u1 = env.bidder(0);
  const auto& u2 = env.bidder(1);
  if (env.regime() == Regime::NonDecreasing) {
    const double first_strong = u1.value(cap) + u2.value(1.0 - cap);
    const double second_strong = u1.value(1.0 - cap) + u2.value(cap);
    if (first_strong >= second_strong) {
      return {cap, 1.0 - cap};
    }
    return {1.0 - cap, cap};
  }
  const auto gap = [&](double x) { return u1.marginal(x) - u2.marginal(1.0 - x); };
  double lo = 1.0 - cap;
  double hi = cap;
  if (!(gap(lo) > 0.0) || !(gap(hi) < 0.0)) {
    throw AssumptionViolation("efficient split is not interior: u1(x) = u2(1-x) has no root in (1-cap, cap)");
  }
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x1 = 0.5 * (lo + hi);
  return {x1, 1.0 - x1};
}

VcgOutcome vcg_outcome(const MarketEnv& env)
{
  VcgOutcome out;
  out.allocation = efficient_allocation(env);
  const double cap = env.cap();
  // Each bidder pays the value the other would lose: alone, the other takes the cap.
  out.payments[0] = env.bidder(1).value(cap) - env.bidder(1).value(out.allocation.x2);
  out.payments[1] = env.bidder(0).value(cap) - env.bidder(0).value(out.allocation.x1);
  return out;
}

// ---------------------------------------------------------------------------
// GridValues

GridValues::GridValues(const ValuationModel& model, const QuantityGrid& grid)
  : cap_index_(grid.cap_index())
  , step_(1.0 / grid.resolution())
{
  utilities_.reserve(static_cast<std::size_t>(cap_index_) + 1);
  for (GridIndex k = 0; k <= cap_index_; ++k) {
    utilities_.push_back(model.value(grid.share(k)));
  }
}

GridValues::Best GridValues::best_response(double price) const
{
  Best best{0.0, 0};
  for (GridIndex k = 1; k <= cap_index_; ++k) {
    const double s = utilities_[static_cast<std::size_t>(k)] - price * share(k);
    if (s >= best.surplus - 1e-12 * std::max(1.0, std::abs(s))) {
      best = {std::max(s, best.surplus), k};
    }
  }
  return best;
}

double GridValues::choke_price() const
{
  double best = 0.0;
  for (GridIndex k = 1; k <= cap_index_; ++k) {
    best = std::max(best, utilities_[static_cast<std::size_t>(k)] / share(k));
  }
  return best;
}

}  // namespace cmra
