#pragma once

#include "cmra/grid.hpp"

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cmra {

enum class Family
{
  QuadraticDecreasing,  ///< U(x) = theta*x - curvature*x^2
  Power,                ///< U(x) = theta*x^alpha / (cap^alpha - (1-cap)^alpha)
  CustomPolynomial,     ///< U(x) = theta*(c1*x + c2*x^2 + c3*x^3)
};

enum class Regime
{
  Decreasing,
  NonDecreasing,
};

std::string_view to_string(Family f);
std::string_view to_string(Regime r);
Family family_from_string(std::string_view s);
Regime regime_from_string(std::string_view s);

/// Parametric utility U(x; theta) on quantity shares x in [0, 1].
///
/// Every family is linear in theta. The regime is implied by the family
/// parameters except for custom polynomials, where it is declared and then
/// checked by validate().
class ValuationModel
{
public:
  static ValuationModel quadratic(double theta, double curvature);
  static ValuationModel power(double alpha, double normalization_cap, double theta);
  static ValuationModel polynomial(std::array<double, 3> coefficients, Regime regime, double theta = 1.0);

  Family family() const { return family_; }
  Regime regime() const { return regime_; }
  double theta() const { return theta_; }
  /// Family shape parameters: {curvature} | {alpha, normalization cap} | {c1, c2, c3}.
  const std::array<double, 3>& parameters() const { return params_; }

  ValuationModel with_theta(double theta) const;

  double value(double x) const;
  double marginal(double x) const;
  double marginal_slope(double x) const;
  /// dU/dtheta; the families are linear in theta so this is U at theta = 1.
  double value_per_theta(double x) const;

  /// U(cap) - U(1-cap) == theta, the normalization the collusion threshold relies on.
  bool normalized(double cap) const;

  /// Checks positivity, the declared regime and monotonicity in theta on a
  /// 1e-3 grid over (0, cap]. Throws AssumptionViolation.
  void validate(double cap) const;

  bool operator==(const ValuationModel&) const = default;

private:
  ValuationModel(Family f, Regime r, double theta, std::array<double, 3> params);

  Family family_;
  Regime regime_;
  double theta_;
  std::array<double, 3> params_;
};

/// Type distribution over [low, high]; uniform or a weighted discrete grid.
class TypeDistribution
{
public:
  static TypeDistribution uniform(double low, double high);
  static TypeDistribution discrete(std::vector<double> points, std::vector<double> weights);

  bool is_uniform() const { return points_.empty(); }
  double low() const { return low_; }
  double high() const { return high_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  double cdf(double theta) const;
  double mean() const;
  /// Integral of t dF(t) over [low, theta].
  double partial_mean(double theta) const;
  double sample(std::mt19937_64& rng) const;

private:
  double low_ = 0.0;
  double high_ = 1.0;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Two bidders with a common cap on the divisible unit supply.
class MarketEnv
{
public:
  MarketEnv(double cap, ValuationModel bidder1, ValuationModel bidder2,
            TypeDistribution types = TypeDistribution::uniform(0.0, 1.0));

  double cap() const { return cap_; }
  const ValuationModel& bidder(int i) const { return bidders_.at(static_cast<std::size_t>(i)); }
  const TypeDistribution& types() const { return types_; }
  Regime regime() const { return bidders_[0].regime(); }

  MarketEnv with_thetas(double theta1, double theta2) const;

private:
  double cap_;
  std::array<ValuationModel, 2> bidders_;
  TypeDistribution types_;
};

struct Allocation
{
  double x1 = 0.0;
  double x2 = 0.0;
};

struct VcgOutcome
{
  Allocation allocation;
  std::array<double, 2> payments{};
};

double value(const ValuationModel& model, double x);
/// V(p) = max over x in [0, cap] of U(x) - p x.
double indirect_surplus(const ValuationModel& model, double price, double cap);
/// Surplus-maximizing quantity; in the non-decreasing regime ties at U(cap) = p*cap demand the cap.
double truthful_demand(const ValuationModel& model, double price, double cap);
/// Price at which winning the cap at linear prices equals winning 1 - cap for free.
double final_price(const ValuationModel& model, double cap);
Allocation efficient_allocation(const MarketEnv& env);
VcgOutcome vcg_outcome(const MarketEnv& env);

/// Utilities tabulated on a quantity grid; the grid counterpart of the
/// closed-form surplus and demand used by the proxy strategies.
class GridValues
{
public:
  GridValues(const ValuationModel& model, const QuantityGrid& grid);

  double utility(GridIndex k) const { return utilities_[static_cast<std::size_t>(k)]; }
  GridIndex cap_index() const { return cap_index_; }
  double share(GridIndex k) const { return step_ * k; }

  struct Best
  {
    double surplus;
    GridIndex quantity;
  };
  /// max over grid points k <= cap of U(x_k) - p x_k; ties go to the larger quantity.
  Best best_response(double price) const;
  /// Highest average value per unit over the grid, above which nothing is demanded.
  double choke_price() const;

private:
  std::vector<double> utilities_;
  GridIndex cap_index_;
  double step_;
};

}  // namespace cmra
