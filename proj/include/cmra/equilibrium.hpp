#pragma once

#include "cmra/mechanism.hpp"
#include "cmra/strategies.hpp"
#include "cmra/valuation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cmra {

/// Runs fn(0..count-1) on a worker pool. Results must be written to per-index
/// slots so that any reduction over them is independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

/// Closed-form smallest winning bid on x against an opponent bidding its
/// cap at linear prices: max(0, U_j(cap) - U_j(1 - x)).
double minimal_winning_bid(const ValuationModel& opponent, double x, double cap);
/// Smallest amount on grid point k that makes a pair with the opponent's
/// book revenue-maximizing: max B_j minus the best B_j on the residual.
Money minimal_winning_bid(const BidBook& opponent, GridIndex k);

/// One bidder type space: base.with_theta(theta) for theta on [low, high].
struct TypeFamily
{
  ValuationModel base;
  double cap;
  double theta_low;
  double theta_high;

  ValuationModel at(double theta) const { return base.with_theta(theta); }
};

struct Deviation
{
  enum class Kind
  {
    HeadlineDrop,
    SinglePackage,
  };

  Kind kind = Kind::HeadlineDrop;
  double price = 0.0;
  GridIndex quantity = 0;
  Money amount;

  std::string describe() const;
  auto operator<=>(const Deviation&) const = default;
};

struct SearchConfig
{
  int resolution = 8;
  int type_points = 11;
  int amount_levels = 50;
  int price_levels = 20;
  /// Clock increment as a fraction of the pair's highest choke price.
  double increment_fraction = 1.0 / 40.0;
  double refine_tolerance = 1e-7;
  double tolerance = 1e-4;
  /// Stop searching once some gain exceeds this (refutation mode).
  std::optional<double> stop_above;
  bool both_bidders = true;
  unsigned workers = 0;
};

struct PairReport
{
  double theta1 = 0.0;
  double theta2 = 0.0;
  int deviator = 0;  // 0 or 1
  double baseline = 0.0;
  double best_surplus = 0.0;
  std::optional<Deviation> best;
  double gain = 0.0;
  long runs = 0;
};

struct DeviationReport
{
  StrategyTag profile = StrategyTag::CmraTruthful;
  std::vector<PairReport> pairs;
  /// Pair with the largest gain; ties go to the smaller deviation descriptor.
  PairReport worst;
  double tolerance = 0.0;
  long runs = 0;

  double max_gain() const { return worst.gain; }
  bool equilibrium() const { return worst.gain <= tolerance; }
};

/// Auction settings the search uses for one type pair.
AuctionConfig search_auction(const TypeFamily& family, double theta1, double theta2, const SearchConfig& config);

/// Deviator surplus when `deviator` plays `dev` on top of the profile strategy.
double deviation_surplus(StrategyTag profile, const TypeFamily& family, double theta1, double theta2, int deviator,
                         const std::optional<Deviation>& dev, const SearchConfig& config);

/// Best response search over headline drops and single package bids for
/// every type pair on the grid.
DeviationReport check_expost(StrategyTag profile, const TypeFamily& family, const SearchConfig& config);

/// U(cap; theta_high) - U(1/2; theta_high): collusion on halves is a
/// Bayes-Nash equilibrium iff the mean type reaches it.
double rdr_threshold(const ValuationModel& model, double cap, const TypeDistribution& types);

struct IcPoint
{
  double theta = 0.0;
  double collusion = 0.0;
  double deviation = 0.0;
  double slack() const { return collusion - deviation; }
};

struct RdrReport
{
  double threshold = 0.0;
  double mean_type = 0.0;
  std::vector<IcPoint> quadrature;
  /// Type with the smallest slack.
  IcPoint binding;
  bool ic_satisfied = false;

  // Simulated deviation payoff of the binding type against sampled opponents.
  int samples = 0;
  double simulated_mean = 0.0;
  double simulated_stderr = 0.0;
  double simulated_collusion = 0.0;
  bool simulation_agrees = false;
};

struct RdrConfig
{
  int theta_points = 21;
  int resolution = 4;
  double increment_fraction = 1.0 / 40.0;
  double refine_tolerance = 1e-9;
  /// Tolerance on the slack when declaring the constraint satisfied.
  double slack_tolerance = 1e-6;
};

RdrReport check_rdr_bne(const ValuationModel& model, double cap, const TypeDistribution& types, int samples,
                        std::uint64_t seed, const RdrConfig& config = {});

struct VcgPairCheck
{
  double theta1 = 0.0;
  double theta2 = 0.0;
  StrategyTag profile = StrategyTag::CmraTruthful;
  Allocation expected;
  std::array<double, 2> expected_payments{};
  Allocation observed;
  std::array<double, 2> observed_payments{};
  bool allocation_equal = false;
  double payment_error = 0.0;
};

struct VcgReport
{
  std::vector<VcgPairCheck> checks;
  double tolerance = 0.0;
  bool all_match() const;
};

/// Compares CMRA-truthful and constant outcomes with VCG on random type pairs.
VcgReport vcg_equivalence_check(const TypeFamily& family, int pairs, std::uint64_t seed, int resolution,
                                double increment);

struct MatrixCell
{
  StrategyTag strategy;
  Regime regime;
  bool efficient = false;
  std::string verdict;
  double max_gain = 0.0;
};

struct MatrixConfig
{
  TypeFamily decreasing;
  TypeFamily non_decreasing;
  /// Environments for the bidder-collusion cells; must satisfy the normalization.
  ValuationModel rdr_decreasing;
  ValuationModel rdr_non_decreasing;
  TypeDistribution types;
  SearchConfig decreasing_search;
  SearchConfig non_decreasing_search;
};

MatrixConfig default_matrix_config();

/// Strategy x regime classification: efficiency of the outcome and the
/// equilibrium verdict of the deviation search.
std::vector<MatrixCell> classification_matrix(const MatrixConfig& config);

}  // namespace cmra
