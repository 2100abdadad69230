#include "cmra/equilibrium.hpp"

#include "cmra/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace cmra {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned workers)
{
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

double minimal_winning_bid(const ValuationModel& opponent, double x, double cap)
{
  return std::max(0.0, opponent.value(cap) - opponent.value(1.0 - x));
}

Money minimal_winning_bid(const BidBook& opponent, GridIndex k)
{
  std::optional<Money> top;
  std::optional<Money> residual;
  const GridIndex room = opponent.resolution() - k;
  for (GridIndex j = 0; j <= opponent.cap_index(); ++j) {
    const auto b = opponent.bid_at(j);
    if (!b) {
      continue;
    }
    if (!top || *b > *top) {
      top = b;
    }
    if (j <= room && (!residual || *b > *residual)) {
      residual = b;
    }
  }
  if (!top) {
    return Money::zero();
  }
  if (!residual) {
    // No opponent bid fits next to k; a pair cannot be formed at any amount.
    return *top;
  }
  return std::max(Money::zero(), *top - *residual);
}

std::string Deviation::describe() const
{
  std::ostringstream s;
  if (kind == Kind::HeadlineDrop) {
    s << "headline-drop(price=" << price << ", quantity=" << quantity << ")";
  } else {
    s << "single-package(quantity=" << quantity << ", amount=" << amount.to_string() << ", price=" << price << ")";
  }
  return s.str();
}

namespace {

std::vector<double> type_grid(const TypeFamily& family, int points)
{
  std::vector<double> out;
  if (points <= 1) {
    out.push_back(family.theta_high);
    return out;
  }
  for (int k = 0; k < points; ++k) {
    out.push_back(family.theta_low + (family.theta_high - family.theta_low) * k / (points - 1));
  }
  return out;
}

double price_scale(const GridValues& a, const GridValues& b)
{
  return std::max(a.choke_price(), b.choke_price());
}

Strategy apply(const Strategy& base, const Deviation& dev)
{
  if (dev.kind == Deviation::Kind::HeadlineDrop) {
    return headline_drop(base, dev.price, dev.quantity);
  }
  return single_package(base, dev.quantity, dev.amount, dev.price);
}

double surplus_of(const AuctionOutcome& out, const ValuationModel& model, int bidder)
{
  if (out.termination != Termination::Closed) {
    return 0.0;
  }
  const auto i = static_cast<std::size_t>(bidder);
  return model.value(out.quantity[i]) - out.payment[i].to_real();
}

// Larger gain first, then the smaller descriptor.
bool improves(double gain, const std::optional<Deviation>& dev, double best_gain, const std::optional<Deviation>& best)
{
  if (gain != best_gain) {
    return gain > best_gain;
  }
  if (!dev) {
    return false;
  }
  return !best || *dev < *best;
}

}  // namespace

AuctionConfig search_auction(const TypeFamily& family, double theta1, double theta2, const SearchConfig& config)
{
  const QuantityGrid grid(config.resolution, family.cap);
  const GridValues v1(family.at(theta1), grid);
  const GridValues v2(family.at(theta2), grid);
  const double scale = price_scale(v1, v2);
  AuctionConfig ac{grid};
  ac.increment = scale * config.increment_fraction;
  ac.start_price = 0.0;
  ac.max_price = 2.0 * scale + ac.increment;
  ac.refine = true;
  ac.refine_tolerance = config.refine_tolerance;
  ac.legalize_emissions = true;
  ac.keep_log = false;
  return ac;
}

double deviation_surplus(StrategyTag profile, const TypeFamily& family, double theta1, double theta2, int deviator,
                         const std::optional<Deviation>& dev, const SearchConfig& config)
{
  const AuctionConfig ac = search_auction(family, theta1, theta2, config);
  const std::array<ValuationModel, 2> models{family.at(theta1), family.at(theta2)};
  std::array<Strategy, 2> s{make_strategy(profile, models[0], ac.grid), make_strategy(profile, models[1], ac.grid)};
  if (dev) {
    s[static_cast<std::size_t>(deviator)] = apply(s[static_cast<std::size_t>(deviator)], *dev);
  }
  const AuctionOutcome out = run_cmra(s[0], s[1], ac);
  return surplus_of(out, models[static_cast<std::size_t>(deviator)], deviator);
}

DeviationReport check_expost(StrategyTag profile, const TypeFamily& family, const SearchConfig& config)
{
  const std::vector<double> thetas = type_grid(family, config.type_points);
  struct Task
  {
    double theta1;
    double theta2;
    int deviator;
  };
  std::vector<Task> tasks;
  for (double t1 : thetas) {
    for (double t2 : thetas) {
      tasks.push_back({t1, t2, 0});
      if (config.both_bidders) {
        tasks.push_back({t1, t2, 1});
      }
    }
  }

  std::vector<PairReport> results(tasks.size());
  std::vector<char> done(tasks.size(), 0);
  std::atomic<bool> stop{false};

  parallel_for(
    tasks.size(),
    [&](std::size_t idx) {
      if (stop) {
        return;
      }
      const Task& task = tasks[idx];
      const AuctionConfig ac = search_auction(family, task.theta1, task.theta2, config);
      const std::array<ValuationModel, 2> models{family.at(task.theta1), family.at(task.theta2)};
      const auto d = static_cast<std::size_t>(task.deviator);
      const std::array<Strategy, 2> base{make_strategy(profile, models[0], ac.grid),
                                         make_strategy(profile, models[1], ac.grid)};
      const double scale = (ac.max_price - ac.increment) / 2.0;

      PairReport rep;
      rep.theta1 = task.theta1;
      rep.theta2 = task.theta2;
      rep.deviator = task.deviator;
      rep.baseline = surplus_of(run_cmra(base[0], base[1], ac), models[d], task.deviator);
      rep.best_surplus = rep.baseline;
      rep.runs = 1;

      const auto evaluate = [&](const Deviation& dev) {
        std::array<Strategy, 2> s = base;
        s[d] = apply(base[d], dev);
        const double surplus = surplus_of(run_cmra(s[0], s[1], ac), models[d], task.deviator);
        ++rep.runs;
        const double gain = surplus - rep.baseline;
        if (improves(gain, dev, rep.gain, rep.best) && gain > 0.0) {
          rep.gain = gain;
          rep.best = dev;
          rep.best_surplus = surplus;
        }
        if (config.stop_above && rep.gain > *config.stop_above) {
          stop = true;
        }
      };

      const int levels = std::max(config.price_levels, 1);
      std::vector<double> prices;
      for (int j = 0; j < levels; ++j) {
        prices.push_back(levels == 1 ? 0.0 : scale * j / (levels - 1));
      }
      const GridIndex cap_index = ac.grid.cap_index();
      for (double q : prices) {
        for (GridIndex y = 0; y < cap_index && !stop; ++y) {
          evaluate({Deviation::Kind::HeadlineDrop, q, y, Money::zero()});
        }
      }
      for (GridIndex k = 1; k <= cap_index && !stop; ++k) {
        for (double q : prices) {
          const double ceiling = q * ac.grid.share(k);
          std::optional<Money> last;
          for (int l = 0; l < config.amount_levels && !stop; ++l) {
            const double frac = config.amount_levels == 1 ? 0.0 : static_cast<double>(l) / (config.amount_levels - 1);
            const Money amount = std::min(Money::from_real(ceiling * frac), linear_amount(q, k, ac.grid.resolution()));
            if (last && amount == *last) {
              continue;
            }
            last = amount;
            evaluate({Deviation::Kind::SinglePackage, q, k, amount});
          }
        }
      }
      results[idx] = rep;
      done[idx] = 1;
    },
    config.workers);

  DeviationReport report;
  report.profile = profile;
  report.tolerance = config.tolerance;
  bool first = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!done[i]) {
      continue;
    }
    report.runs += results[i].runs;
    report.pairs.push_back(results[i]);
    if (first || improves(results[i].gain, results[i].best, report.worst.gain, report.worst.best)) {
      report.worst = results[i];
      first = false;
    }
  }
  return report;
}

double rdr_threshold(const ValuationModel& model, double cap, const TypeDistribution& types)
{
  const ValuationModel top = model.with_theta(types.high());
  if (!top.normalized(cap)) {
    throw AssumptionViolation("collusion threshold needs U(cap) - U(1 - cap) = theta");
  }
  return top.value(cap) - top.value(0.5);
}

RdrReport check_rdr_bne(const ValuationModel& model, double cap, const TypeDistribution& types, int samples,
                        std::uint64_t seed, const RdrConfig& config)
{
  if (samples < 1) {
    throw DomainError("check_rdr_bne needs at least one sample");
  }
  RdrReport rep;
  rep.threshold = rdr_threshold(model, cap, types);
  rep.mean_type = types.mean();

  const int points = std::max(config.theta_points, 2);
  for (int k = 0; k < points; ++k) {
    const double theta = types.low() + (types.high() - types.low()) * k / (points - 1);
    const ValuationModel u = model.with_theta(theta);
    IcPoint pt;
    pt.theta = theta;
    pt.collusion = u.value(0.5);
    pt.deviation = types.cdf(theta) * theta + u.value(1.0 - cap) - types.partial_mean(theta);
    rep.quadrature.push_back(pt);
  }
  rep.binding = rep.quadrature.front();
  for (const auto& pt : rep.quadrature) {
    if (pt.slack() <= rep.binding.slack() + 1e-12) {
      rep.binding = pt;
    }
  }
  rep.ic_satisfied = rep.binding.slack() >= -config.slack_tolerance;

  // Simulate the binding type deviating to the constant plan against
  // opponents that keep the collusive plan.
  const QuantityGrid grid(config.resolution, cap);
  const ValuationModel own = model.with_theta(rep.binding.theta);
  const Strategy deviator = constant_strategy(own, grid);
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double theta_j = std::max(types.sample(rng), 1e-12);
    const ValuationModel other = model.with_theta(theta_j);
    const GridValues v1(own, grid);
    const GridValues v2(other, grid);
    AuctionConfig ac{grid};
    const double scale = price_scale(v1, v2);
    ac.increment = scale * config.increment_fraction;
    ac.max_price = 2.0 * scale + ac.increment;
    ac.refine_tolerance = config.refine_tolerance;
    ac.keep_log = false;
    const AuctionOutcome out = run_cmra(deviator, rdr_strategy(other, grid), ac);
    const double payoff = surplus_of(out, own, 0);
    sum += payoff;
    sum_sq += payoff * payoff;
    if (s == 0) {
      const AuctionOutcome both = run_cmra(rdr_strategy(own, grid), rdr_strategy(other, grid), ac);
      rep.simulated_collusion = surplus_of(both, own, 0);
    }
  }
  rep.samples = samples;
  rep.simulated_mean = sum / samples;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - samples * rep.simulated_mean * rep.simulated_mean) / (samples - 1)) : 0.0;
  rep.simulated_stderr = std::sqrt(var / samples);
  rep.simulation_agrees =
    std::abs(rep.simulated_mean - rep.binding.deviation) <= std::max(3.0 * rep.simulated_stderr, 1e-9);
  return rep;
}

bool VcgReport::all_match() const
{
  return std::all_of(checks.begin(), checks.end(),
                     [&](const VcgPairCheck& c) { return c.allocation_equal && c.payment_error <= tolerance; });
}

VcgReport vcg_equivalence_check(const TypeFamily& family, int pairs, std::uint64_t seed, int resolution,
                                double increment)
{
  VcgReport rep;
  rep.tolerance = 2.0 * increment;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(family.theta_low, family.theta_high);
  const QuantityGrid grid(resolution, family.cap);
  for (int n = 0; n < pairs; ++n) {
    const double t1 = draw(rng);
    const double t2 = draw(rng);
    const MarketEnv env(family.cap, family.at(t1), family.at(t2));
    if (env.regime() != Regime::NonDecreasing) {
      throw AssumptionViolation("payment equivalence is checked for non-decreasing marginal values");
    }
    const VcgOutcome vcg = vcg_outcome(env);
    AuctionConfig ac{grid};
    ac.increment = increment;
    ac.max_price = 1e3 * std::max(1.0, family.theta_high);
    ac.keep_log = false;
    for (StrategyTag tag : {StrategyTag::CmraTruthful, StrategyTag::Constant}) {
      const AuctionOutcome out =
        run_cmra(make_strategy(tag, env.bidder(0), grid), make_strategy(tag, env.bidder(1), grid), ac);
      VcgPairCheck c;
      c.theta1 = t1;
      c.theta2 = t2;
      c.profile = tag;
      c.expected = vcg.allocation;
      c.expected_payments = vcg.payments;
      c.observed = {out.quantity[0], out.quantity[1]};
      c.observed_payments = {out.payment[0].to_real(), out.payment[1].to_real()};
      c.allocation_equal = out.termination == Termination::Closed &&
                           std::abs(c.observed.x1 - c.expected.x1) < 1e-9 &&
                           std::abs(c.observed.x2 - c.expected.x2) < 1e-9;
      c.payment_error = std::max(std::abs(c.observed_payments[0] - c.expected_payments[0]),
                                 std::abs(c.observed_payments[1] - c.expected_payments[1]));
      rep.checks.push_back(c);
    }
  }
  return rep;
}

MatrixConfig default_matrix_config()
{
  SearchConfig dec;
  dec.resolution = 10;
  SearchConfig nondec;
  nondec.resolution = 8;
  return MatrixConfig{
    TypeFamily{ValuationModel::quadratic(1.25, 0.5), 0.9, 1.0, 1.5},
    TypeFamily{ValuationModel::power(2.0, 0.75, 1.0), 0.75, 0.1, 1.0},
    ValuationModel::power(0.5, 0.75, 1.0),
    ValuationModel::power(2.0, 0.75, 1.0),
    TypeDistribution::uniform(0.0, 1.0),
    dec,
    nondec,
  };
}

namespace {

bool grid_efficient(const TypeFamily& family, double t1, double t2, const AuctionOutcome& out, int resolution)
{
  const QuantityGrid grid(resolution, family.cap);
  const GridValues v1(family.at(t1), grid);
  const GridValues v2(family.at(t2), grid);
  double best = -1.0;
  for (GridIndex k1 = 0; k1 <= grid.cap_index(); ++k1) {
    const GridIndex k2 = std::min(grid.cap_index(), grid.resolution() - k1);
    best = std::max(best, v1.utility(k1) + v2.utility(k2));
  }
  if (out.termination != Termination::Closed) {
    return false;
  }
  const double w = v1.utility(out.quantity_index[0]) + v2.utility(out.quantity_index[1]);
  return w >= best - 1e-9 * std::max(1.0, best);
}

}  // namespace

std::vector<MatrixCell> classification_matrix(const MatrixConfig& config)
{
  std::vector<MatrixCell> cells;
  for (Regime regime : {Regime::Decreasing, Regime::NonDecreasing}) {
    const bool dec = regime == Regime::Decreasing;
    const TypeFamily& family = dec ? config.decreasing : config.non_decreasing;
    const SearchConfig& search = dec ? config.decreasing_search : config.non_decreasing_search;
    // Representative asymmetric pair: upper and lower thirds of the support.
    const double span = family.theta_high - family.theta_low;
    const double t1 = family.theta_low + span * 2.0 / 3.0;
    const double t2 = family.theta_low + span / 3.0;
    const AuctionConfig ac = search_auction(family, t1, t2, search);

    for (StrategyTag tag :
         {StrategyTag::ClockTruthful, StrategyTag::CmraTruthful, StrategyTag::Constant, StrategyTag::Rdr}) {
      MatrixCell cell{tag, regime, false, {}, 0.0};
      const AuctionOutcome out =
        run_cmra(make_strategy(tag, family.at(t1), ac.grid), make_strategy(tag, family.at(t2), ac.grid), ac);
      cell.efficient = grid_efficient(family, t1, t2, out, search.resolution);
      if (tag == StrategyTag::Rdr) {
        const ValuationModel& m = dec ? config.rdr_decreasing : config.rdr_non_decreasing;
        const double threshold = rdr_threshold(m, 0.75, config.types);
        std::ostringstream v;
        v << (config.types.mean() >= threshold - 1e-9 ? "BNE" : "not BNE") << " (threshold " << threshold
          << ", mean type " << config.types.mean() << ")";
        cell.verdict = v.str();
      } else {
        const DeviationReport r = check_expost(tag, family, search);
        cell.max_gain = r.max_gain();
        cell.verdict = r.equilibrium() ? "ex-post eqm" : "not eqm";
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace cmra
