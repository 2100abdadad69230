#include "cmra/error.hpp"
#include "cmra/scenario.hpp"

#include <fmt/format.h>

#include <cmath>

namespace cmra {

namespace {

bool near(double a, double b, double tol)
{
  return std::abs(a - b) <= tol;
}

void check(VerifyResult& r, bool ok, std::string line)
{
  r.lines.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", line));
  r.passed = r.passed && ok;
}

VerifyResult lots(const VerifyOptions&)
{
  VerifyResult r{"lots", true, {}, Json::object()};
  const QuantityGrid grid(4, 0.75);
  const auto model = ValuationModel::polynomial({120.0, 0.0, 0.0}, Regime::NonDecreasing);
  AuctionConfig c{grid};
  c.increment = 4.0;
  c.max_price = 1000.0;
  c.refine = false;

  const auto clock = run_clock(clock_truthful(model, grid), clock_truthful(model, grid), c);
  const auto truthful = run_cmra(cmra_truthful(model, grid), cmra_truthful(model, grid), c);
  const auto rdr = run_cmra(rdr_strategy(model, grid), rdr_strategy(model, grid), c);

  check(r, clock.revenue == Money::from_units(90 * Money::kUnitsPerCurrency) && clock.excess_supply == 0.25,
        fmt::format("clock: revenue {} with {} lot(s) unsold", clock.revenue.to_string(), clock.excess_supply * 4));
  check(r,
        truthful.final_price == 80.0 && truthful.revenue == Money::from_units(60 * Money::kUnitsPerCurrency) &&
          truthful.quantity_index[0] + truthful.quantity_index[1] == 4,
        fmt::format("cmra-truthful: per-lot clock {}, revenue {}, lots ({}, {})", truthful.final_price / 4,
                    truthful.revenue.to_string(), truthful.quantity_index[0], truthful.quantity_index[1]));
  check(r,
        rdr.rounds == 1 && rdr.quantity_index[0] == 2 && rdr.quantity_index[1] == 2 && rdr.revenue == Money::zero(),
        fmt::format("rdr: round {}, lots ({}, {}), revenue {}", rdr.rounds, rdr.quantity_index[0],
                    rdr.quantity_index[1], rdr.revenue.to_string()));
  r.details = Json{{"clock", to_json(clock, 4)}, {"cmra_truthful", to_json(truthful, 4)}, {"rdr", to_json(rdr, 4)}};
  return r;
}

double balance_root(const ValuationModel& m1, const ValuationModel& m2, const QuantityGrid& grid, GridIndex k1,
                    GridIndex k2, double lo, double hi)
{
  const GridValues v1(m1, grid);
  const GridValues v2(m2, grid);
  const GridIndex cap = grid.cap_index();
  auto bid = [&](const GridValues& v, GridIndex k, double p) {
    return std::min(v.utility(k) - v.best_response(p).surplus, p * v.share(k));
  };
  auto f = [&](double p) {
    return bid(v1, k1, p) + bid(v2, k2, p) - std::max(bid(v1, cap, p), bid(v2, cap, p));
  };
  if (f(lo) > 0.0 || f(hi) < 0.0) {
    throw DomainError("balance root not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VerifyResult thm1(const VerifyOptions& o)
{
  VerifyResult r{"thm1", true, {}, Json::object()};
  const QuantityGrid grid(o.resolution.value_or(1000), 0.9);
  const double eps = o.increment.value_or(1e-3);
  const auto m1 = ValuationModel::quadratic(1.25, 0.5);
  const auto m2 = ValuationModel::quadratic(1.05, 0.5);
  AuctionConfig c{grid};
  c.increment = eps;
  c.max_price = 10.0;

  const auto clock = run_clock(clock_truthful(m1, grid), clock_truthful(m2, grid), c);
  const auto cmra = run_cmra(cmra_truthful(m1, grid), cmra_truthful(m2, grid), c);
  const double step = 1.0 / grid.resolution();
  const auto eff = efficient_allocation(MarketEnv(0.9, m1, m2, TypeDistribution::uniform(1.0, 1.5)));

  check(r, near(clock.final_price, 0.65, 2 * eps) && clock.termination == Termination::Closed,
        fmt::format("clock-truthful closes at {:.6f} (expected 0.65 within {})", clock.final_price, 2 * eps));
  check(r, near(clock.quantity[0], 0.6, step) && near(clock.quantity[1], 0.4, step),
        fmt::format("clock-truthful allocation ({}, {})", clock.quantity[0], clock.quantity[1]));
  check(r, cmra.final_price < clock.final_price && cmra.revenue.to_real() < clock.final_price,
        fmt::format("cmra-truthful closes at {:.7f} with revenue {} below {:.6f}", cmra.final_price,
                    cmra.revenue.to_string(), clock.final_price));
  check(r, near(cmra.quantity[0], eff.x1, step) && near(cmra.quantity[1], eff.x2, step),
        fmt::format("cmra-truthful allocation ({}, {}), efficient ({:.6f}, {:.6f})", cmra.quantity[0],
                    cmra.quantity[1], eff.x1, eff.x2));
  double root = std::nan("");
  try {
    root = balance_root(m1, m2, grid, cmra.quantity_index[0], cmra.quantity_index[1], 0.0, clock.final_price);
  } catch (const DomainError&) {
  }
  check(r, near(root, cmra.final_price, 1e-6),
        fmt::format("balance root {:.9f} vs closing price {:.9f}", root, cmra.final_price));
  r.details = Json{{"clock", to_json(clock)},
                   {"cmra_truthful", to_json(cmra)},
                   {"balance_root", root},
                   {"continuous_closing_price", 1.05 - std::sqrt(0.38)}};
  return r;
}

VerifyResult thm2(const VerifyOptions& o)
{
  VerifyResult r{"thm2", true, {}, Json::object()};
  const double cap = 0.75;
  const QuantityGrid grid(o.resolution.value_or(8), cap);
  const double eps = o.increment.value_or(1e-3);
  const auto m1 = ValuationModel::power(2.0, cap, 0.8);
  const auto m2 = ValuationModel::power(2.0, cap, 0.5);
  AuctionConfig c{grid};
  c.increment = eps;
  c.max_price = 10.0;

  const auto clock = run_clock(clock_truthful(m1, grid), clock_truthful(m2, grid), c);
  const auto cmra = run_cmra(cmra_truthful(m1, grid), cmra_truthful(m2, grid), c);
  const double clock_expected = std::min(m1.value(cap), m2.value(cap)) / cap;
  const double cmra_expected = std::min(final_price(m1, cap), final_price(m2, cap));

  check(r, near(clock.final_price, clock_expected, 2 * eps) && near(clock.excess_supply, 0.25, 1e-12),
        fmt::format("clock-truthful ends at {:.6f} (expected {:.6f}) with excess supply {}", clock.final_price,
                    clock_expected, clock.excess_supply));
  check(r, near(cmra.final_price, cmra_expected, 2 * eps),
        fmt::format("cmra-truthful closes at {:.6f} (expected {:.6f})", cmra.final_price, cmra_expected));
  check(r, cmra.quantity[0] == cap && cmra.quantity[1] == 1.0 - cap,
        fmt::format("cmra-truthful allocation ({}, {}) clears the market", cmra.quantity[0], cmra.quantity[1]));
  check(r, cmra.revenue < clock.revenue,
        fmt::format("revenue {} below clock revenue {}", cmra.revenue.to_string(), clock.revenue.to_string()));
  r.details = Json{{"clock", to_json(clock)}, {"cmra_truthful", to_json(cmra)}};
  return r;
}

SearchConfig search_config(SearchConfig base, const VerifyOptions& o)
{
  if (o.resolution) {
    base.resolution = *o.resolution;
  }
  if (o.increment) {
    base.increment_fraction = *o.increment;
  }
  if (o.tolerance) {
    base.tolerance = *o.tolerance;
  }
  if (o.type_points) {
    base.type_points = *o.type_points;
  }
  return base;
}

constexpr double kRefutationGain = 1e-3;

void expost(VerifyResult& r, StrategyTag tag, Regime regime, bool expect_equilibrium, const VerifyOptions& o)
{
  const MatrixConfig mc = default_matrix_config();
  const bool dec = regime == Regime::Decreasing;
  SearchConfig sc = search_config(dec ? mc.decreasing_search : mc.non_decreasing_search, o);
  if (!expect_equilibrium) {
    sc.stop_above = kRefutationGain;
  }
  const DeviationReport rep = check_expost(tag, dec ? mc.decreasing : mc.non_decreasing, sc);
  const std::string where = fmt::format("{} ({}, {}x{} types)", to_string(tag), to_string(regime), sc.type_points,
                                        sc.type_points);
  if (expect_equilibrium) {
    check(r, rep.max_gain() <= sc.tolerance,
          fmt::format("{}: max gain {:.3g} <= {:.3g} over {} runs", where, rep.max_gain(), sc.tolerance, rep.runs));
  } else {
    const auto& w = rep.worst;
    check(r, rep.max_gain() > kRefutationGain,
          fmt::format("{}: gain {:.4g} > {:.3g} for bidder {} at theta ({:.4g}, {:.4g}) via {}", where, rep.max_gain(),
                      kRefutationGain, w.deviator + 1, w.theta1, w.theta2, w.best ? w.best->describe() : "none"));
  }
  r.details[fmt::format("{}/{}", to_string(tag), to_string(regime))] = to_json(rep);
}

VerifyResult thm6(const VerifyOptions& o)
{
  VerifyResult r{"thm6", true, {}, Json::object()};
  const double cap = 0.75;
  const auto types = TypeDistribution::uniform(0.0, 1.0);
  for (double alpha : {1.0, 2.0}) {
    const auto model = ValuationModel::power(alpha, cap, 1.0);
    const RdrReport rep = check_rdr_bne(model, cap, types, o.samples, o.seed);
    const std::string where = fmt::format("alpha {}", alpha);
    if (alpha == 1.0) {
      check(r, rep.ic_satisfied && near(rep.binding.slack(), 0.0, 1e-6) && near(rep.binding.theta, 1.0, 1e-12),
            fmt::format("{}: IC holds, binding at theta {} with slack {:.2e}", where, rep.binding.theta,
                        rep.binding.slack()));
    } else {
      check(r, !rep.ic_satisfied && near(rep.threshold, 0.625, 1e-9) && rep.threshold > rep.mean_type,
            fmt::format("{}: IC fails, threshold {:.6f} above mean type {:.6f} (slack {:.4f} at theta {})", where,
                        rep.threshold, rep.mean_type, rep.binding.slack(), rep.binding.theta));
    }
    check(r, rep.simulation_agrees,
          fmt::format("{}: simulated deviation payoff {:.6f} (se {:.2e}, {} samples) vs quadrature {:.6f}", where,
                      rep.simulated_mean, rep.simulated_stderr, rep.samples, rep.binding.deviation));
    r.details[fmt::format("alpha={}", alpha)] = to_json(rep);
  }
  return r;
}

VerifyResult vcg(const VerifyOptions& o)
{
  VerifyResult r{"vcg", true, {}, Json::object()};
  const MatrixConfig mc = default_matrix_config();
  const double eps = o.increment.value_or(1e-3);
  const VcgReport rep = vcg_equivalence_check(mc.non_decreasing, 25, o.seed, o.resolution.value_or(8), eps);
  int alloc = 0;
  double worst = 0.0;
  for (const auto& c : rep.checks) {
    alloc += c.allocation_equal ? 1 : 0;
    worst = std::max(worst, c.payment_error);
  }
  check(r, alloc == static_cast<int>(rep.checks.size()),
        fmt::format("{}/{} outcomes match the VCG allocation", alloc, rep.checks.size()));
  check(r, worst <= rep.tolerance, fmt::format("max payment error {:.3g} <= {:.3g}", worst, rep.tolerance));
  r.details = to_json(rep);
  return r;
}

}  // namespace

std::vector<std::string> claim_ids()
{
  return {"lots", "thm1", "thm2", "thm3", "thm4", "thm5", "thm6", "remark1", "remark2", "vcg"};
}

VerifyResult verify_claim(const std::string& id, const VerifyOptions& options)
{
  if (id == "lots") {
    return lots(options);
  }
  if (id == "thm1") {
    return thm1(options);
  }
  if (id == "thm2") {
    return thm2(options);
  }
  if (id == "thm6") {
    return thm6(options);
  }
  if (id == "vcg") {
    return vcg(options);
  }
  VerifyResult r{id, true, {}, Json::object()};
  if (id == "thm3") {
    expost(r, StrategyTag::CmraTruthful, Regime::Decreasing, false, options);
  } else if (id == "thm4") {
    expost(r, StrategyTag::CmraTruthful, Regime::NonDecreasing, true, options);
  } else if (id == "thm5") {
    expost(r, StrategyTag::Constant, Regime::Decreasing, true, options);
    expost(r, StrategyTag::Constant, Regime::NonDecreasing, true, options);
  } else if (id == "remark1") {
    expost(r, StrategyTag::ClockTruthful, Regime::Decreasing, false, options);
  } else if (id == "remark2") {
    expost(r, StrategyTag::ClockTruthful, Regime::NonDecreasing, false, options);
  } else {
    throw ScenarioError("unknown claim '" + id + "'");
  }
  return r;
}

}  // namespace cmra
