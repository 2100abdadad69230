#include "cmra/scenario.hpp"

#include "cmra/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace cmra {

namespace fs = std::filesystem;

namespace {

std::string num(double v)
{
  return fmt::format("{}", v);
}

std::string_view to_string(Mechanism m)
{
  return m == Mechanism::Cmra ? "cmra" : "clock";
}

Mechanism mechanism_from_string(const std::string& s)
{
  if (s == "cmra") {
    return Mechanism::Cmra;
  }
  if (s == "clock") {
    return Mechanism::Clock;
  }
  throw ScenarioError("unknown mechanism '" + s + "'");
}

template <typename T>
T required(const Json& j, const char* key, const std::string& where)
{
  if (!j.is_object() || !j.contains(key)) {
    throw ScenarioError(where + ": missing '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(where + ": bad '" + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback)
{
  if (!j.contains(key)) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("bad '") + key + "': " + e.what());
  }
}

Json types_to_json(const TypeDistribution& t)
{
  if (t.is_uniform()) {
    return Json{{"kind", "uniform"}, {"low", t.low()}, {"high", t.high()}};
  }
  return Json{{"kind", "discrete"}, {"points", t.points()}, {"weights", t.weights()}};
}

TypeDistribution types_from_json(const Json& j)
{
  const auto kind = required<std::string>(j, "kind", "types");
  if (kind == "uniform") {
    return TypeDistribution::uniform(required<double>(j, "low", "types"), required<double>(j, "high", "types"));
  }
  if (kind == "discrete") {
    return TypeDistribution::discrete(required<std::vector<double>>(j, "points", "types"),
                                      required<std::vector<double>>(j, "weights", "types"));
  }
  throw ScenarioError("unknown type distribution '" + kind + "'");
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ScenarioError("cannot write " + path.string());
  }
  out << text;
}

std::string kind_name(const std::optional<BidKind>& k)
{
  return k ? std::string(to_string(*k)) : "none";
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario schema

Json to_json(const ValuationModel& m)
{
  const auto& p = m.parameters();
  switch (m.family()) {
  case Family::QuadraticDecreasing:
    return Json{{"family", to_string(m.family())}, {"theta", m.theta()}, {"curvature", p[0]}};
  case Family::Power:
    return Json{{"family", to_string(m.family())}, {"alpha", p[0]}, {"normalization_cap", p[1]}, {"theta", m.theta()}};
  case Family::CustomPolynomial:
    return Json{{"family", to_string(m.family())},
                {"coefficients", std::vector<double>(p.begin(), p.end())},
                {"regime", to_string(m.regime())},
                {"theta", m.theta()}};
  }
  return {};
}

ValuationModel model_from_json(const Json& j, double cap)
{
  const auto family = family_from_string(required<std::string>(j, "family", "bidder"));
  switch (family) {
  case Family::QuadraticDecreasing:
    return ValuationModel::quadratic(required<double>(j, "theta", "bidder"), optional_field(j, "curvature", 0.5));
  case Family::Power:
    return ValuationModel::power(required<double>(j, "alpha", "bidder"), optional_field(j, "normalization_cap", cap),
                                 required<double>(j, "theta", "bidder"));
  case Family::CustomPolynomial: {
    auto c = required<std::vector<double>>(j, "coefficients", "bidder");
    if (c.empty() || c.size() > 3) {
      throw ScenarioError("custom polynomial takes one to three coefficients");
    }
    c.resize(3, 0.0);
    return ValuationModel::polynomial({c[0], c[1], c[2]}, regime_from_string(required<std::string>(j, "regime", "bidder")),
                                      optional_field(j, "theta", 1.0));
  }
  }
  throw ScenarioError("unknown family");
}

MarketEnv Scenario::env() const
{
  return MarketEnv(cap, bidders[0], bidders[1], types);
}

AuctionConfig Scenario::config() const
{
  AuctionConfig c{QuantityGrid(auction.resolution, cap)};
  c.increment = auction.increment;
  c.start_price = auction.start_price;
  c.max_price = auction.max_price;
  c.refine = auction.refine;
  c.refine_tolerance = auction.refine_tolerance;
  return c;
}

Json to_json(const Scenario& s)
{
  Json market{{"cap", s.cap}};
  if (s.lots) {
    market["lots"] = *s.lots;
  }
  market["bidders"] = Json::array({to_json(s.bidders[0]), to_json(s.bidders[1])});
  market["types"] = types_to_json(s.types);

  Json runs = Json::array();
  for (const auto& r : s.runs) {
    runs.push_back(Json{{"label", r.label},
                        {"mechanism", to_string(r.mechanism)},
                        {"strategies", {to_string(r.strategies[0]), to_string(r.strategies[1])}}});
  }
  Json j{{"name", s.name},
         {"mode", s.mode},
         {"market", market},
         {"auction",
          {{"resolution", s.auction.resolution},
           {"increment", s.auction.increment},
           {"start_price", s.auction.start_price},
           {"max_price", s.auction.max_price},
           {"refine", s.auction.refine},
           {"refine_tolerance", s.auction.refine_tolerance}}},
         {"runs", runs}};
  if (s.sweep) {
    j["sweep"] = Json{{"theta1", s.sweep->theta1}, {"theta2", s.sweep->theta2}};
  }
  if (s.mode == "matrix") {
    j["matrix"] = Json{{"type_points", s.matrix_type_points}};
  }
  return j;
}

Scenario scenario_from_json(const Json& j)
{
  Scenario s;
  s.name = required<std::string>(j, "name", "scenario");
  s.mode = optional_field<std::string>(j, "mode", "single");
  if (s.mode != "single" && s.mode != "sweep" && s.mode != "matrix") {
    throw ScenarioError("unknown mode '" + s.mode + "'");
  }

  const Json& market = j.contains("market") ? j.at("market") : Json::object();
  if (s.mode != "matrix") {
    s.cap = required<double>(market, "cap", "market");
    if (market.contains("lots")) {
      s.lots = market.at("lots").get<int>();
    }
    const auto& bidders = market.contains("bidders") ? market.at("bidders") : Json();
    if (!bidders.is_array() || bidders.size() != 2) {
      throw ScenarioError("market: exactly two bidders are required");
    }
    s.bidders = {model_from_json(bidders[0], s.cap), model_from_json(bidders[1], s.cap)};
    if (market.contains("types")) {
      s.types = types_from_json(market.at("types"));
    }
  }

  if (j.contains("auction")) {
    const Json& a = j.at("auction");
    s.auction.resolution = optional_field(a, "resolution", s.auction.resolution);
    s.auction.increment = optional_field(a, "increment", s.auction.increment);
    s.auction.start_price = optional_field(a, "start_price", s.auction.start_price);
    s.auction.max_price = optional_field(a, "max_price", s.auction.max_price);
    s.auction.refine = optional_field(a, "refine", s.auction.refine);
    s.auction.refine_tolerance = optional_field(a, "refine_tolerance", s.auction.refine_tolerance);
  }
  if (!(s.auction.increment > 0.0) || !(s.auction.max_price > s.auction.start_price)) {
    throw ScenarioError("auction: increment must be positive and max_price above start_price");
  }

  if (j.contains("runs")) {
    for (const auto& r : j.at("runs")) {
      RunSpec run;
      run.label = required<std::string>(r, "label", "run");
      run.mechanism = mechanism_from_string(optional_field<std::string>(r, "mechanism", "cmra"));
      const auto tags = required<std::vector<std::string>>(r, "strategies", "run " + run.label);
      if (tags.size() != 2) {
        throw ScenarioError("run " + run.label + ": one strategy per bidder is required");
      }
      run.strategies = {strategy_tag_from_string(tags[0]), strategy_tag_from_string(tags[1])};
      s.runs.push_back(run);
    }
  }
  if (s.mode != "matrix" && s.runs.empty()) {
    throw ScenarioError("scenario '" + s.name + "' has no runs");
  }

  if (s.mode == "sweep") {
    const Json& sw = j.contains("sweep") ? j.at("sweep") : Json();
    SweepSpec spec{required<std::vector<double>>(sw, "theta1", "sweep"), required<std::vector<double>>(sw, "theta2", "sweep")};
    if (spec.theta1.empty() || spec.theta2.empty()) {
      throw ScenarioError("sweep: empty type list");
    }
    s.sweep = spec;
  }
  if (s.mode == "matrix" && j.contains("matrix")) {
    s.matrix_type_points = optional_field(j.at("matrix"), "type_points", s.matrix_type_points);
  }

  if (s.mode != "matrix") {
    (void)s.env();
    if (s.sweep) {
      for (double t1 : s.sweep->theta1) {
        for (double t2 : s.sweep->theta2) {
          (void)s.env().with_thetas(t1, t2);
        }
      }
    }
  }
  return s;
}

Scenario load_scenario(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open " + path.string());
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Outcomes

Json to_json(const AuctionOutcome& o, std::optional<int> lots)
{
  Json j{{"final_price", o.final_price}};
  if (lots) {
    j["final_price_per_lot"] = o.final_price / *lots;
    j["lots"] = {o.quantity[0] * *lots, o.quantity[1] * *lots};
  }
  j["allocations"] = {o.quantity[0], o.quantity[1]};
  j["payments"] = {o.payment[0].to_real(), o.payment[1].to_real()};
  j["kinds"] = {kind_name(o.kind[0]), kind_name(o.kind[1])};
  j["revenue"] = o.revenue.to_real();
  j["excess_supply"] = o.excess_supply;
  j["rounds"] = o.rounds;
  j["termination"] = to_string(o.termination);
  return j;
}

std::string round_log_csv(const AuctionOutcome& o)
{
  std::string out = "round,clock_price,bidder,kind,quantity,amount,closed_flag,R_star\n";
  const double n = o.resolution > 0 ? o.resolution : 1.0;
  for (const auto& r : o.log) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.round, num(r.clock_price), r.bidder, to_string(r.kind),
                       num(r.quantity / n), r.amount.to_string(), r.closed ? 1 : 0, r.r_star.to_string());
  }
  return out;
}

AuctionOutcome run_spec(const Scenario& s, const RunSpec& run)
{
  const AuctionConfig c = s.config();
  const Strategy b1 = make_strategy(run.strategies[0], s.bidders[0], c.grid);
  const Strategy b2 = make_strategy(run.strategies[1], s.bidders[1], c.grid);
  return run.mechanism == Mechanism::Cmra ? run_cmra(b1, b2, c) : run_clock(b1, b2, c);
}

namespace {

const char* kSummaryHeader = "label,theta1,theta2,mechanism,strategy1,strategy2,final_price,x1,x2,payment1,payment2,"
                             "kind1,kind2,revenue,excess_supply,termination\n";

std::string summary_row(const Scenario& s, const RunSpec& run, const AuctionOutcome& o)
{
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", run.label, num(s.bidders[0].theta()),
                     num(s.bidders[1].theta()), to_string(run.mechanism), to_string(run.strategies[0]),
                     to_string(run.strategies[1]), num(o.final_price), num(o.quantity[0]), num(o.quantity[1]),
                     o.payment[0].to_string(), o.payment[1].to_string(), kind_name(o.kind[0]), kind_name(o.kind[1]),
                     o.revenue.to_string(), num(o.excess_supply), to_string(o.termination));
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, const fs::path& out_dir)
{
  fs::create_directories(out_dir);
  ScenarioResult res;
  res.summary = Json{{"name", s.name}, {"mode", s.mode}};

  if (s.mode == "single") {
    std::string summary = kSummaryHeader;
    Json runs = Json::array();
    for (const auto& run : s.runs) {
      const AuctionOutcome o = run_spec(s, run);
      const fs::path log = s.name + "-" + run.label + "-rounds.csv";
      const fs::path outcome = s.name + "-" + run.label + "-outcome.json";
      write_file(out_dir / log, round_log_csv(o));
      Json oj = to_json(o, s.lots);
      write_file(out_dir / outcome, oj.dump(2) + "\n");
      res.files.push_back(log);
      res.files.push_back(outcome);
      summary += summary_row(s, run, o);
      oj["label"] = run.label;
      runs.push_back(oj);
    }
    const fs::path sum = s.name + "-summary.csv";
    write_file(out_dir / sum, summary);
    res.files.push_back(sum);
    res.summary["runs"] = runs;
    return res;
  }

  if (s.mode == "sweep") {
    struct Cell
    {
      double t1;
      double t2;
      std::size_t run;
    };
    std::vector<Cell> cells;
    for (double t1 : s.sweep->theta1) {
      for (double t2 : s.sweep->theta2) {
        for (std::size_t r = 0; r < s.runs.size(); ++r) {
          cells.push_back({t1, t2, r});
        }
      }
    }
    std::vector<std::string> rows(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
      Scenario local = s;
      local.bidders = {s.bidders[0].with_theta(cells[i].t1), s.bidders[1].with_theta(cells[i].t2)};
      rows[i] = summary_row(local, s.runs[cells[i].run], run_spec(local, s.runs[cells[i].run]));
    });
    std::string summary = kSummaryHeader;
    for (const auto& r : rows) {
      summary += r;
    }
    const fs::path sum = s.name + "-sweep-summary.csv";
    write_file(out_dir / sum, summary);
    res.files.push_back(sum);
    res.summary["cells"] = cells.size();
    return res;
  }

  MatrixConfig mc = default_matrix_config();
  mc.decreasing_search.type_points = s.matrix_type_points;
  mc.non_decreasing_search.type_points = s.matrix_type_points;
  const auto cells = classification_matrix(mc);
  const fs::path mj = s.name + "-matrix.json";
  const fs::path mt = s.name + "-matrix.txt";
  res.summary["matrix"] = to_json(cells);
  write_file(out_dir / mj, res.summary["matrix"].dump(2) + "\n");
  write_file(out_dir / mt, matrix_table(cells));
  res.files.push_back(mj);
  res.files.push_back(mt);
  return res;
}

std::string export_figure_data(const Scenario& s, const std::vector<double>& prices)
{
  if (s.runs.empty()) {
    throw ScenarioError("export needs a run");
  }
  const RunSpec& run = s.runs.front();
  const AuctionConfig c = s.config();
  const AuctionOutcome o = run_spec(s, run);
  const Strategy b1 = make_strategy(run.strategies[0], s.bidders[0], c.grid);
  const Strategy b2 = make_strategy(run.strategies[1], s.bidders[1], c.grid);
  const double n = c.grid.resolution();

  std::string out = "price,series,bidder,x,value,source\n";
  for (double p : prices) {
    if (p < c.start_price || p > o.final_price + 1e-12) {
      throw DomainError(fmt::format("price {} outside [{}, {}]", p, c.start_price, o.final_price));
    }
    const auto [book1, book2] = books_at(b1, b2, c, p);
    for (int i = 0; i < 2; ++i) {
      const BidBook& book = i == 0 ? book1 : book2;
      for (GridIndex k = 0; k <= book.cap_index(); ++k) {
        if (const auto b = book.bid_at(k)) {
          out += fmt::format("{},bid,{},{},{},{}\n", num(p), i + 1, num(k / n), b->to_string(),
                             to_string(*book.source_at(k)));
        }
      }
    }
    const RevenueCurve curve = revenue_curve(book1, book2);
    for (const auto& pt : curve.points) {
      if (pt.pair) {
        out += fmt::format("{},pair_revenue,0,{},{},\n", num(p), num(pt.x1 / n), pt.pair->to_string());
      }
    }
    for (int i = 0; i < 2; ++i) {
      if (const auto& v = curve.single[static_cast<std::size_t>(i)]) {
        out += fmt::format("{},single_revenue,{},,{},\n", num(p), i + 1, v->to_string());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit records

namespace {

Rational amount_from_json(const Json& j, const std::string& where)
{
  if (j.is_string()) {
    return parse_decimal(j.get<std::string>());
  }
  if (j.is_number_integer()) {
    return Rational(j.get<long long>());
  }
  throw AuditError(where + ": amounts must be integers or decimal strings");
}

}  // namespace

AuctionAuditRecord audit_record_from_json(const Json& j)
{
  AuctionAuditRecord r;
  try {
    r.name = j.at("name").get<std::string>();
    r.unit = j.value("unit", std::string("DKK"));
    r.merge_equal_reserves = j.value("merge_equal_reserves", false);
    for (const auto& c : j.at("categories")) {
      LotCategory cat;
      cat.name = c.at("name").get<std::string>();
      cat.supply = c.at("supply").get<int>();
      cat.reserve = amount_from_json(c.at("reserve"), cat.name);
      cat.fixed = c.value("fixed", false);
      r.categories.push_back(cat);
    }
    if (j.contains("caps")) {
      for (const auto& c : j.at("caps")) {
        r.caps.push_back({c.at("name").get<std::string>(), c.at("weights").get<std::map<std::string, int>>(),
                          c.at("max").get<int>()});
      }
    }
    for (const auto& b : j.at("bidders")) {
      AuditBidder bidder;
      bidder.name = b.at("name").get<std::string>();
      bidder.counts = b.at("counts").get<std::map<std::string, int>>();
      bidder.payment = amount_from_json(b.at("payment"), bidder.name);
      r.bidders.push_back(bidder);
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(std::string("malformed audit record: ") + e.what());
  }
  return r;
}

AuctionAuditRecord load_audit_record(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw AuditError("cannot open " + path.string());
  }
  try {
    return audit_record_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw AuditError(path.string() + ": " + e.what());
  }
}

namespace {

Json solution_json(const SolutionSet& s)
{
  Json j{{"unknowns", s.unknowns}};
  Json part = Json::object();
  for (std::size_t i = 0; i < s.unknowns.size(); ++i) {
    part[s.unknowns[i]] = format_rational(s.particular[i]);
  }
  j["particular"] = part;
  Json dirs = Json::array();
  for (const auto& d : s.directions) {
    Json dj = Json::object();
    for (std::size_t i = 0; i < s.unknowns.size(); ++i) {
      if (d[i] != 0) {
        dj[s.unknowns[i]] = format_rational(d[i]);
      }
    }
    dirs.push_back(dj);
  }
  j["directions"] = dirs;
  j["dimension"] = s.directions.size();
  j["reserve_feasible"] = s.reserve_feasible;
  if (s.witness) {
    Json w = Json::object();
    for (std::size_t i = 0; i < s.unknowns.size(); ++i) {
      w[s.unknowns[i]] = format_rational((*s.witness)[i]);
    }
    j["witness"] = w;
  }
  if (s.directions.size() == 1) {
    j["parameter_range"] = {s.lower ? Json(format_rational(*s.lower)) : Json(nullptr),
                            s.upper ? Json(format_rational(*s.upper)) : Json(nullptr)};
  }
  return j;
}

}  // namespace

Json to_json(const AuditReport& r)
{
  Json j{{"name", r.name}, {"unit", r.unit}, {"unknowns", r.unknowns}};
  j["linear_consistent"] = r.linear_consistent;
  j["linear_feasible"] = r.linear_feasible;
  if (r.linear_consistent) {
    j["linear_solutions"] = solution_json(r.linear);
    Json res = Json::object();
    for (const auto& [name, v] : r.residuals) {
      res[name] = format_rational(v);
    }
    j["residuals"] = res;
  } else {
    j["inconsistent_bidders"] = r.certificate;
  }
  Json ids = Json::array();
  for (const auto& id : r.identities) {
    Json diff = Json::object();
    for (const auto& [k, v] : id.difference) {
      diff[k] = v;
    }
    ids.push_back(Json{{"larger", id.larger},
                       {"smaller", id.smaller},
                       {"equation", id.equation()},
                       {"difference", diff},
                       {"amount", format_rational(id.amount)},
                       {"reserve_value", format_rational(id.reserve_value)},
                       {"excess_over_reserve", format_rational(id.amount - id.reserve_value)},
                       {"solutions", solution_json(id.solutions)}});
  }
  j["identities"] = ids;
  Json flags = Json::array();
  for (const auto& f : r.flags) {
    flags.push_back(Json{{"bidders", {f.first, f.second}}, {"message", f.message}});
  }
  j["flags"] = flags;
  return j;
}

// ---------------------------------------------------------------------------
// Verification reports

Json to_json(const DeviationReport& r)
{
  Json worst{{"theta1", r.worst.theta1},
             {"theta2", r.worst.theta2},
             {"deviator", r.worst.deviator + 1},
             {"baseline", r.worst.baseline},
             {"best_surplus", r.worst.best_surplus},
             {"gain", r.worst.gain},
             {"deviation", r.worst.best ? Json(r.worst.best->describe()) : Json(nullptr)}};
  return Json{{"profile", to_string(r.profile)},
              {"type_pairs", r.pairs.size()},
              {"runs", r.runs},
              {"tolerance", r.tolerance},
              {"max_gain", r.max_gain()},
              {"equilibrium", r.equilibrium()},
              {"worst", worst}};
}

Json to_json(const RdrReport& r)
{
  Json quad = Json::array();
  for (const auto& p : r.quadrature) {
    quad.push_back(Json{{"theta", p.theta}, {"collusion", p.collusion}, {"deviation", p.deviation}, {"slack", p.slack()}});
  }
  return Json{{"threshold", r.threshold},
              {"mean_type", r.mean_type},
              {"ic_satisfied", r.ic_satisfied},
              {"binding_theta", r.binding.theta},
              {"binding_slack", r.binding.slack()},
              {"quadrature", quad},
              {"samples", r.samples},
              {"simulated_deviation_mean", r.simulated_mean},
              {"simulated_stderr", r.simulated_stderr},
              {"quadrature_deviation", r.binding.deviation},
              {"simulated_collusion", r.simulated_collusion},
              {"simulation_agrees", r.simulation_agrees}};
}

Json to_json(const VcgReport& r)
{
  Json checks = Json::array();
  double worst = 0.0;
  bool alloc = true;
  for (const auto& c : r.checks) {
    worst = std::max(worst, c.payment_error);
    alloc = alloc && c.allocation_equal;
    checks.push_back(Json{{"theta", {c.theta1, c.theta2}},
                          {"profile", to_string(c.profile)},
                          {"vcg_allocation", {c.expected.x1, c.expected.x2}},
                          {"vcg_payments", c.expected_payments},
                          {"allocation", {c.observed.x1, c.observed.x2}},
                          {"payments", c.observed_payments},
                          {"allocation_equal", c.allocation_equal},
                          {"payment_error", c.payment_error}});
  }
  return Json{{"all_match", r.all_match()},
              {"allocations_equal", alloc},
              {"max_payment_error", worst},
              {"tolerance", r.tolerance},
              {"checks", checks}};
}

Json to_json(const std::vector<MatrixCell>& cells)
{
  Json out = Json::array();
  for (const auto& c : cells) {
    out.push_back(Json{{"strategy", to_string(c.strategy)},
                       {"regime", to_string(c.regime)},
                       {"efficient", c.efficient},
                       {"verdict", c.verdict},
                       {"max_gain", c.max_gain}});
  }
  return out;
}

std::string matrix_table(const std::vector<MatrixCell>& cells)
{
  std::string out = fmt::format("{:<16}", "");
  for (StrategyTag t : {StrategyTag::ClockTruthful, StrategyTag::CmraTruthful, StrategyTag::Constant, StrategyTag::Rdr}) {
    out += fmt::format("| {:<44}", to_string(t));
  }
  out += "\n";
  for (Regime r : {Regime::Decreasing, Regime::NonDecreasing}) {
    std::string eff = fmt::format("{:<16}", to_string(r));
    std::string eq = fmt::format("{:<16}", "");
    for (const auto& c : cells) {
      if (c.regime != r) {
        continue;
      }
      eff += fmt::format("| {:<44}", c.efficient ? "efficient" : "inefficient");
      eq += fmt::format("| {:<44}", c.verdict);
    }
    out += eff + "\n" + eq + "\n";
  }
  return out;
}

}  // namespace cmra
