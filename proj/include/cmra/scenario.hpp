#pragma once

#include "cmra/audit.hpp"
#include "cmra/equilibrium.hpp"
#include "cmra/mechanism.hpp"
#include "cmra/strategies.hpp"
#include "cmra/valuation.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cmra {

using Json = nlohmann::ordered_json;

enum class Mechanism
{
  Cmra,
  Clock,
};

struct RunSpec
{
  std::string label;
  Mechanism mechanism = Mechanism::Cmra;
  std::array<StrategyTag, 2> strategies{};
};

struct AuctionSpec
{
  int resolution = 100;
  double increment = 1e-3;
  double start_price = 0.0;
  double max_price = 1e3;
  bool refine = true;
  double refine_tolerance = 1e-7;
};

struct SweepSpec
{
  std::vector<double> theta1;
  std::vector<double> theta2;
};

struct Scenario
{
  std::string name;
  std::string mode = "single";  // single | sweep | matrix
  double cap = 0.75;
  std::array<ValuationModel, 2> bidders{ValuationModel::quadratic(1.0, 0.5), ValuationModel::quadratic(1.0, 0.5)};
  TypeDistribution types = TypeDistribution::uniform(0.0, 1.0);
  /// Number of identical lots the unit supply stands for; prices are also reported per lot.
  std::optional<int> lots;
  AuctionSpec auction;
  std::vector<RunSpec> runs;
  std::optional<SweepSpec> sweep;
  /// Matrix mode: type points per bidder for the deviation search.
  int matrix_type_points = 11;

  MarketEnv env() const;
  AuctionConfig config() const;
};

Json to_json(const ValuationModel& m);
ValuationModel model_from_json(const Json& j, double cap);
Json to_json(const Scenario& s);
/// Parses and validates; throws ScenarioError or AssumptionViolation.
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

Json to_json(const AuctionOutcome& o, std::optional<int> lots = std::nullopt);
std::string round_log_csv(const AuctionOutcome& o);

AuctionOutcome run_spec(const Scenario& s, const RunSpec& run);

struct ScenarioResult
{
  /// Files written, relative to the output directory.
  std::vector<std::filesystem::path> files;
  Json summary;
};

/// Executes the scenario's mode and writes its artifacts to `out_dir`.
ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

/// Bid functions and revenue curves of the first run at the given clocks.
/// Throws DomainError for prices outside [start, final].
std::string export_figure_data(const Scenario& s, const std::vector<double>& prices);

AuctionAuditRecord audit_record_from_json(const Json& j);
AuctionAuditRecord load_audit_record(const std::filesystem::path& path);
Json to_json(const AuditReport& r);

Json to_json(const DeviationReport& r);
Json to_json(const RdrReport& r);
Json to_json(const VcgReport& r);
Json to_json(const std::vector<MatrixCell>& cells);
/// Fixed-width text rendering of the strategy x regime matrix.
std::string matrix_table(const std::vector<MatrixCell>& cells);

struct VerifyOptions
{
  std::optional<int> resolution;
  std::optional<double> increment;
  std::optional<double> tolerance;
  std::optional<int> type_points;
  std::uint64_t seed = 20240229;
  int samples = 100000;
};

struct VerifyResult
{
  std::string id;
  bool passed = false;
  std::vector<std::string> lines;
  Json details;
};

/// Known ids: lots, thm1, thm2, thm3, thm4, thm5, thm6, remark1, remark2, vcg.
VerifyResult verify_claim(const std::string& id, const VerifyOptions& options);
std::vector<std::string> claim_ids();

}  // namespace cmra
