#include "cmra/error.hpp"
#include "cmra/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

fs::path out_dir(const std::string& flag)
{
  if (!flag.empty()) {
    return flag;
  }
  if (const char* env = std::getenv("CMRA_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "cmra-out";
}

void write(const fs::path& path, const std::string& text)
{
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw cmra::Error("cannot write " + path.string());
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"CMRA simulation and verification engine"};
  app.require_subcommand(1);
  std::string out_flag;
  app.add_option("-o,--out", out_flag, "Output directory (default: $CMRA_OUT_DIR, else ./cmra-out)");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  std::string claim;
  cmra::VerifyOptions vo;
  bool as_json = false;
  auto* verify = app.add_subcommand("verify", "Numerically check a claim (or 'all')");
  verify->add_option("id", claim, "Claim id")->required();
  verify->add_option("--grid", vo.resolution, "Quantity grid resolution");
  verify->add_option("--eps", vo.increment,
                     "Clock increment; for deviation searches a fraction of the highest choke price");
  verify->add_option("--tol", vo.tolerance, "Gain tolerance for deviation searches");
  verify->add_option("--types", vo.type_points, "Type points per bidder for deviation searches");
  verify->add_option("--seed", vo.seed, "Monte Carlo seed");
  verify->add_option("--samples", vo.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  verify->add_flag("--json", as_json, "Also write a JSON report to the output directory");

  std::string record_path;
  auto* audit = app.add_subcommand("audit", "Reconstruct linear prices from an auction payment record");
  audit->add_option("record", record_path, "Audit record JSON")->required()->check(CLI::ExistingFile);

  std::vector<double> prices;
  auto* fig = app.add_subcommand("export-fig", "Write bid functions and revenue curves at given clock prices");
  fig->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  fig->add_option("--prices", prices, "Clock prices")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out = out_dir(out_flag);

    if (*run) {
      const auto scenario = cmra::load_scenario(scenario_path);
      const auto result = cmra::run_scenario(scenario, out);
      for (const auto& f : result.files) {
        std::cout << (out / f).string() << "\n";
      }
      if (scenario.mode == "matrix") {
        std::ifstream table(out / (scenario.name + "-matrix.txt"));
        std::cout << table.rdbuf();
      }
      return 0;
    }

    if (*verify) {
      const auto ids = claim == "all" ? cmra::claim_ids() : std::vector<std::string>{claim};
      bool ok = true;
      for (const auto& id : ids) {
        const auto r = cmra::verify_claim(id, vo);
        std::cout << fmt::format("[{}] {}\n", r.passed ? "PASS" : "FAIL", r.id);
        for (const auto& line : r.lines) {
          std::cout << "  " << line << "\n";
        }
        if (as_json) {
          write(out / ("verify-" + id + ".json"), r.details.dump(2) + "\n");
        }
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }

    if (*audit) {
      const auto record = cmra::load_audit_record(record_path);
      const auto report = cmra::audit_linear_prices(record);
      const std::string text = cmra::to_json(report).dump(2) + "\n";
      write(out / (record.name + "-audit.json"), text);
      std::cout << text;
      return 0;
    }

    if (*fig) {
      const auto scenario = cmra::load_scenario(scenario_path);
      const fs::path path = out / (scenario.name + "-figure.csv");
      write(path, cmra::export_figure_data(scenario, prices));
      std::cout << path.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
