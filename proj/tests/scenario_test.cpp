#include "cmra/error.hpp"
#include "cmra/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cmra;
namespace fs = std::filesystem;

namespace {

fs::path data(const std::string& rel)
{
  return fs::path(CMRA_DATA_DIR) / rel;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("cmra-test-" + name);
  fs::remove_all(dir);
  return dir;
}

Json lots_json()
{
  return Json::parse(slurp(data("scenarios/lots-example.json")));
}

}  // namespace

TEST(Scenario, BundledFilesLoad)
{
  for (const auto* f : {"lots-example", "fig1-matrix", "dec-fixture", "pow-fixture", "pow-sweep"}) {
    EXPECT_NO_THROW((void)load_scenario(data(std::string("scenarios/") + f + ".json"))) << f;
  }
}

TEST(Scenario, RoundTripIsIdempotent)
{
  for (const auto* f : {"lots-example", "dec-fixture", "pow-fixture", "pow-sweep", "fig1-matrix"}) {
    const Scenario s = load_scenario(data(std::string("scenarios/") + f + ".json"));
    const Json once = to_json(s);
    const Json twice = to_json(scenario_from_json(once));
    EXPECT_EQ(once.dump(), twice.dump()) << f;
  }
}

TEST(Scenario, ValidationErrors)
{
  Json j = lots_json();
  j["runs"] = Json::array();
  EXPECT_THROW((void)scenario_from_json(j), ScenarioError);

  j = lots_json();
  j["runs"][0]["strategies"] = Json::array();
  EXPECT_THROW((void)scenario_from_json(j), ScenarioError);

  j = lots_json();
  j["runs"][0]["strategies"] = {"clock-truthful", "spite"};
  EXPECT_ANY_THROW((void)scenario_from_json(j));

  j = lots_json();
  j["market"]["bidders"].erase(1);
  EXPECT_THROW((void)scenario_from_json(j), ScenarioError);

  j = lots_json();
  j["market"]["cap"] = 0.4;
  EXPECT_ANY_THROW((void)scenario_from_json(j));

  j = lots_json();
  j["auction"]["increment"] = 0;
  EXPECT_THROW((void)scenario_from_json(j), ScenarioError);
}

TEST(Scenario, LotsExampleOutcomes)
{
  const Scenario s = load_scenario(data("scenarios/lots-example.json"));
  const auto dir = fresh_dir("lots");
  const auto res = run_scenario(s, dir);
  EXPECT_EQ(res.files.size(), 7u);
  const auto& runs = res.summary["runs"];
  EXPECT_EQ(runs[0]["revenue"], 90.0);
  EXPECT_EQ(runs[1]["revenue"], 60.0);
  EXPECT_EQ(runs[1]["final_price_per_lot"], 20.0);
  EXPECT_EQ(runs[2]["revenue"], 0.0);
  EXPECT_EQ(runs[2]["rounds"], 1);
  const std::string log = slurp(dir / "lots-example-cmra-truthful-rounds.csv");
  EXPECT_EQ(log.substr(0, log.find('\n')), "round,clock_price,bidder,kind,quantity,amount,closed_flag,R_star");
}

TEST(Scenario, SweepWritesOneRowPerCell)
{
  const Scenario s = load_scenario(data("scenarios/pow-sweep.json"));
  const auto dir = fresh_dir("sweep");
  run_scenario(s, dir);
  const std::string csv = slurp(dir / "pow-sweep-sweep-summary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 25 * 2);
}

TEST(ExportFigure, ZeroPriceHasOnlyHeadlineLayer)
{
  const Scenario s = load_scenario(data("scenarios/dec-fixture.json"));
  std::istringstream csv(export_figure_data(s, {0.0}));
  std::string line;
  std::getline(csv, line);
  int bids = 0;
  while (std::getline(csv, line)) {
    if (line.find(",bid,") != std::string::npos) {
      ++bids;
      EXPECT_NE(line.find("headline"), std::string::npos) << line;
      EXPECT_NE(line.find(",0.9,"), std::string::npos) << line;
    }
  }
  EXPECT_EQ(bids, 2);
}

TEST(ExportFigure, RejectsPricesOutsideTheRun)
{
  const Scenario s = load_scenario(data("scenarios/dec-fixture.json"));
  EXPECT_THROW((void)export_figure_data(s, {5.0}), DomainError);
  EXPECT_THROW((void)export_figure_data(s, {-1.0}), DomainError);
}

TEST(ExportFigure, WeakFinalPriceRevenuePeaksAtCapPair)
{
  Scenario s = load_scenario(data("scenarios/pow-fixture.json"));
  s.runs = {{"cmra-truthful", Mechanism::Cmra, {StrategyTag::CmraTruthful, StrategyTag::CmraTruthful}}};
  const double pf = final_price(s.bidders[1], s.cap);
  std::istringstream csv(export_figure_data(s, {pf}));
  std::string line;
  double best = -1.0;
  std::string best_x;
  while (std::getline(csv, line)) {
    if (line.find(",pair_revenue,") == std::string::npos) {
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) {
      cols.push_back(c);
    }
    const double v = std::stod(cols[4]);
    if (v > best) {
      best = v;
      best_x = cols[3];
    }
  }
  EXPECT_EQ(best_x, "0.75");
}

TEST(Cli, RunIsByteDeterministic)
{
  const auto a = fresh_dir("cli-a");
  const auto b = fresh_dir("cli-b");
  const std::string cli = CMRA_CLI_PATH;
  const std::string scenario = data("scenarios/lots-example.json").string();
  ASSERT_EQ(std::system((cli + " -o " + a.string() + " run " + scenario + " > /dev/null").c_str()), 0);
  ASSERT_EQ(std::system(("CMRA_OUT_DIR=" + b.string() + " " + cli + " run " + scenario + " > /dev/null").c_str()), 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
    ++compared;
  }
  EXPECT_EQ(compared, 7);
}

TEST(Cli, FailuresReturnNonZero)
{
  const std::string cli = CMRA_CLI_PATH;
  const auto dir = fresh_dir("cli-bad");
  fs::create_directories(dir);
  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"name": "bad", "market": {"cap": 0.75}})";
  }
  EXPECT_NE(std::system((cli + " -o " + dir.string() + " run " + (dir / "bad.json").string() + " 2> /dev/null").c_str()), 0);
  EXPECT_NE(std::system((cli + " verify nonsense > /dev/null 2>&1").c_str()), 0);
  EXPECT_EQ(std::system((cli + " -o " + dir.string() + " verify lots > /dev/null").c_str()), 0);
}
