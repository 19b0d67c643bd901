#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "flateta/errors.hpp"
#include "flateta/scenario.hpp"

using namespace flateta;
using nlohmann::json;

namespace {

json circle_json(Complex mu) { return json{{"A", Connection::circle(mu).form()}}; }

json base_scenario() {
  return json{{"name", "unit"},
              {"manifold", {{"dim", 1}}},
              {"bundle", {{"rank", 1}}},
              {"connections", {{"a", circle_json(Complex(0.25, 0.1))}, {"b", circle_json(Complex(0.6, -0.05))}}},
              {"experiments",
               json::array({json{{"check", "gilkey"}, {"from", "a"}, {"to", "b"}},
                            json{{"check", "re_im"}, {"connection", "a"}},
                            json{{"compute", "spectrum"}, {"connection", "a"}, {"cutoff", 2}}})},
              {"seed", 7}};
}

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / ("flateta_test_" + leaf);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Scenario, ParsesAndRuns) {
  const Scenario s = scenario_from_json(base_scenario());
  EXPECT_EQ(s.connections.size(), 2u);
  EXPECT_EQ(s.experiments.size(), 3u);
  RunOptions opt;
  opt.timestamp = "2000-01-01T00:00:00Z";
  const RunResult r = run_scenario(s, opt);
  EXPECT_EQ(r.report.entries.size(), 3u);
  EXPECT_TRUE(r.report.all_passed());
  EXPECT_EQ(r.document["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(r.document["summary"]["total"], 3);
  EXPECT_EQ(r.document["seed"], 7);
  EXPECT_EQ(r.computations.size(), 1u);
  EXPECT_NE(summary_table(r.report).find("PASS"), std::string::npos);
}

TEST(Scenario, StrictSchema) {
  auto expect_schema_error = [](json j, const char* what) {
    EXPECT_THROW(scenario_from_json(j), SchemaError) << what;
  };
  json j = base_scenario();
  j["manifold"]["dim"] = 2;
  expect_schema_error(j, "even dimension");
  j = base_scenario();
  j["colour"] = 1;
  expect_schema_error(j, "unknown top-level key");
  j = base_scenario();
  j["experiments"][0]["to"] = "missing";
  expect_schema_error(j, "unknown connection");
  j = base_scenario();
  j["experiments"][0]["check"] = "nonsense";
  expect_schema_error(j, "unknown check");
  j = base_scenario();
  j["experiments"][0]["compute"] = "eta";
  expect_schema_error(j, "both check and compute");
  j = base_scenario();
  j["bundle"]["rank"] = 2;
  expect_schema_error(j, "rank mismatch");
  j = base_scenario();
  j["experiments"][1]["connection"] = 3;
  expect_schema_error(j, "wrong type");
  j = base_scenario();
  j.erase("connections");
  expect_schema_error(j, "missing connections");
}

TEST(Scenario, DomainProblemsBecomeSchemaErrors) {
  json j = base_scenario();
  j["manifold"]["dim"] = 3;
  j["connections"] = {{"a", {{"A", Connection::trivial(3, 1).form()}}}};
  j["experiments"] = json::array({json{{"check", "gilkey"}, {"from", "a"}, {"to", "a"}}});
  const Scenario s = scenario_from_json(j);
  EXPECT_THROW(run_scenario(s), SchemaError);
}

TEST(Scenario, OversizedTruncationIsAGuardError) {
  json j = base_scenario();
  j["experiments"] = json::array({json{{"compute", "spectrum"}, {"connection", "a"}, {"cutoff", 100000000}}});
  EXPECT_THROW(run_scenario(scenario_from_json(j)), GuardError);
}

TEST(Scenario, DeterministicWithFixedTimestamp) {
  json j = base_scenario();
  j["experiments"].push_back(json{{"check", "random_circle"}, {"count", 3}, {"rank", 2}, {"cutoff", 6}});
  const Scenario s = scenario_from_json(j);
  RunOptions opt;
  opt.timestamp = "fixed";
  EXPECT_EQ(run_scenario(s, opt).document.dump(), run_scenario(s, opt).document.dump());
  RunOptions other = opt;
  other.seed = 8;
  EXPECT_NE(run_scenario(s, opt).document.dump(), run_scenario(s, other).document.dump());
}

TEST(Scenario, FilterAndToleranceOverride) {
  const Scenario s = scenario_from_json(base_scenario());
  RunOptions only;
  only.check = "re_im";
  const RunResult r = run_scenario(s, only);
  ASSERT_EQ(r.report.entries.size(), 2u);
  EXPECT_EQ(r.report.entries[0].id, "re_im_real");
  EXPECT_TRUE(r.computations.empty());
  RunOptions strict;
  strict.tol = -1.0;
  EXPECT_FALSE(run_scenario(s, strict).report.all_passed());
}

TEST(Scenario, FileToleranceApplies) {
  json j = base_scenario();
  j["tolerance"] = {{"gilkey", -1.0}};
  const RunResult r = run_scenario(scenario_from_json(j));
  EXPECT_FALSE(r.report.entries[0].pass);
  EXPECT_TRUE(r.report.entries[1].pass);
}

TEST(Scenario, WritesReportAndCsv) {
  const auto dir = temp_dir("outputs");
  const Scenario s = scenario_from_json(base_scenario());
  RunOptions opt;
  opt.emit_csv = true;
  opt.csv_dir = (dir / "csv").string();
  opt.report_path = (dir / "report.json").string();
  opt.timestamp = "fixed";
  const RunResult r = run_scenario(s, opt);
  EXPECT_EQ(r.written_files.size(), 2u);
  std::ifstream report(dir / "report.json");
  ASSERT_TRUE(report.good());
  EXPECT_EQ(json::parse(report), r.document);
  std::ifstream csv(dir / "csv" / "spectrum_a.csv");
  ASSERT_TRUE(csv.good());
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "re,im,mode");
  std::filesystem::remove_all(dir);
}

TEST(Scenario, BundledScenarioPasses) {
  const Scenario s = load_scenario(std::string(FLATETA_SCENARIO_DIR) + "/s1_unitary.json");
  RunOptions opt;
  opt.report_path = (temp_dir("bundled") / "r.json").string();
  EXPECT_TRUE(run_scenario(s, opt).report.all_passed());
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), SchemaError);
}
