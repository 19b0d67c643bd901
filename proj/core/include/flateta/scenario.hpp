#pragma once

// Scenario files: a manifold, a bundle, named connections and a list of
// experiments. The format is documented in docs/scenario-format.md.

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flateta/geometry.hpp"
#include "flateta/verify.hpp"

namespace flateta {

inline constexpr const char* kReportSchemaVersion = "1.0";

struct Experiment {
  /// "check" or "compute".
  std::string kind;
  /// Check or computation id, e.g. "gilkey" or "spectrum".
  std::string name;
  nlohmann::json params;
};

struct Scenario {
  std::string name;
  int dim = 1;
  int rank = 1;
  std::map<std::string, Connection> connections;
  std::vector<Experiment> experiments;
  /// Per-check tolerance overrides from the file.
  std::map<std::string, double> tolerance;
  std::uint64_t seed = 0;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_dir;
};

/// Strict validation: unknown keys, wrong types, even dimension, shape
/// mismatches and unknown connection names raise SchemaError.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

struct RunOptions {
  /// Only run experiments with this check/compute id.
  std::optional<std::string> check;
  /// Overrides every tolerance.
  std::optional<double> tol;
  bool emit_csv = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_dir;
  /// Value of the report's generated_at field; current UTC time when empty.
  std::string timestamp;
};

struct RunResult {
  VerificationReport report;
  nlohmann::json computations = nlohmann::json::array();
  /// Full report document (what gets written to disk).
  nlohmann::json document;
  std::vector<std::string> written_files;
};

/// Runs every selected experiment. GuardError propagates (numerical guard);
/// DomainError/ShapeError raised by an experiment are reported as SchemaError.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

/// One line per entry: id, mode, residual, tolerance, PASS/FAIL.
std::string summary_table(const VerificationReport& r);

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitSchema = 2, kExitGuard = 3 };

}  // namespace flateta
