// flateta: run scenario files and print a summary.
//
//   flateta run <file> [--check id] [--tol x] [--emit-csv] [--seed n] [--out report.json]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 invalid scenario,
// 3 numerical guard tripped.

#include <CLI11.hpp>
#include <iostream>

#include "flateta/errors.hpp"
#include "flateta/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"eta invariants, Chern-Simons forms and spectral flow on flat tori"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string file;
  flateta::RunOptions opt;
  std::string check, out, csv_dir;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool quiet = false;
  run->add_option("file", file, "scenario JSON")->required();
  auto* check_opt = run->add_option("--check", check, "only run experiments with this id");
  auto* tol_opt = run->add_option("--tol", tol, "override every tolerance")->check(CLI::PositiveNumber);
  run->add_flag("--emit-csv", opt.emit_csv, "write spectrum and track CSV files");
  auto* seed_opt = run->add_option("--seed", seed, "seed for randomized experiments");
  auto* out_opt = run->add_option("--out", out, "report path (overrides output.report)");
  auto* csv_opt = run->add_option("--csv-dir", csv_dir, "CSV directory (overrides output.csv_dir)");
  run->add_option("--timestamp", opt.timestamp, "fixed generated_at value");
  run->add_flag("-q,--quiet", quiet, "do not print the summary table");

  CLI11_PARSE(app, argc, argv);

  if (*check_opt) opt.check = check;
  if (*tol_opt) opt.tol = tol;
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.report_path = out;
  if (*csv_opt) opt.csv_dir = csv_dir;

  try {
    const flateta::Scenario scenario = flateta::load_scenario(file);
    const flateta::RunResult result = flateta::run_scenario(scenario, opt);
    if (!quiet) {
      std::cout << flateta::summary_table(result.report);
      for (const auto& c : result.computations) std::cout << c.dump() << '\n';
      for (const auto& f : result.written_files) std::cout << "wrote " << f << '\n';
    }
    return result.report.all_passed() ? flateta::kExitOk : flateta::kExitCheckFailed;
  } catch (const flateta::SchemaError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return flateta::kExitSchema;
  } catch (const flateta::GuardError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return flateta::kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return flateta::kExitCheckFailed;
  }
}
