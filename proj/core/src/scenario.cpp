#include "flateta/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "flateta/errors.hpp"
#include "flateta/spectral.hpp"

namespace flateta {

namespace {

using nlohmann::json;

struct ExperimentSchema {
  std::set<std::string> allowed;
  std::set<std::string> required;
  /// Keys naming a connection.
  std::set<std::string> connection_keys;
};

const std::map<std::string, ExperimentSchema>& check_schemas() {
  static const std::map<std::string, ExperimentSchema> schemas{
      {"r_deformation", {{"connection", "r", "tol"}, {"connection"}, {"connection"}}},
      {"gilkey", {{"from", "to", "tol"}, {"from", "to"}, {"from", "to"}}},
      {"variation_c", {{"from", "to", "cutoff", "grid", "tol"}, {"from", "to"}, {"from", "to"}}},
      {"re_im", {{"connection", "tol"}, {"connection"}, {"connection"}}},
      {"psi", {{"from", "to", "samples", "tol"}, {"from"}, {"from", "to"}}},
      {"eta_tilde", {{"connection", "reference", "tol"}, {"connection", "reference"}, {"connection", "reference"}}},
      {"gauge_flow", {{"connection", "w", "cutoff", "grid", "tol"}, {"connection", "w"}, {"connection"}}},
      {"eta_bk_jumps", {{"from", "to", "points", "cutoff", "tol"}, {"from", "to"}, {"from", "to"}}},
      {"random_circle", {{"count", "rank", "cutoff", "tol"}, {}, {}}},
  };
  return schemas;
}

const std::map<std::string, ExperimentSchema>& compute_schemas() {
  static const std::map<std::string, ExperimentSchema> schemas{
      {"eta", {{"connection"}, {"connection"}, {"connection"}}},
      {"spectrum", {{"connection", "cutoff"}, {"connection"}, {"connection"}}},
      {"track", {{"from", "to", "cutoff", "grid"}, {"from", "to"}, {"from", "to"}}},
      {"psi_value", {{"connection"}, {"connection"}, {"connection"}}},
      {"bk_phase", {{"rank"}, {}, {}}},
  };
  return schemas;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw SchemaError(where + ": unknown key '" + item.key() + "'");
  }
}

int get_int(const json& p, const char* key, int fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number_integer()) throw SchemaError(std::string("'") + key + "' must be an integer");
  return p[key].get<int>();
}

double get_double(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw SchemaError(std::string("'") + key + "' must be a number");
  return p[key].get<double>();
}

std::vector<double> get_doubles(const json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  if (p[key].is_number()) return {p[key].get<double>()};
  if (!p[key].is_array()) throw SchemaError(std::string("'") + key + "' must be a number or an array");
  std::vector<double> out;
  for (const auto& v : p[key]) {
    if (!v.is_number()) throw SchemaError(std::string("'") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_ints(const json& p, const char* key) {
  if (p[key].is_number_integer()) return {p[key].get<int>()};
  if (!p[key].is_array()) throw SchemaError(std::string("'") + key + "' must be an integer or an array");
  std::vector<int> out;
  for (const auto& v : p[key]) {
    if (!v.is_number_integer()) throw SchemaError(std::string("'") + key + "' entries must be integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

class Runner {
 public:
  Runner(const Scenario& s, const RunOptions& opt) : s_(s), opt_(opt) {
    emit_csv_ = opt.emit_csv;
    if (opt.csv_dir) {
      csv_dir_ = *opt.csv_dir;
    } else if (s.csv_dir) {
      csv_dir_ = *s.csv_dir;
    } else {
      csv_dir_ = "csv";
    }
    seed_ = opt.seed ? *opt.seed : s.seed;
  }

  RunResult run() {
    for (std::size_t i = 0; i < s_.experiments.size(); ++i) {
      const Experiment& e = s_.experiments[i];
      if (opt_.check && *opt_.check != e.name) continue;
      try {
        if (e.kind == "check") {
          run_check(e);
        } else {
          run_compute(e);
        }
      } catch (const GuardError&) {
        throw;
      } catch (const SchemaError&) {
        throw;
      } catch (const std::invalid_argument& err) {
        throw SchemaError("experiment " + std::to_string(i) + " (" + e.name + "): " + err.what());
      } catch (const std::domain_error& err) {
        throw SchemaError("experiment " + std::to_string(i) + " (" + e.name + "): " + err.what());
      }
    }
    std::size_t passed = 0;
    for (const auto& e : result_.report.entries) passed += e.pass ? 1 : 0;
    result_.document = json{{"schema_version", kReportSchemaVersion},
                            {"scenario", s_.name},
                            {"generated_at", opt_.timestamp.empty() ? utc_now() : opt_.timestamp},
                            {"seed", seed_},
                            {"entries", result_.report},
                            {"computations", result_.computations},
                            {"summary",
                             {{"total", result_.report.entries.size()},
                              {"passed", passed},
                              {"failed", result_.report.entries.size() - passed}}},
                            {"all_passed", result_.report.all_passed()}};
    return std::move(result_);
  }

 private:
  const Connection& conn(const json& p, const char* key) const { return s_.connections.at(p[key].get<std::string>()); }

  double tol(const Experiment& e, double fallback) const {
    if (opt_.tol) return *opt_.tol;
    if (e.params.contains("tol")) return get_double(e.params, "tol", fallback);
    const auto it = s_.tolerance.find(e.name);
    return it != s_.tolerance.end() ? it->second : fallback;
  }

  ConnectionPath path(const json& p) const {
    const Connection& c0 = conn(p, "from");
    const Connection& c1 = p.contains("to") ? conn(p, "to") : c0;
    return linear_path(c0, c1);
  }

  void add(ReportEntry e, const Experiment& ex) {
    e.details["experiment"] = ex.params;
    result_.report.add(std::move(e));
  }

  std::ofstream open_csv(const std::string& name) {
    std::filesystem::create_directories(csv_dir_);
    const std::string file = (std::filesystem::path(csv_dir_) / name).string();
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    result_.written_files.push_back(file);
    return out;
  }

  void run_check(const Experiment& e) {
    const json& p = e.params;
    if (e.name == "r_deformation") {
      for (double r : get_doubles(p, "r", {0.5, 1.0, 2.0})) add(check_r_deformation(conn(p, "connection"), r, tol(e, 1e-9)), e);
    } else if (e.name == "gilkey") {
      add(check_gilkey(conn(p, "from"), conn(p, "to"), tol(e, 1e-8)), e);
    } else if (e.name == "variation_c") {
      add(check_variation_c(path(p), get_int(p, "cutoff", 10), get_int(p, "grid", 16), tol(e, 1e-8)), e);
    } else if (e.name == "re_im") {
      const auto entries = opt_.tol || p.contains("tol") || s_.tolerance.count(e.name)
                               ? check_re_im(conn(p, "connection"), tol(e, 1e-6), tol(e, 1e-8))
                               : check_re_im(conn(p, "connection"));
      for (const auto& entry : entries) add(entry, e);
    } else if (e.name == "psi") {
      for (const auto& entry : check_psi(path(p), get_int(p, "samples", 8), tol(e, 1e-9))) add(entry, e);
    } else if (e.name == "eta_tilde") {
      add(check_eta_tilde(conn(p, "connection"), conn(p, "reference"), tol(e, 1e-8)), e);
    } else if (e.name == "gauge_flow") {
      for (int w : get_ints(p, "w")) {
        add(check_gauge_flow(conn(p, "connection"), w, get_int(p, "cutoff", 10), get_int(p, "grid", 16),
                             tol(e, 1e-9)),
            e);
      }
    } else if (e.name == "eta_bk_jumps") {
      const int points = get_int(p, "points", 21);
      if (points < 2) throw SchemaError("eta_bk_jumps: 'points' must be >= 2");
      std::vector<double> ts;
      for (int i = 0; i < points; ++i) ts.push_back(double(i) / double(points - 1));
      add(check_eta_bk_jumps(path(p), ts, get_int(p, "cutoff", 10), tol(e, 1e-10)), e);
    } else if (e.name == "random_circle") {
      random_circle(e);
    }
  }

  void random_circle(const Experiment& e) {
    if (s_.dim != 1) throw SchemaError("random_circle: requires manifold dim 1");
    const json& p = e.params;
    const int count = get_int(p, "count", 10);
    const int rank = get_int(p, "rank", 1);
    const int cutoff = get_int(p, "cutoff", 8);
    if (count < 0 || rank < 1) throw SchemaError("random_circle: invalid count or rank");
    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(-0.3, 0.3);
    auto draw = [&]() {
      std::vector<Complex> mus;
      for (int k = 0; k < rank; ++k) {
        double x = re(rng);
        while (std::abs(x - std::round(x)) < 0.02) x = re(rng);
        mus.push_back(Complex(x, im(rng)));
      }
      return Connection::circle_diagonal(mus);
    };
    for (int i = 0; i < count; ++i) {
      const Connection c0 = draw();
      const Connection c1 = draw();
      for (ReportEntry entry : {check_gilkey(c0, c1, tol(e, 1e-8)),
                                check_variation_c(linear_path(c0, c1), cutoff, 16, tol(e, 1e-8))}) {
        entry.details["sample"] = i;
        add(std::move(entry), e);
      }
      for (ReportEntry entry : check_re_im(c0)) {
        entry.details["sample"] = i;
        add(std::move(entry), e);
      }
    }
  }

  void run_compute(const Experiment& e) {
    const json& p = e.params;
    json out{{"compute", e.name}, {"params", p}};
    if (e.name == "eta") {
      const Connection& c = conn(p, "connection");
      EtaValue v;
      if (c.dim() == 1) {
        v = eta_s1(c);
        out["method"] = "closed_form";
      } else {
        v = eta_by_symmetry(build_truncation(c, 1));
        out["method"] = "symmetry";
      }
      out["eta"] = complex_json(v.eta);
      out["kernel_dim"] = v.kernel_dim;
      out["reduced"] = complex_json(v.reduced);
      out["mod_z_note"] = v.mod_z_note;
    } else if (e.name == "spectrum") {
      const std::string name = p["connection"].get<std::string>();
      const OperatorTruncation t = build_truncation(conn(p, "connection"), get_int(p, "cutoff", 4));
      const std::vector<Complex> spec = spectrum(t);
      out["size"] = spec.size();
      out["m_minus"] = m_minus(spec, 1e-9);
      if (emit_csv_) {
        auto f = open_csv("spectrum_" + name + ".csv");
        write_spectrum_csv(f, t);
      }
    } else if (e.name == "track") {
      const int cutoff = get_int(p, "cutoff", 10);
      const ConnectionPath cp = path(p);
      const OperatorPath op = [&cp, cutoff](double t) { return build_truncation(cp(t), cutoff); };
      const EigenvalueTrack tr = track_operator_path(op, get_int(p, "grid", 16));
      const FlowCounts counts = flow_counts(tr);
      out["sf"] = counts.value();
      out["to_negative"] = counts.to_negative;
      out["to_nonnegative"] = counts.to_nonnegative;
      out["grid_points"] = tr.ts.size();
      out["refinements"] = tr.log.size();
      if (emit_csv_) {
        auto f = open_csv("track_" + p["from"].get<std::string>() + "_" + p["to"].get<std::string>() + ".csv");
        write_track_csv(f, tr);
      }
    } else if (e.name == "psi_value") {
      const PsiValue v = psi(conn(p, "connection"));
      out["psi"] = v.local;
      out["r_alpha"] = v.r_alpha;
      if (v.spectral) out["psi_spectral"] = *v.spectral;
    } else if (e.name == "bk_phase") {
      const int rank = get_int(p, "rank", s_.rank);
      const Connection trivial = Connection::trivial(s_.dim, 1);
      const EtaValue v = s_.dim == 1 ? eta_s1(trivial) : eta_by_symmetry(build_truncation(trivial, 1));
      out["eta_sig"] = complex_json(v.reduced);
      out["phase"] = complex_json(bk_phase_factor(rank, v));
    }
    result_.computations.push_back(std::move(out));
  }

  const Scenario& s_;
  const RunOptions& opt_;
  bool emit_csv_ = false;
  std::string csv_dir_;
  std::uint64_t seed_ = 0;
  RunResult result_;
};

}  // namespace

Scenario scenario_from_json(const json& j) {
  reject_unknown(j, {"name", "manifold", "bundle", "connections", "experiments", "tolerance", "seed", "output"},
                 "scenario");
  for (const char* key : {"manifold", "bundle", "connections", "experiments"}) {
    if (!j.contains(key)) throw SchemaError(std::string("scenario: missing '") + key + "'");
  }
  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SchemaError("scenario: 'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  reject_unknown(j["manifold"], {"dim"}, "manifold");
  if (!j["manifold"].contains("dim") || !j["manifold"]["dim"].is_number_integer()) {
    throw SchemaError("manifold: 'dim' must be an integer");
  }
  s.dim = j["manifold"]["dim"].get<int>();
  if (s.dim < 1 || s.dim % 2 == 0 || s.dim > 9) throw SchemaError("manifold: 'dim' must be odd, between 1 and 9");
  reject_unknown(j["bundle"], {"rank"}, "bundle");
  if (!j["bundle"].contains("rank") || !j["bundle"]["rank"].is_number_integer()) {
    throw SchemaError("bundle: 'rank' must be an integer");
  }
  s.rank = j["bundle"]["rank"].get<int>();
  if (s.rank < 1) throw SchemaError("bundle: 'rank' must be >= 1");

  if (!j["connections"].is_object()) throw SchemaError("scenario: 'connections' must be an object");
  for (const auto& item : j["connections"].items()) {
    Connection c = connection_from_json(item.value());
    if (c.dim() != s.dim || c.rank() != s.rank) {
      throw SchemaError("connection '" + item.key() + "': shape disagrees with manifold/bundle");
    }
    s.connections.emplace(item.key(), std::move(c));
  }

  if (!j["experiments"].is_array()) throw SchemaError("scenario: 'experiments' must be an array");
  for (const auto& ex : j["experiments"]) {
    if (!ex.is_object()) throw SchemaError("experiment: expected an object");
    const bool is_check = ex.contains("check");
    if (is_check == ex.contains("compute")) throw SchemaError("experiment: exactly one of 'check' or 'compute'");
    Experiment e;
    e.kind = is_check ? "check" : "compute";
    const json& id = ex[e.kind];
    if (!id.is_string()) throw SchemaError("experiment: id must be a string");
    e.name = id.get<std::string>();
    const auto& schemas = is_check ? check_schemas() : compute_schemas();
    const auto it = schemas.find(e.name);
    if (it == schemas.end()) throw SchemaError("experiment: unknown " + e.kind + " '" + e.name + "'");
    e.params = ex;
    e.params.erase(e.kind);
    reject_unknown(e.params, it->second.allowed, e.kind + " " + e.name);
    for (const auto& key : it->second.required) {
      if (!e.params.contains(key)) throw SchemaError(e.kind + " " + e.name + ": missing '" + key + "'");
    }
    for (const auto& key : it->second.connection_keys) {
      if (!e.params.contains(key)) continue;
      if (!e.params[key].is_string() || !s.connections.count(e.params[key].get<std::string>())) {
        throw SchemaError(e.kind + " " + e.name + ": '" + key + "' must name a connection");
      }
    }
    s.experiments.push_back(std::move(e));
  }

  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_object()) throw SchemaError("scenario: 'tolerance' must be an object");
    for (const auto& item : j["tolerance"].items()) {
      if (!check_schemas().count(item.key())) throw SchemaError("tolerance: unknown check '" + item.key() + "'");
      if (!item.value().is_number()) throw SchemaError("tolerance: values must be numbers");
      s.tolerance[item.key()] = item.value().get<double>();
    }
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw SchemaError("scenario: 'seed' must be a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], {"report", "csv_dir"}, "output");
    for (const char* key : {"report", "csv_dir"}) {
      if (!j["output"].contains(key)) continue;
      if (!j["output"][key].is_string()) throw SchemaError(std::string("output: '") + key + "' must be a string");
    }
    if (j["output"].contains("report")) s.report_path = j["output"]["report"].get<std::string>();
    if (j["output"].contains("csv_dir")) s.csv_dir = j["output"]["csv_dir"].get<std::string>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + err.what());
  }
  return scenario_from_json(j);
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  RunResult result = Runner(s, opt).run();
  const std::optional<std::string> report = opt.report_path ? opt.report_path : s.report_path;
  if (report) {
    const std::filesystem::path file(*report);
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write report " + *report);
    out << result.document.dump(2) << '\n';
    result.written_files.push_back(*report);
  }
  return result;
}

std::string summary_table(const VerificationReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "check" << std::setw(10) << "mode" << std::setw(14) << "residual"
      << std::setw(10) << "tol" << "result\n";
  for (const auto& e : r.entries) {
    out << std::left << std::setw(16) << e.id << std::setw(10) << to_string(e.mode) << std::setw(14)
        << std::setprecision(3) << std::scientific << e.residual << std::setw(10) << e.tolerance
        << (e.pass ? "PASS" : "FAIL") << '\n';
    out << std::defaultfloat;
  }
  return out.str();
}

}  // namespace flateta
