#pragma once

// Identity checks. Each check evaluates both sides independently and returns
// a report entry; spectral sides are computed on the circle (closed form) or
// from exact spectral symmetry on T^3, form sides with the geometry module.

#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flateta/eta.hpp"
#include "flateta/flow.hpp"
#include "flateta/geometry.hpp"

namespace flateta {

enum class ResidualMode { absolute, mod_z, integer };

std::string to_string(ResidualMode mode);

/// absolute: |lhs - rhs|; mod_z: max(circle distance of the real parts,
/// |Im lhs - Im rhs|); integer: |lhs - rhs|, with lhs required integral.
double residual_for(ResidualMode mode, Complex lhs, Complex rhs);

struct ReportEntry {
  std::string id;
  /// Short statement of the identity being checked.
  std::string identity;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
  ResidualMode mode = ResidualMode::absolute;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
};

ReportEntry make_entry(std::string id, std::string identity, Complex lhs, Complex rhs, ResidualMode mode,
                       double tolerance, nlohmann::json details = nlohmann::json::object());

struct VerificationReport {
  std::vector<ReportEntry> entries;

  void add(ReportEntry e) { entries.push_back(std::move(e)); }
  bool all_passed() const;
};

void to_json(nlohmann::json& j, const ReportEntry& e);
void to_json(nlohmann::json& j, const VerificationReport& r);

using ConnectionPath = std::function<Connection(double)>;

/// Linear interpolation of the connection forms; metric of c0.
ConnectionPath linear_path(const Connection& c0, const Connection& c1);

/// Flat c: on every odd coordinate subtorus,
///   int CS(nabla^e, nabla^{e,(r)}) = -(r / 2 pi) sum_j a_j(r)/j! int c_{2j+1}.
/// The entry reports the worst subtorus.
ReportEntry check_r_deformation(const Connection& c, double r, double tol = 1e-9);

/// Circle: etabar(c1) - etabar(c0) = int CS(c0, c1) mod Z.
ReportEntry check_gilkey(const Connection& c0, const Connection& c1, double tol = 1e-8);

/// Circle: etabar(1) - etabar(0) = kFlowOrientation * sf + int CS(c(0), c(1)) in C,
/// with sf tracked on the truncation at `cutoff`.
ReportEntry check_variation_c(const ConnectionPath& path, int cutoff, int m0 = 16, double tol = 1e-8);

/// Circle: with cs_r_poly coefficients a_i,
///   Re etabar(c) = etabar(c^e) + sum_{i even} (-1)^{i/2} int a_i   mod Z,
///   Im etabar(c) = sum_{i odd} (-1)^{(i-1)/2} int a_i.
/// Returns the real-part entry followed by the imaginary-part entry.
std::vector<ReportEntry> check_re_im(const Connection& c, double tol_re = 1e-6, double tol_im = 1e-8);

struct PsiValue {
  /// -(1/2 pi) int sum_{j>=1} 2^{2j} j!/(2j+1)! c_{2j+1}.
  double local = 0.0;
  /// Im etabar + (1/2 pi) int c_1, when the spectrum is available in closed
  /// form (circle) or by exact symmetry (T^3 with symmetric spectrum).
  std::optional<double> spectral;
  /// exp(pi * local).
  double r_alpha = 1.0;
};

PsiValue psi(const Connection& c);

/// Psi along a path of flat connections, sampled at `samples` + 1 points:
/// entry "psi_constant" (max deviation from Psi(0)) and, when any spectral
/// value was available, "psi_routes" (spectral against local).
std::vector<ReportEntry> check_psi(const ConnectionPath& path, int samples = 8, double tol = 1e-9);

/// int CS(hermitian_part(ref), c) over the torus (flat metric, L = 1).
Complex eta_tilde(const Connection& c, const Connection& ref);

/// Circle: Im eta_tilde(c, ref) = Im etabar(c).
ReportEntry check_eta_tilde(const Connection& c, const Connection& ref, double tol = 1e-8);

/// exp(i pi rank etabar) for the reduced eta of the untwisted operator.
Complex bk_phase_factor(int rank, const EtaValue& eta_sig_trivial);

/// Circle gauge path of winding w: kFlowOrientation * sf = int ch(g) exactly.
ReportEntry check_gauge_flow(const Connection& c, int w, int cutoff, int m0 = 16, double tol = 1e-9);

struct BkJump {
  double t0 = 0.0;
  double t1 = 0.0;
  /// Delta eta_BK - int CS over the interval (an integer).
  int jump = 0;
  int delta_m = 0;
  int sf = 0;
};

struct BkJumpScan {
  std::vector<BkJump> intervals;
  /// Largest deviation from  Delta eta_BK = kFlowOrientation sf + int CS - Delta m_minus.
  double residual = 0.0;
  /// Every interval has jump == -delta_m, and at least one m_minus jump occurs.
  bool jumps_follow_m = false;
};

/// Scans a circle family over the grid ts (eigenvalues may sit on the axis).
BkJumpScan scan_eta_bk(const ConnectionPath& family, const std::vector<double>& ts, int cutoff);
ReportEntry check_eta_bk_jumps(const ConnectionPath& family, const std::vector<double>& ts, int cutoff,
                               double tol = 1e-10);

}  // namespace flateta
