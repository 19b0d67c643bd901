#include "flateta/verify.hpp"

#include <algorithm>
#include <cmath>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

nlohmann::json complex_json(Complex z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; }

void require_circle(const Connection& c, const char* op) {
  if (c.dim() != 1) throw DomainError(std::string(op) + ": spectral side is only available on the circle");
}

Complex integral(const TrigPolyForm& form, int dim) { return integrate_scalar(form, SubTorus::full(dim)); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= double(i);
  return f;
}

}  // namespace

std::string to_string(ResidualMode mode) {
  switch (mode) {
    case ResidualMode::absolute:
      return "absolute";
    case ResidualMode::mod_z:
      return "mod_z";
    case ResidualMode::integer:
      return "integer";
  }
  return "absolute";
}

double residual_for(ResidualMode mode, Complex lhs, Complex rhs) {
  switch (mode) {
    case ResidualMode::mod_z:
      return std::max(circle_distance(lhs.real(), rhs.real()), std::abs(lhs.imag() - rhs.imag()));
    case ResidualMode::integer:
    case ResidualMode::absolute:
      return std::abs(lhs - rhs);
  }
  return std::abs(lhs - rhs);
}

ReportEntry make_entry(std::string id, std::string identity, Complex lhs, Complex rhs, ResidualMode mode,
                       double tolerance, nlohmann::json details) {
  ReportEntry e;
  e.id = std::move(id);
  e.identity = std::move(identity);
  e.lhs = lhs;
  e.rhs = rhs;
  e.mode = mode;
  e.tolerance = tolerance;
  e.residual = residual_for(mode, lhs, rhs);
  e.pass = e.residual <= tolerance;
  if (mode == ResidualMode::integer) {
    e.pass = e.pass && lhs.imag() == 0.0 && lhs.real() == std::round(lhs.real());
  }
  e.details = std::move(details);
  return e;
}

bool VerificationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

void to_json(nlohmann::json& j, const ReportEntry& e) {
  j = nlohmann::json{{"id", e.id},
                     {"identity", e.identity},
                     {"lhs", complex_json(e.lhs)},
                     {"rhs", complex_json(e.rhs)},
                     {"residual", e.residual},
                     {"mode", to_string(e.mode)},
                     {"tolerance", e.tolerance},
                     {"pass", e.pass},
                     {"details", e.details}};
}

void to_json(nlohmann::json& j, const VerificationReport& r) {
  j = nlohmann::json::array();
  for (const auto& e : r.entries) j.push_back(e);
}

ConnectionPath linear_path(const Connection& c0, const Connection& c1) {
  if (c0.dim() != c1.dim() || c0.rank() != c1.rank()) throw ShapeError("linear_path: shape mismatch");
  return [c0, c1](double t) { return c0.with_form(Complex(1.0 - t) * c0.form() + Complex(t) * c1.form()); };
}

ReportEntry check_r_deformation(const Connection& c, double r, double tol) {
  if (!is_flat(c, 1e-9)) throw DomainError("check_r_deformation: connection is not flat");
  const int d = c.dim();
  const TrigPolyForm lhs = cs_form(hermitian_part(c), r_deformation(c, r));
  TrigPolyForm rhs = TrigPolyForm::zero(d, 1);
  for (int j = 0; 2 * j + 1 <= d; ++j) {
    rhs += (a_coeff(j, r) / factorial(j)) * chern_odd(c, j);
  }
  rhs *= Complex(-r / (2.0 * kPi));

  double worst = -1.0;
  Complex worst_l, worst_r;
  nlohmann::json per_cycle = nlohmann::json::array();
  for (const SubTorus& cycle : odd_subtori(d)) {
    const Complex l = integrate_scalar(lhs, cycle);
    const Complex rr = integrate_scalar(rhs, cycle);
    const double res = std::abs(l - rr);
    per_cycle.push_back({{"free", cycle.free.indices()}, {"residual", res}});
    if (res > worst) {
      worst = res;
      worst_l = l;
      worst_r = rr;
    }
  }
  return make_entry("r_deformation", "int CS(nabla^e, nabla^e(r)) = -(r/2pi) sum_j a_j(r)/j! int c_{2j+1}", worst_l,
                    worst_r, ResidualMode::absolute, tol, {{"r", r}, {"subtori", per_cycle}});
}

ReportEntry check_gilkey(const Connection& c0, const Connection& c1, double tol) {
  require_circle(c0, "check_gilkey");
  require_circle(c1, "check_gilkey");
  const EtaValue e0 = eta_s1(c0);
  const EtaValue e1 = eta_s1(c1);
  const Complex cs = integral(cs_form(c0, c1), 1);
  return make_entry("gilkey", "etabar(1) - etabar(0) = int L CS(nabla_0, nabla_1) mod Z",
                    e1.reduced - e0.reduced, cs, ResidualMode::mod_z, tol,
                    {{"eta0", complex_json(e0.reduced)}, {"eta1", complex_json(e1.reduced)}});
}

ReportEntry check_variation_c(const ConnectionPath& path, int cutoff, int m0, double tol) {
  const Connection c0 = path(0.0);
  const Connection c1 = path(1.0);
  require_circle(c0, "check_variation_c");
  const EtaValue e0 = eta_s1(c0);
  const EtaValue e1 = eta_s1(c1);
  const OperatorPath op = [&path, cutoff](double t) { return build_truncation(path(t), cutoff); };
  const EigenvalueTrack tr = track_operator_path(op, m0);
  const int sf = spectral_flow(tr);
  const Complex cs = integral(cs_form(c0, c1), 1);
  return make_entry("variation_c", "etabar(1) - etabar(0) = sf + int L CS(nabla_0, nabla_1) in C",
                    e1.reduced - e0.reduced, double(kFlowOrientation * sf) + cs, ResidualMode::absolute, tol,
                    {{"sf", sf},
                     {"orientation", kFlowOrientation},
                     {"cs", complex_json(cs)},
                     {"eta0", complex_json(e0.reduced)},
                     {"eta1", complex_json(e1.reduced)},
                     {"grid_points", tr.ts.size()}});
}

std::vector<ReportEntry> check_re_im(const Connection& c, double tol_re, double tol_im) {
  require_circle(c, "check_re_im");
  const EtaValue eta = eta_s1(c);
  const EtaValue eta_e = eta_s1(hermitian_part(c));
  const RPolynomial poly = cs_r_poly(c);
  Complex even = 0.0, odd = 0.0;
  for (int i = 0; i <= poly.degree(); ++i) {
    const Complex a = integral(poly.coeffs[i], c.dim());
    if (i % 2 == 0) {
      even += ((i / 2) % 2 == 0 ? 1.0 : -1.0) * a;
    } else {
      odd += (((i - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * a;
    }
  }
  std::vector<ReportEntry> out;
  out.push_back(make_entry("re_im_real", "Re etabar = etabar(nabla^e) + sum_even (-1)^{i/2} int a_i mod Z",
                           Complex(eta.reduced.real()), Complex((eta_e.reduced + even).real()),
                           ResidualMode::mod_z, tol_re));
  out.push_back(make_entry("re_im_imag", "Im etabar = sum_odd (-1)^{(i-1)/2} int a_i",
                           Complex(eta.reduced.imag()), odd, ResidualMode::absolute, tol_im));
  return out;
}

PsiValue psi(const Connection& c) {
  const int d = c.dim();
  PsiValue out;
  Complex local = 0.0;
  for (int j = 1; 2 * j + 1 <= d; ++j) {
    const double coeff = std::pow(2.0, 2 * j) * factorial(j) / factorial(2 * j + 1);
    local += coeff * integral(chern_odd(c, j), d);
  }
  out.local = (-local / (2.0 * kPi)).real() + 0.0;  // no negative zero in reports
  out.r_alpha = std::exp(kPi * out.local);

  // c_1 only has a top-degree part on the circle.
  if (d == 1) {
    const double c1 = integral(chern_odd(c, 0), d).real() / (2.0 * kPi);
    out.spectral = eta_s1(c).reduced.imag() + c1;
  } else if (c.form().is_constant()) {
    try {
      const EtaValue e = eta_by_symmetry(build_truncation(c, 1));
      out.spectral = e.reduced.imag();
    } catch (const DomainError&) {
      // Spectrum not symmetric: no spectral route.
    }
  }
  return out;
}

std::vector<ReportEntry> check_psi(const ConnectionPath& path, int samples, double tol) {
  if (samples < 1) throw DomainError("check_psi: samples must be >= 1");
  const PsiValue first = psi(path(0.0));
  double worst_var = 0.0, worst_route = -1.0;
  double var_value = first.local;
  Complex route_l, route_r;
  for (int i = 0; i <= samples; ++i) {
    const double t = double(i) / double(samples);
    const Connection c = path(t);
    if (!is_flat(c, 1e-9)) throw DomainError("check_psi: path leaves the flat connections");
    const PsiValue p = psi(c);
    if (std::abs(p.local - first.local) > worst_var) {
      worst_var = std::abs(p.local - first.local);
      var_value = p.local;
    }
    if (p.spectral && std::abs(*p.spectral - p.local) > worst_route) {
      worst_route = std::abs(*p.spectral - p.local);
      route_l = *p.spectral;
      route_r = p.local;
    }
  }
  std::vector<ReportEntry> out;
  out.push_back(make_entry("psi_constant", "Psi is locally constant on flat connections", var_value,
                           first.local, ResidualMode::absolute, tol,
                           {{"psi0", first.local}, {"r_alpha", first.r_alpha}, {"samples", samples}}));
  if (worst_route >= 0.0) {
    out.push_back(make_entry("psi_routes", "Im etabar + (1/2pi) int L c_1 = local expression of Psi", route_l,
                             route_r, ResidualMode::absolute, tol));
  }
  return out;
}

Complex eta_tilde(const Connection& c, const Connection& ref) {
  return integral(cs_form(hermitian_part(ref), c), c.dim());
}

ReportEntry check_eta_tilde(const Connection& c, const Connection& ref, double tol) {
  require_circle(c, "check_eta_tilde");
  const Complex et = eta_tilde(c, ref);
  const EtaValue e = eta_s1(c);
  return make_entry("eta_tilde", "Im eta_tilde = Im etabar", Complex(et.imag()), Complex(e.reduced.imag()),
                    ResidualMode::absolute, tol, {{"eta_tilde", complex_json(et)}});
}

Complex bk_phase_factor(int rank, const EtaValue& eta_sig_trivial) {
  return std::exp(Complex(0.0, kPi * double(rank)) * eta_sig_trivial.reduced);
}

ReportEntry check_gauge_flow(const Connection& c, int w, int cutoff, int m0, double tol) {
  const OperatorPath op = [&c, w, cutoff](double t) { return build_truncation(gauge_path(c, w, t), cutoff); };
  const EigenvalueTrack tr = track_operator_path(op, m0);
  const FlowCounts counts = flow_counts(tr);
  const Complex ch = integral(odd_chern_char(winding_gauge(c.dim(), c.rank(), w)), c.dim());
  return make_entry("gauge_flow", "sf(D, D^{g^-1 nabla g}) = int L ch(g)",
                    double(kFlowOrientation * counts.value()), ch, ResidualMode::integer, tol,
                    {{"w", w},
                     {"sf", counts.value()},
                     {"to_negative", counts.to_negative},
                     {"to_nonnegative", counts.to_nonnegative},
                     {"orientation", kFlowOrientation}});
}

BkJumpScan scan_eta_bk(const ConnectionPath& family, const std::vector<double>& ts, int cutoff) {
  if (ts.size() < 2) throw DomainError("scan_eta_bk: need at least two parameter values");
  constexpr double kImaginaryTol = 1e-9;
  std::vector<Connection> cs;
  std::vector<EtaValue> etas;
  std::vector<int> ms;
  for (double t : ts) {
    cs.push_back(family(t));
    require_circle(cs.back(), "scan_eta_bk");
    etas.push_back(eta_s1(cs.back()));
    const std::vector<Complex> spec = spectrum(build_truncation(cs.back(), cutoff));
    ms.push_back(m_minus(spec, kImaginaryTol));
  }
  TrackOptions opt;
  opt.reject_axis_endpoints = false;
  BkJumpScan scan;
  bool all_follow = true, any_m = false;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const OperatorPath op = [&family, cutoff](double t) { return build_truncation(family(t), cutoff); };
    const int sf = spectral_flow(track_operator_path(op, 4, opt, ts[i], ts[i + 1]));
    const Complex cs_int = integral(cs_form(cs[i], cs[i + 1]), 1);
    const Complex d_bk = eta_bk(etas[i + 1], ms[i + 1]) - eta_bk(etas[i], ms[i]);
    const int dm = ms[i + 1] - ms[i];
    scan.residual =
        std::max(scan.residual, std::abs(d_bk - (double(kFlowOrientation * sf) + cs_int - double(dm))));
    BkJump jump;
    jump.t0 = ts[i];
    jump.t1 = ts[i + 1];
    jump.jump = static_cast<int>(std::lround((d_bk - cs_int).real()));
    jump.delta_m = dm;
    jump.sf = sf;
    all_follow = all_follow && jump.jump == -dm;
    any_m = any_m || dm != 0;
    scan.intervals.push_back(jump);
  }
  scan.jumps_follow_m = all_follow && any_m;
  return scan;
}

ReportEntry check_eta_bk_jumps(const ConnectionPath& family, const std::vector<double>& ts, int cutoff,
                               double tol) {
  const BkJumpScan scan = scan_eta_bk(family, ts, cutoff);
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& j : scan.intervals) {
    if (j.jump != 0 || j.delta_m != 0 || j.sf != 0) {
      jumps.push_back({{"t0", j.t0}, {"t1", j.t1}, {"jump", j.jump}, {"delta_m", j.delta_m}, {"sf", j.sf}});
    }
  }
  return make_entry("eta_bk_jumps", "Delta eta_BK = sf + int L CS - Delta m_minus", scan.residual, 0.0,
                    ResidualMode::absolute, tol, {{"jumps", jumps}, {"jumps_follow_m", scan.jumps_follow_m}});
}

}  // namespace flateta
