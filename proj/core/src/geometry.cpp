#include "flateta/geometry.hpp"

#include <algorithm>
#include <boost/math/special_functions/bernoulli.hpp>
#include <cmath>
#include <string>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

constexpr double kHermitianTol = 1e-12;

std::vector<std::vector<double>> sample_grid(int dim) {
  const int per_axis = dim <= 5 ? 3 : 2;
  std::vector<std::vector<double>> points;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) x[j] = double(idx[j]) / per_axis + 0.1 * j / dim;
    points.push_back(std::move(x));
    int j = 0;
    while (j < dim && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == dim) break;
  }
  return points;
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
  std::vector<double> nodes(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

void require_compatible(const Connection& c0, const Connection& c1, const char* op) {
  if (c0.dim() != c1.dim() || c0.rank() != c1.rank()) {
    throw ShapeError(std::string(op) + ": connections live on different bundles");
  }
  if (!approx_equal(c0.metric(), c1.metric(), kHermitianTol)) {
    throw ShapeError(std::string(op) + ": connections carry different metrics");
  }
}

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

// Connection ------------------------------------------------------------------

Connection::Connection(TrigPolyForm a, TrigPolyForm g) : a_(std::move(a)), g_(std::move(g)) {
  if (a_.dim() != g_.dim() || a_.rank() != g_.rank()) throw ShapeError("Connection: form and metric shapes differ");
  if (a_.has_degree_other_than(1)) throw DomainError("Connection: connection form must be a pure 1-form");
  if (g_.has_degree_other_than(0) || g_.empty()) throw DomainError("Connection: metric must be a nonzero 0-form");
  const double scale = std::max(1.0, g_.max_abs());
  if (!approx_equal(dagger(g_), g_, kHermitianTol * scale)) throw DomainError("Connection: metric is not Hermitian");
  for (const auto& x : sample_grid(dim())) {
    const CMatrix gx = g_.coefficient_at(IndexSet(), x);
    Eigen::LLT<CMatrix> llt(gx);
    if (llt.info() != Eigen::Success) throw DomainError("Connection: metric is not positive definite on the sample grid");
  }
}

Connection::Connection(TrigPolyForm a) : Connection(a, TrigPolyForm::identity(a.dim(), a.rank())) {}

Connection Connection::trivial(int dim, int rank) { return Connection(TrigPolyForm::zero(dim, rank)); }

Connection Connection::constant(int dim, std::span<const CMatrix> a) {
  return Connection(TrigPolyForm::constant_one_form(dim, a));
}

Connection Connection::circle(Complex mu) {
  return Connection(TrigPolyForm::scalar(1, kTwoPiI * mu, {0}, IndexSet::of({0})));
}

Connection Connection::circle_diagonal(std::span<const Complex> mus) {
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(mus.size()), static_cast<Eigen::Index>(mus.size()));
  for (std::size_t k = 0; k < mus.size(); ++k) a(k, k) = kTwoPiI * mus[k];
  return Connection(TrigPolyForm::monomial(1, a, {0}, IndexSet::of({0})));
}

TrigPolyForm zero_form_inverse(const TrigPolyForm& g) {
  if (g.has_degree_other_than(0)) throw DomainError("zero_form_inverse: argument must be a 0-form");
  if (g.is_constant()) {
    const CMatrix m = g.fourier_coefficient(Frequency(static_cast<std::size_t>(g.dim()), 0), IndexSet());
    Eigen::FullPivLU<CMatrix> lu(m);
    if (!lu.isInvertible()) throw DomainError("zero_form_inverse: matrix is singular");
    return TrigPolyForm::constant(g.dim(), lu.inverse());
  }
  TrigPolyForm gd = dagger(g);
  const TrigPolyForm id = TrigPolyForm::identity(g.dim(), g.rank());
  if (approx_equal(wedge(g, gd), id, 1e-11) && approx_equal(wedge(gd, g), id, 1e-11)) return gd;
  throw DomainError("zero_form_inverse: inverse is not a trigonometric polynomial (need constant or unitary)");
}

TrigPolyForm curvature(const Connection& c) { return ext_d(c.form()) + wedge(c.form(), c.form()); }

TrigPolyForm omega_metric(const Connection& c) {
  const TrigPolyForm& a = c.form();
  const TrigPolyForm& g = c.metric();
  const TrigPolyForm nabla_g = ext_d(g) - wedge(dagger(a), g) - wedge(g, a);
  return wedge(zero_form_inverse(g), nabla_g);
}

Connection hermitian_part(const Connection& c) { return c.with_form(c.form() + 0.5 * omega_metric(c)); }

Connection adjoint_connection(const Connection& c) { return c.with_form(c.form() + omega_metric(c)); }

Connection r_deformation(const Connection& c, Complex r) {
  const TrigPolyForm omega = omega_metric(c);
  return c.with_form(c.form() + 0.5 * omega + (Complex(0.0, 0.5) * r) * omega);
}

bool is_flat(const Connection& c, double tol) { return curvature(c).max_abs() <= tol; }

bool is_unitary(const Connection& c, double tol) { return omega_metric(c).max_abs() <= tol; }

TrigPolyForm chern_odd(const Connection& c, int j) {
  if (j < 0) throw DomainError("chern_odd: j must be >= 0");
  const Complex scale = std::pow(kTwoPiI, -j) * std::pow(2.0, -(2 * j + 1));
  return scale * mat_trace(wedge_power(omega_metric(c), 2 * j + 1));
}

Complex a_coeff(int j, Complex r) {
  if (j < 0) throw DomainError("a_coeff: j must be >= 0");
  Complex sum = 0.0;
  double binom = 1.0;
  const Complex r2 = r * r;
  Complex r2m = 1.0;
  for (int m = 0; m <= j; ++m) {
    sum += binom * r2m / (2.0 * m + 1.0);
    binom = binom * (j - m) / (m + 1.0);
    r2m *= r2;
  }
  return sum;
}

Rational a_coeff_exact(int j, Rational r_squared) {
  if (j < 0) throw DomainError("a_coeff_exact: j must be >= 0");
  Rational sum(0);
  std::int64_t binom = 1;
  Rational r2m(1);
  for (int m = 0; m <= j; ++m) {
    sum += Rational(binom) * r2m / Rational(2 * m + 1);
    binom = binom * (j - m) / (m + 1);
    r2m *= r_squared;
  }
  return sum;
}

TrigPolyForm cs_form(const Connection& c0, const Connection& c1, SqrtBranch branch) {
  require_compatible(c0, c1, "cs_form");
  const TrigPolyForm& a0 = c0.form();
  const TrigPolyForm adot = c1.form() - a0;
  TrigPolyForm integral(c0.dim(), 1);
  if (adot.empty()) return integral;
  // The t-integrand has degree <= 2 * floor((d-1)/2) in t.
  const int nodes = (c0.dim() + 1) / 2 + 1;
  const auto [ts, ws] = gauss_legendre_unit(nodes);
  for (int i = 0; i < nodes; ++i) {
    const TrigPolyForm at = a0 + ts[i] * adot;
    const TrigPolyForm theta = ext_d(at) + wedge(at, at);
    const TrigPolyForm e = exp_nilpotent(-theta);
    integral += ws[i] * mat_trace(wedge(adot, e)).odd_part();
  }
  return (-1.0 / sqrt_two_pi_i(branch)) * phi_normalize(integral, branch);
}

TrigPolyForm RPolynomial::evaluate(Complex r) const {
  if (coeffs.empty()) throw DomainError("RPolynomial: empty");
  TrigPolyForm out = coeffs.back();
  for (int i = degree() - 1; i >= 0; --i) out = r * out + coeffs[i];
  return out;
}

RPolynomial cs_r_poly(const Connection& c, SqrtBranch branch) {
  // The r-polynomial has degree <= d; sample on n = d + 2 roots of unity and
  // invert the discrete Fourier transform.
  const int d = c.dim();
  const int n = d + 2;
  const Connection base = hermitian_part(c);
  std::vector<TrigPolyForm> samples;
  samples.reserve(n);
  for (int m = 0; m < n; ++m) {
    const Complex r = std::exp(kTwoPiI * (double(m) / n));
    samples.push_back(cs_form(base, r_deformation(c, r), branch));
  }
  RPolynomial poly;
  for (int i = 0; i <= d; ++i) {
    TrigPolyForm ai(d, 1);
    for (int m = 0; m < n; ++m) ai += std::exp(-kTwoPiI * (double(i) * m / n)) * samples[m];
    poly.coeffs.push_back((1.0 / n) * ai);
  }
  return poly;
}

TrigPolyForm chern_character(const Connection& c, SqrtBranch branch) {
  return phi_normalize(mat_trace(exp_nilpotent(-curvature(c))), branch);
}

TrigPolyForm l_form(const TrigPolyForm& curv, SqrtBranch branch) {
  if (curv.has_degree_other_than(2) && !curv.empty()) throw DomainError("l_form: curvature must be a 2-form");
  const int dim = curv.dim();
  TrigPolyForm one = TrigPolyForm::identity(dim, 1);
  // R^{2n} has degree 4n, so only n <= dim/4 survives.
  const int order = dim / 4;
  if (curv.empty() || order == 0) return one;
  // log((x/2) coth(x/2)) = sum_n l_n x^{2n}; (x/2)coth(x/2) = sum B_{2n} x^{2n} / (2n)!.
  std::vector<double> s(static_cast<std::size_t>(order + 1), 0.0);
  double factorial = 1.0;
  for (int n = 1; n <= order; ++n) {
    factorial *= double(2 * n - 1) * double(2 * n);
    s[n] = boost::math::bernoulli_b2n<double>(n) / factorial;
  }
  std::vector<double> log_series(s.size(), 0.0);
  std::vector<double> power = s;
  for (int m = 1; m <= order; ++m) {
    const double c = ((m % 2 == 1) ? 1.0 : -1.0) / m;
    for (std::size_t i = 0; i < s.size(); ++i) log_series[i] += c * power[i];
    power = series_mul(power, s);
  }
  const TrigPolyForm r2 = wedge(curv, curv);
  TrigPolyForm trace_log(dim, 1);
  TrigPolyForm r2n = TrigPolyForm::identity(dim, curv.rank());
  for (int n = 1; n <= order; ++n) {
    r2n = wedge(r2n, r2);
    trace_log += log_series[n] * mat_trace(r2n);
  }
  return phi_normalize(exp_nilpotent(0.5 * trace_log), branch);
}

TrigPolyForm flat_l_form(int dim) { return TrigPolyForm::identity(dim, 1); }

TrigPolyForm odd_chern_char(const TrigPolyForm& gmap, SqrtBranch branch) {
  const TrigPolyForm theta = wedge(zero_form_inverse(gmap), ext_d(gmap));
  TrigPolyForm sum(gmap.dim(), 1);
  TrigPolyForm power = theta;
  const TrigPolyForm theta2 = wedge(theta, theta);
  double m_factorial = 1.0;
  double odd_factorial = 1.0;  // (2m+1)!
  for (int m = 0; 2 * m + 1 <= gmap.dim(); ++m) {
    if (m > 0) {
      m_factorial *= m;
      odd_factorial *= double(2 * m) * double(2 * m + 1);
      power = wedge(power, theta2);
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    sum += (sign * m_factorial / odd_factorial) * mat_trace(power);
  }
  return (1.0 / sqrt_two_pi_i(branch)) * phi_normalize(sum, branch);
}

Connection gauge_transform(const Connection& c, const TrigPolyForm& gmap) {
  if (gmap.dim() != c.dim() || gmap.rank() != c.rank()) throw ShapeError("gauge_transform: shape mismatch");
  const TrigPolyForm ginv = zero_form_inverse(gmap);
  TrigPolyForm a = wedge(wedge(ginv, c.form()), gmap) + wedge(ginv, ext_d(gmap));
  TrigPolyForm g = wedge(wedge(dagger(gmap), c.metric()), gmap);
  return Connection(a.pruned(1e-15), g.pruned(1e-15));
}

CMatrix holonomy(const Connection& c, int direction, std::span<const double> base, int steps) {
  if (direction < 0 || direction >= c.dim()) throw DomainError("holonomy: direction out of range");
  if (static_cast<int>(base.size()) != c.dim()) throw ShapeError("holonomy: base point has wrong dimension");
  if (steps < 1) throw DomainError("holonomy: steps must be positive");
  const IndexSet dx = IndexSet::of({direction});
  std::vector<double> x(base.begin(), base.end());
  auto field = [&](double s) {
    x[direction] = s;
    return CMatrix(-c.form().coefficient_at(dx, x));
  };
  CMatrix u = CMatrix::Identity(c.rank(), c.rank());
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const CMatrix f0 = field(s);
    const CMatrix fm = field(s + 0.5 * h);
    const CMatrix f1 = field(s + h);
    const CMatrix k1 = f0 * u;
    const CMatrix k2 = fm * (u + 0.5 * h * k1);
    const CMatrix k3 = fm * (u + 0.5 * h * k2);
    const CMatrix k4 = f1 * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

Complex pair_over(const TrigPolyForm& weight, const TrigPolyForm& form, const SubTorus& cycle) {
  return integrate_scalar(wedge(weight, form), cycle);
}

void to_json(nlohmann::json& j, const Connection& c) {
  j = nlohmann::json{{"dim", c.dim()}, {"rank", c.rank()}, {"A", c.form()}, {"g", c.metric()}};
}

Connection connection_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("Connection: expected an object");
  for (const auto& item : j.items()) {
    if (item.key() != "dim" && item.key() != "rank" && item.key() != "A" && item.key() != "g") {
      throw SchemaError("Connection: unknown key '" + item.key() + "'");
    }
  }
  if (!j.contains("A")) throw SchemaError("Connection: 'A' required");
  TrigPolyForm a = form_from_json(j["A"]);
  if (j.contains("dim") && j["dim"] != a.dim()) throw SchemaError("Connection: 'dim' disagrees with A");
  if (j.contains("rank") && j["rank"] != a.rank()) throw SchemaError("Connection: 'rank' disagrees with A");
  try {
    if (j.contains("g")) return Connection(std::move(a), form_from_json(j["g"]));
    return Connection(std::move(a));
  } catch (const ShapeError& e) {
    throw SchemaError(e.what());
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace flateta
