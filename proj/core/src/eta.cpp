#include "flateta/eta.hpp"

#include <algorithm>
#include <boost/math/special_functions/bernoulli.hpp>
#include <cmath>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

constexpr int kEulerMaclaurinTerms = 14;

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

bool is_diagonal_form(const TrigPolyForm& a) {
  for (const auto& [key, m] : a.terms()) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
      }
    }
  }
  return true;
}

/// Neville extrapolation of (x_i, y_i) to x = 0.
Complex extrapolate_to_zero(std::vector<double> x, std::vector<Complex> y) {
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
    }
  }
  return y[0];
}

}  // namespace

EtaValue EtaValue::make(Complex eta, int kernel_dim) {
  EtaValue v;
  v.eta = eta;
  v.kernel_dim = kernel_dim;
  v.reduced = 0.5 * (eta + double(kernel_dim));
  return v;
}

Complex hurwitz_zeta(Complex s, Complex a) {
  if (a.real() <= 0.0) throw DomainError("hurwitz_zeta: requires Re a > 0 (shift by integers first)");
  if (s == Complex(1.0, 0.0)) throw DomainError("hurwitz_zeta: pole at s = 1");
  const int m = 25 + static_cast<int>(std::ceil(2.0 * std::abs(s)));
  Complex sum = 0.0;
  for (int n = 0; n < m; ++n) sum += std::exp(-s * std::log(double(n) + a));
  const Complex big = double(m) + a;
  const Complex log_big = std::log(big);
  sum += std::exp((1.0 - s) * log_big) / (s - 1.0);
  sum += 0.5 * std::exp(-s * log_big);
  // Euler-Maclaurin corrections B_{2k}/(2k)! (s)_{2k-1} big^{-s-2k+1}.
  Complex pochhammer = s;  // (s)_1
  double factorial = 2.0;  // (2k)!
  Complex power = std::exp((-s - 1.0) * log_big);
  const Complex inv_big2 = 1.0 / (big * big);
  for (int k = 1; k <= kEulerMaclaurinTerms; ++k) {
    const Complex term = boost::math::bernoulli_b2n<double>(k) / factorial * pochhammer * power;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    pochhammer *= (s + double(2 * k - 1)) * (s + double(2 * k));
    factorial *= double(2 * k + 1) * double(2 * k + 2);
    power *= inv_big2;
  }
  return sum;
}

EtaValue eta_s1_closed(std::span<const Complex> mus, double axis_tol) {
  Complex eta = 0.0;
  int kernel = 0;
  for (Complex mu : mus) {
    Complex shifted = mu - std::floor(mu.real());
    if (shifted.real() > 1.0 - axis_tol) shifted -= 1.0;
    if (std::abs(shifted.real()) <= axis_tol) {
      // The n = 0 eigenvalue sits on the imaginary axis: sum n != 0 only.
      eta += hurwitz_zeta(0.0, 1.0 + shifted) - hurwitz_zeta(0.0, 1.0 - shifted);
      ++kernel;
    } else {
      eta += hurwitz_zeta(0.0, shifted) - hurwitz_zeta(0.0, 1.0 - shifted);
    }
  }
  return EtaValue::make(eta, kernel);
}

std::vector<Complex> circle_exponents(const Connection& c) {
  if (c.dim() != 1) throw DomainError("circle_exponents: connection must live on the circle");
  const TrigPolyForm& a = c.form();
  const IndexSet dx = IndexSet::of({0});
  std::vector<Complex> out;
  if (a.is_constant() || is_diagonal_form(a)) {
    const CMatrix mean = a.fourier_coefficient({0}, dx);
    if (is_diagonal_form(a)) {
      for (Eigen::Index i = 0; i < mean.rows(); ++i) out.push_back(mean(i, i) / kTwoPiI);
    } else {
      Eigen::ComplexEigenSolver<CMatrix> solver(mean, false);
      for (Complex v : solver.eigenvalues()) out.push_back(v / kTwoPiI);
    }
  } else {
    const std::vector<double> base{0.0};
    const CMatrix hol = holonomy(c, 0, base, 8192);
    Eigen::ComplexEigenSolver<CMatrix> solver(hol, false);
    for (Complex h : solver.eigenvalues()) out.push_back(Complex(0.0, 1.0) * std::log(h) / (2.0 * kPi));
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

EtaValue eta_s1(const Connection& c, double axis_tol) {
  const std::vector<Complex> nus = circle_exponents(c);
  return eta_s1_closed(nus, axis_tol);
}

Complex eta_heat_estimate(const OperatorTruncation& t, std::span<const double> eps_grid) {
  if (!t.formally_self_adjoint) {
    throw DomainError("eta_heat_estimate: truncation is not formally self-adjoint");
  }
  if (eps_grid.size() < 1) throw DomainError("eta_heat_estimate: empty eps grid");
  const std::vector<Complex> spec = spectrum(t);
  std::vector<double> h;
  std::vector<Complex> values;
  for (double eps : eps_grid) {
    if (eps <= 0.0) throw DomainError("eta_heat_estimate: eps must be positive");
    const double root = std::sqrt(eps);
    double sum = 0.0;
    for (Complex lambda : spec) {
      const double x = lambda.real();
      if (x == 0.0) continue;
      sum += (x > 0.0 ? 1.0 : -1.0) * std::erfc(root * std::abs(x));
    }
    h.push_back(root);
    values.push_back(sum);
  }
  return extrapolate_to_zero(h, values);
}

std::vector<double> default_eps_grid(const OperatorTruncation& t, int points) {
  double largest = 1.0;
  for (Complex lambda : spectrum(t)) largest = std::max(largest, std::abs(lambda));
  // erfc(7) ~ 4e-23.
  const double h_min = 7.0 / largest;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    const double h = h_min * std::pow(1.25, i);
    grid.push_back(h * h);
  }
  return grid;
}

EtaValue eta_by_symmetry(const OperatorTruncation& t, double tol) {
  auto check = [tol](std::vector<Complex> vals) {
    std::vector<Complex> neg(vals.size());
    std::transform(vals.begin(), vals.end(), neg.begin(), [](Complex v) { return -v; });
    std::sort(vals.begin(), vals.end(), lex_less);
    std::sort(neg.begin(), neg.end(), lex_less);
    // Pairwise comparison after sorting, with a greedy fallback for
    // near-ties in the real part.
    std::vector<bool> used(neg.size(), false);
    for (Complex v : vals) {
      bool found = false;
      for (std::size_t j = 0; j < neg.size(); ++j) {
        if (!used[j] && std::abs(neg[j] - v) <= tol * std::max(1.0, std::abs(v))) {
          used[j] = true;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  std::vector<std::vector<Complex>> groups;
  if (t.block_diagonal) {
    std::vector<Complex> current;
    int mode = -2;
    for (const auto& e : spectrum_by_mode(t)) {
      if (e.mode != mode && !current.empty()) {
        groups.push_back(std::move(current));
        current.clear();
      }
      mode = e.mode;
      current.push_back(e.value);
    }
    if (!current.empty()) groups.push_back(std::move(current));
  } else {
    groups.push_back(spectrum(t));
  }
  int kernel = 0;
  for (const auto& g : groups) {
    if (!check(g)) throw DomainError("eta_by_symmetry: spectrum is not symmetric under lambda -> -lambda");
    for (Complex v : g) {
      if (std::abs(v.real()) <= tol) ++kernel;
    }
  }
  return EtaValue::make(0.0, kernel);
}

int m_minus(std::span<const Complex> spec, double tol) {
  return static_cast<int>(std::count_if(spec.begin(), spec.end(), [tol](Complex v) {
    return std::abs(v.real()) <= tol && v.imag() < -tol;
  }));
}

Complex eta_bk(const EtaValue& e, int m) { return e.reduced - double(m); }

double circle_distance(double a, double b) {
  const double x = a - b;
  return std::abs(x - std::round(x));
}

}  // namespace flateta
