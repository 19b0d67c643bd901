#pragma once

// Connections on trivialized bundles over T^d and their characteristic and
// transgression forms.
//
// A connection is  nabla = d + A  with A a matrix-valued 1-form; the metric g
// is a Hermitian positive-definite 0-form (identity by default). Sections are
// column vectors and <u, v>_g = u^* g v. With this convention
//
//   (nabla g) = dg - A^* g - g A,     omega = g^{-1} (nabla g),
//
// and  nabla + omega  is the g-adjoint connection, nabla + omega/2 is the
// Hermitian part, and nabla^{e,(r)} = nabla^e + (i r / 2) omega.

#include <boost/rational.hpp>
#include <cstdint>
#include <span>
#include <vector>

#include "flateta/forms.hpp"

namespace flateta {

class Connection {
 public:
  /// Validates: A is a pure 1-form, g a Hermitian 0-form positive definite on
  /// a 3^d sample grid. Throws ShapeError / DomainError.
  Connection(TrigPolyForm a, TrigPolyForm g);
  explicit Connection(TrigPolyForm a);

  static Connection trivial(int dim, int rank);
  /// nabla = d + sum_j a[j] dx_j with constant matrices.
  static Connection constant(int dim, std::span<const CMatrix> a);
  /// Rank-1 connection d + 2 pi i mu dx_1 on the circle.
  static Connection circle(Complex mu);
  /// Diagonal constant connection on the circle with entries 2 pi i mu_k.
  static Connection circle_diagonal(std::span<const Complex> mus);

  int dim() const { return a_.dim(); }
  int rank() const { return a_.rank(); }
  const TrigPolyForm& form() const { return a_; }
  const TrigPolyForm& metric() const { return g_; }

  Connection with_form(TrigPolyForm a) const { return Connection(std::move(a), g_); }

 private:
  TrigPolyForm a_;
  TrigPolyForm g_;
};

/// Exact inverse of a 0-form when it is a trigonometric polynomial: constant
/// matrices and pointwise-unitary forms. Throws DomainError otherwise.
TrigPolyForm zero_form_inverse(const TrigPolyForm& g);

TrigPolyForm curvature(const Connection& c);
TrigPolyForm omega_metric(const Connection& c);
Connection hermitian_part(const Connection& c);
Connection adjoint_connection(const Connection& c);
Connection r_deformation(const Connection& c, Complex r);

bool is_flat(const Connection& c, double tol = kDefaultFormTolerance);
bool is_unitary(const Connection& c, double tol = kDefaultFormTolerance);

/// c_{2j+1} = (2 pi i)^{-j} 2^{-(2j+1)} Tr[omega^{2j+1}].
TrigPolyForm chern_odd(const Connection& c, int j);

/// a_j(r) = int_0^1 (1 + u^2 r^2)^j du in closed form.
Complex a_coeff(int j, Complex r);

using Rational = boost::rational<std::int64_t>;
/// a_j(r) as an exact rational, for r^2 rational.
Rational a_coeff_exact(int j, Rational r_squared);

/// Chern-Simons transgression along the linear path A_t = (1-t)A_0 + t A_1,
/// integrated exactly in t by Gauss-Legendre.
TrigPolyForm cs_form(const Connection& c0, const Connection& c1,
                     SqrtBranch branch = SqrtBranch::principal);

/// Coefficients a_i, i = 0..d, with
///   cs_form(hermitian_part(c), r_deformation(c, r)) = sum_i a_i r^i.
struct RPolynomial {
  std::vector<TrigPolyForm> coeffs;

  TrigPolyForm evaluate(Complex r) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

RPolynomial cs_r_poly(const Connection& c, SqrtBranch branch = SqrtBranch::principal);

/// phi Tr[exp(-curvature)].
TrigPolyForm chern_character(const Connection& c, SqrtBranch branch = SqrtBranch::principal);

/// Normalized Hirzebruch form  phi det^{1/2}( (R/2) / tanh(R/2) )  for a
/// matrix of 2-forms R; the constant term is 1 and R = 0 gives exactly 1.
TrigPolyForm l_form(const TrigPolyForm& curv, SqrtBranch branch = SqrtBranch::principal);

/// L-form of the flat metric on T^d: the constant 1.
TrigPolyForm flat_l_form(int dim);

/// Odd Chern character of a gauge transformation,
///   sum_m (-1)^m m!/(2m+1)! (2 pi i)^{-(m+1)} Tr[(g^{-1}dg)^{2m+1}],
/// normalized so that its integral over T^1 is the winding number of det g.
TrigPolyForm odd_chern_char(const TrigPolyForm& gmap, SqrtBranch branch = SqrtBranch::principal);

/// g^{-1} nabla g : A -> g^{-1} A g + g^{-1} dg, metric -> g^* G g.
Connection gauge_transform(const Connection& c, const TrigPolyForm& gmap);

/// Parallel transport around the loop in coordinate `direction` starting at
/// `base`, i.e. the solution operator of u' = -A_direction(x) u over [0,1].
/// For constant A this is exp(-A_direction).
CMatrix holonomy(const Connection& c, int direction, std::span<const double> base,
                 int steps = 4096);

/// int_cycle weight ^ form for rank-1 forms (degree-|cycle| part only).
Complex pair_over(const TrigPolyForm& weight, const TrigPolyForm& form, const SubTorus& cycle);

void to_json(nlohmann::json& j, const Connection& c);
Connection connection_from_json(const nlohmann::json& j);

}  // namespace flateta
