#pragma once

// Matrix-valued differential forms on the flat torus T^d = R^d / Z^d whose
// coefficients are finite Fourier series.
//
// A term is  M * exp(2 pi i k.x) dx_I  with M an r x r complex matrix,
// k in Z^d and I a strictly increasing index set. Coordinates are
// x in [0,1)^d, so every torus and coordinate sub-torus has unit volume and
// all factors of 2 pi live in ext_d() and phi_normalize().
//
// Index sets are 0-based internally (bit j is dx_{j+1}); the JSON format
// uses 1-based indices.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace flateta {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Frequency = std::vector<int>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr Complex kTwoPiI{0.0, 2.0 * kPi};

/// Sorted subset of {0, ..., d-1}; canonical because it is a bitmask.
class IndexSet {
 public:
  constexpr IndexSet() = default;
  explicit constexpr IndexSet(std::uint32_t mask) : mask_(mask) {}

  static IndexSet of(std::initializer_list<int> indices);
  static IndexSet of(std::span<const int> indices);
  static constexpr IndexSet full(int dim) { return IndexSet((1u << dim) - 1u); }

  constexpr std::uint32_t mask() const { return mask_; }
  int degree() const;
  constexpr bool contains(int j) const { return (mask_ >> j) & 1u; }
  constexpr bool empty() const { return mask_ == 0; }
  std::vector<int> indices() const;

  auto operator<=>(const IndexSet&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Sign of dx_a ^ dx_b relative to dx_{a u b} for disjoint sets; 0 if they meet.
int merge_sign(IndexSet a, IndexSet b);

struct TermKey {
  Frequency k;
  IndexSet dx;

  auto operator<=>(const TermKey&) const = default;
};

class TrigPolyForm {
 public:
  using TermMap = std::map<TermKey, CMatrix>;

  TrigPolyForm(int dim, int rank);

  static TrigPolyForm zero(int dim, int rank) { return TrigPolyForm(dim, rank); }
  static TrigPolyForm identity(int dim, int rank);
  /// Constant (k = 0) degree-0 form with the given matrix.
  static TrigPolyForm constant(int dim, const CMatrix& m);
  static TrigPolyForm monomial(int dim, const CMatrix& m, Frequency k, IndexSet dx);
  /// Scalar (rank 1) monomial c * exp(2 pi i k.x) dx_I.
  static TrigPolyForm scalar(int dim, Complex c, Frequency k, IndexSet dx);
  /// Constant 1-form  sum_j m[j] dx_j.
  static TrigPolyForm constant_one_form(int dim, std::span<const CMatrix> m);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Accumulates m into the (k, dx) slot; exact-zero results are erased.
  void add_term(const Frequency& k, IndexSet dx, const CMatrix& m);

  int max_degree() const;
  bool has_degree_other_than(int p) const;
  /// True when every frequency is zero.
  bool is_constant() const;

  TrigPolyForm degree_part(int p) const;
  TrigPolyForm even_part() const;
  TrigPolyForm odd_part() const;

  /// Coefficient matrix of dx_I at the point x (sum over frequencies).
  CMatrix coefficient_at(IndexSet dx, std::span<const double> x) const;
  /// The k-component of the dx_I coefficient (zero matrix if absent).
  CMatrix fourier_coefficient(const Frequency& k, IndexSet dx) const;

  /// Largest entry modulus over all stored coefficients.
  double max_abs() const;
  /// Copy with every term whose max-abs entry is <= tol removed.
  TrigPolyForm pruned(double tol) const;

  TrigPolyForm& operator+=(const TrigPolyForm& other);
  TrigPolyForm& operator-=(const TrigPolyForm& other);
  TrigPolyForm& operator*=(Complex s);

  friend TrigPolyForm operator+(TrigPolyForm a, const TrigPolyForm& b) { return a += b; }
  friend TrigPolyForm operator-(TrigPolyForm a, const TrigPolyForm& b) { return a -= b; }
  friend TrigPolyForm operator-(TrigPolyForm a) { return a *= -1.0; }
  friend TrigPolyForm operator*(Complex s, TrigPolyForm a) { return a *= s; }
  friend TrigPolyForm operator*(TrigPolyForm a, Complex s) { return a *= s; }

 private:
  int dim_;
  int rank_;
  TermMap terms_;
};

inline constexpr double kDefaultFormTolerance = 1e-12;

/// Structural equality of canonical term maps up to an absolute tolerance.
bool approx_equal(const TrigPolyForm& a, const TrigPolyForm& b,
                  double tol = kDefaultFormTolerance);

TrigPolyForm wedge(const TrigPolyForm& a, const TrigPolyForm& b);
TrigPolyForm ext_d(const TrigPolyForm& a);
TrigPolyForm mat_trace(const TrigPolyForm& a);
/// Conjugate transpose of every coefficient with k -> -k.
TrigPolyForm dagger(const TrigPolyForm& a);
/// Graded commutator [a, b] = a^b - (-1)^{|a||b|} b^a for homogeneous a, b.
TrigPolyForm graded_commutator(const TrigPolyForm& a, const TrigPolyForm& b);
/// a^n, with a^0 the identity 0-form.
TrigPolyForm wedge_power(const TrigPolyForm& a, int n);

/// Sum_n coeffs[n] a^n for a nilpotent a (only even degree >= 2); stops at
/// the first power that vanishes by degree.
TrigPolyForm nilpotent_series(const TrigPolyForm& a, std::span<const Complex> coeffs);
TrigPolyForm exp_nilpotent(const TrigPolyForm& a);
/// log(u) for u = I + n with n nilpotent of even degree >= 2.
TrigPolyForm log_unipotent(const TrigPolyForm& u);

enum class SqrtBranch { principal, flipped };

/// The fixed square root of 2 pi i; principal is sqrt(2 pi) e^{i pi / 4}.
Complex sqrt_two_pi_i(SqrtBranch branch = SqrtBranch::principal);

/// Scales the degree-p part by (2 pi i)^{-p/2} using the chosen root.
TrigPolyForm phi_normalize(const TrigPolyForm& a,
                           SqrtBranch branch = SqrtBranch::principal);

/// Coordinate sub-torus: coordinates in `free` vary over [0,1), the rest
/// are pinned at base[j].
struct SubTorus {
  IndexSet free;
  std::vector<double> base;

  static SubTorus full(int dim);
  static SubTorus coordinate(int dim, IndexSet free);
  int dim() const { return static_cast<int>(base.size()); }
};

/// All odd-dimensional coordinate sub-tori of T^d, base point at the origin.
std::vector<SubTorus> odd_subtori(int dim);

/// Integral of a over the cycle, positively oriented by dx_{j1}^...^dx_{jp}
/// with j1 < ... < jp. Every term must have degree |free|.
CMatrix integrate(const TrigPolyForm& a, const SubTorus& cycle);

/// Integral of the degree-|free| part of a rank-1 form.
Complex integrate_scalar(const TrigPolyForm& a, const SubTorus& cycle);

void to_json(nlohmann::json& j, const TrigPolyForm& a);
TrigPolyForm form_from_json(const nlohmann::json& j);

}  // namespace flateta
