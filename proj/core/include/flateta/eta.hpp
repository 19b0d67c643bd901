#pragma once

// Complex eta invariants.
//
// On the circle the twisted signature operator of a connection with holonomy
// exponents nu_k has spectrum { 2 pi (n + nu_k) : n in Z }, and
//
//   eta(0) = sum_k [ zeta_H(0, nu_k) - zeta_H(0, 1 - nu_k) ] = sum_k (1 - 2 nu_k)
//
// for 0 < Re nu_k < 1. Eigenvalues with Re = 0 are not summed; they are
// counted in kernel_dim like zero modes, so the reduced invariant
// (eta + h) / 2 is continuous from the side Re nu > 0.
//
// Only the fractional part of Re(reduced) is convention independent.

#include <span>
#include <vector>

#include "flateta/forms.hpp"
#include "flateta/geometry.hpp"
#include "flateta/spectral.hpp"

namespace flateta {

struct EtaValue {
  Complex eta;
  /// Eigenvalues on the imaginary axis (including zero).
  int kernel_dim = 0;
  Complex reduced;
  /// Re(reduced) is meaningful only modulo Z.
  bool mod_z_note = true;

  static EtaValue make(Complex eta, int kernel_dim);
};

/// Hurwitz zeta sum_{n>=0} (n + a)^{-s}, continued by Euler-Maclaurin.
/// Requires Re a > 0 and s != 1; relative error ~1e-13 for |s| <= 4.
Complex hurwitz_zeta(Complex s, Complex a);

inline constexpr double kAxisTolerance = 1e-10;

/// Reduced eta of the circle operator with spectrum {2 pi (n + mu_k)}; each
/// mu is first shifted by an integer into 0 <= Re mu < 1.
EtaValue eta_s1_closed(std::span<const Complex> mus, double axis_tol = kAxisTolerance);

/// Holonomy exponents nu_k (mod Z) of a connection on the circle: spectrum of
/// A/(2 pi i) for constant A, diagonal Fourier means for diagonal A, and
/// i log(holonomy eigenvalue) / (2 pi) in general.
std::vector<Complex> circle_exponents(const Connection& c);

/// eta_s1_closed(circle_exponents(c)).
EtaValue eta_s1(const Connection& c, double axis_tol = kAxisTolerance);

/// Smoothed eta  sum sign(lambda) erfc(sqrt(eps)|lambda|)  on each eps in
/// the grid, Richardson-extrapolated (polynomial in sqrt(eps)) to eps -> 0.
/// Only for formally self-adjoint truncations; accurate when the truncated
/// tail is negligible for every eps in the grid.
Complex eta_heat_estimate(const OperatorTruncation& t, std::span<const double> eps_grid);
/// Grid chosen so erfc(sqrt(eps) |lambda_max|) < 1e-20 at every point.
std::vector<double> default_eps_grid(const OperatorTruncation& t, int points = 5);

/// eta = 0 read off from an exactly symmetric spectrum (lambda -> -lambda
/// within tol, per mode block); throws DomainError if the spectrum is not
/// symmetric.
EtaValue eta_by_symmetry(const OperatorTruncation& t, double tol = 1e-9);

/// Number of eigenvalues of the form i*lambda with lambda < 0.
int m_minus(std::span<const Complex> spec, double tol);

/// Braverman-Kappeler variant: reduced - m_minus.
Complex eta_bk(const EtaValue& e, int m);

/// Distance on R/Z.
double circle_distance(double a, double b);

}  // namespace flateta
