#pragma once

// Twisted odd signature operator on T^d (d odd) in the Fourier basis.
//
// The exterior algebra of R^d is realized on C^{2^d} with basis e_S,
// S a subset of {0..d-1} (bitmask). c(e_j) = e_j ^ . - i_{e_j} and
// Gamma = i^{n+1} c(e_1)...c(e_d), d = 2n+1. The operator
//
//   D = Gamma sum_j c(e_j) (d/dx_j + A_j)
//
// preserves even forms; on the mode exp(2 pi i k.x) with constant A it acts
// by the block  sum_j [Gamma c(e_j)]_even (x) (2 pi i k_j + A_j).
// On the circle with A = 2 pi i mu dx this yields the spectrum {2 pi (k + mu)}.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "flateta/forms.hpp"
#include "flateta/geometry.hpp"

namespace flateta {

class CliffordModel {
 public:
  /// Odd dim only; throws DomainError otherwise.
  explicit CliffordModel(int dim);

  int dim() const { return dim_; }
  int full_size() const { return 1 << dim_; }
  int even_size() const { return 1 << (dim_ - 1); }

  const CMatrix& clifford(int j) const { return clifford_[j]; }
  const CMatrix& gamma() const { return gamma_; }
  /// [Gamma c(e_j)] restricted to even forms.
  const CMatrix& even_block(int j) const { return even_blocks_[j]; }
  /// Bitmasks of the even basis vectors, in the order used by even_block().
  const std::vector<std::uint32_t>& even_basis() const { return even_basis_; }

 private:
  int dim_;
  std::vector<CMatrix> clifford_;
  CMatrix gamma_;
  std::vector<std::uint32_t> even_basis_;
  std::vector<CMatrix> even_blocks_;
};

struct TruncationLimits {
  /// Largest dense Galerkin matrix (non-constant connections).
  std::size_t max_dense_size = 2048;
  /// Largest total dimension for block-diagonal truncations.
  std::size_t max_total_size = std::size_t{1} << 21;
};

struct OperatorTruncation {
  int dim = 0;
  int rank = 0;
  int cutoff = 0;
  /// All k with |k_j| <= cutoff, lexicographic.
  std::vector<Frequency> modes;
  bool block_diagonal = true;
  /// One block per mode when block_diagonal.
  std::vector<CMatrix> blocks;
  /// Full Galerkin matrix otherwise; basis index = mode * block + even * rank + a.
  CMatrix dense;
  bool formally_self_adjoint = false;

  int block_size() const { return (1 << (dim - 1)) * rank; }
  std::size_t size() const { return modes.size() * static_cast<std::size_t>(block_size()); }
  /// Dense matrix of the whole truncation.
  CMatrix assemble() const;
};

std::vector<Frequency> mode_list(int dim, int cutoff);

/// Mode block for a connection with constant connection form.
CMatrix build_sig_mode(const Connection& c, const Frequency& k);
/// Same block from the shared Clifford data, without re-validating.
CMatrix build_sig_mode(const CliffordModel& cl, const Connection& c, const Frequency& k);

OperatorTruncation build_truncation(const Connection& c, int cutoff,
                                    const TruncationLimits& limits = {});

struct ModeEigenvalue {
  Complex value;
  /// Index into OperatorTruncation::modes, or -1 for coupled truncations.
  int mode = -1;
};

/// All eigenvalues with multiplicity, sorted by (Re, Im).
std::vector<Complex> spectrum(const OperatorTruncation& t);
/// Eigenvalues tagged by mode, mode-major order.
std::vector<ModeEigenvalue> spectrum_by_mode(const OperatorTruncation& t);

/// CSV with header "re,im,mode"; mode column is "k1;k2;..." or empty.
void write_spectrum_csv(std::ostream& out, const OperatorTruncation& t);

}  // namespace flateta
