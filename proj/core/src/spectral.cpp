#include "flateta/spectral.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

#include "flateta/errors.hpp"

namespace flateta {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int mode_index(const Frequency& k, int cutoff) {
  const int width = 2 * cutoff + 1;
  int idx = 0;
  for (int kj : k) {
    if (kj < -cutoff || kj > cutoff) return -1;
    idx = idx * width + (kj + cutoff);
  }
  return idx;
}

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<CMatrix> constant_components(const Connection& c) {
  if (!c.form().is_constant()) throw DomainError("build_sig_mode: connection form is not constant");
  std::vector<CMatrix> out;
  const Frequency zero(static_cast<std::size_t>(c.dim()), 0);
  for (int j = 0; j < c.dim(); ++j) out.push_back(c.form().fourier_coefficient(zero, IndexSet::of({j})));
  return out;
}

}  // namespace

CliffordModel::CliffordModel(int dim) : dim_(dim) {
  if (dim < 1 || dim % 2 == 0 || dim > 9) throw DomainError("CliffordModel: dimension must be odd and <= 9");
  const int size = 1 << dim;
  for (int j = 0; j < dim; ++j) {
    CMatrix c = CMatrix::Zero(size, size);
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(size); ++s) {
      const int below = std::popcount(s & ((1u << j) - 1u));
      const double sign = (below % 2 == 0) ? 1.0 : -1.0;
      if ((s >> j) & 1u) {
        c(s & ~(1u << j), s) -= sign;  // interior product
      } else {
        c(s | (1u << j), s) += sign;  // exterior product
      }
    }
    clifford_.push_back(std::move(c));
  }
  const int n = (dim - 1) / 2;
  gamma_ = CMatrix::Identity(size, size);
  for (int j = 0; j < dim; ++j) gamma_ = gamma_ * clifford_[j];
  gamma_ *= std::pow(Complex(0.0, 1.0), n + 1);

  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(size); ++s) {
    if (std::popcount(s) % 2 == 0) even_basis_.push_back(s);
  }
  const int half = static_cast<int>(even_basis_.size());
  for (int j = 0; j < dim; ++j) {
    const CMatrix full = gamma_ * clifford_[j];
    CMatrix block(half, half);
    for (int a = 0; a < half; ++a) {
      for (int b = 0; b < half; ++b) block(a, b) = full(even_basis_[a], even_basis_[b]);
    }
    even_blocks_.push_back(std::move(block));
  }
}

std::vector<Frequency> mode_list(int dim, int cutoff) {
  if (cutoff < 0) throw DomainError("mode_list: cutoff must be >= 0");
  std::vector<Frequency> out;
  Frequency k(static_cast<std::size_t>(dim), -cutoff);
  while (true) {
    out.push_back(k);
    int j = dim - 1;
    while (j >= 0 && k[j] == cutoff) k[j--] = -cutoff;
    if (j < 0) break;
    ++k[j];
  }
  return out;
}

CMatrix build_sig_mode(const CliffordModel& cl, const Connection& c, const Frequency& k) {
  const std::vector<CMatrix> a = constant_components(c);
  const int r = c.rank();
  CMatrix block = CMatrix::Zero(cl.even_size() * r, cl.even_size() * r);
  for (int j = 0; j < c.dim(); ++j) {
    const CMatrix local = kTwoPiI * double(k[j]) * CMatrix::Identity(r, r) + a[j];
    block += kron(cl.even_block(j), local);
  }
  return block;
}

CMatrix build_sig_mode(const Connection& c, const Frequency& k) {
  if (static_cast<int>(k.size()) != c.dim()) throw ShapeError("build_sig_mode: frequency has wrong length");
  return build_sig_mode(CliffordModel(c.dim()), c, k);
}

CMatrix OperatorTruncation::assemble() const {
  if (!block_diagonal) return dense;
  const int b = block_size();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
  for (std::size_t m = 0; m < blocks.size(); ++m) out.block(m * b, m * b, b, b) = blocks[m];
  return out;
}

OperatorTruncation build_truncation(const Connection& c, int cutoff, const TruncationLimits& limits) {
  if (cutoff < 1) throw DomainError("build_truncation: cutoff must be >= 1");
  const CliffordModel cl(c.dim());
  OperatorTruncation t;
  t.dim = c.dim();
  t.rank = c.rank();
  t.cutoff = cutoff;
  t.block_diagonal = c.form().is_constant();
  t.formally_self_adjoint = is_unitary(c, 1e-12);

  double total = double(t.block_size());
  for (int j = 0; j < t.dim; ++j) total *= double(2 * cutoff + 1);
  const double limit = double(t.block_diagonal ? limits.max_total_size : limits.max_dense_size);
  if (total > limit) {
    throw GuardError("build_truncation: truncation size " + std::to_string(static_cast<long long>(total)) +
                     " exceeds the configured limit " + std::to_string(static_cast<long long>(limit)));
  }
  t.modes = mode_list(t.dim, cutoff);

  if (t.block_diagonal) {
    t.blocks.reserve(t.modes.size());
    for (const auto& k : t.modes) t.blocks.push_back(build_sig_mode(cl, c, k));
    return t;
  }

  const int b = t.block_size();
  const int r = t.rank;
  const auto n = static_cast<Eigen::Index>(t.size());
  t.dense = CMatrix::Zero(n, n);
  for (std::size_t p = 0; p < t.modes.size(); ++p) {
    const Frequency& kp = t.modes[p];
    for (int j = 0; j < t.dim; ++j) {
      t.dense.block(p * b, p * b, b, b) +=
          kron(cl.even_block(j), kTwoPiI * double(kp[j]) * CMatrix::Identity(r, r));
    }
    for (const auto& [key, m] : c.form().terms()) {
      Frequency kq(kp.size());
      for (std::size_t i = 0; i < kp.size(); ++i) kq[i] = kp[i] - key.k[i];
      const int q = mode_index(kq, cutoff);
      if (q < 0) continue;
      const int j = key.dx.indices().front();
      t.dense.block(p * b, q * b, b, b) += kron(cl.even_block(j), m);
    }
  }
  return t;
}

std::vector<ModeEigenvalue> spectrum_by_mode(const OperatorTruncation& t) {
  std::vector<ModeEigenvalue> out;
  out.reserve(t.size());
  if (t.block_diagonal) {
    for (std::size_t m = 0; m < t.blocks.size(); ++m) {
      Eigen::ComplexEigenSolver<CMatrix> solver(t.blocks[m], false);
      if (solver.info() != Eigen::Success) throw GuardError("spectrum: eigensolver did not converge");
      std::vector<Complex> vals(solver.eigenvalues().begin(), solver.eigenvalues().end());
      std::sort(vals.begin(), vals.end(), lex_less);
      for (Complex v : vals) out.push_back({v, static_cast<int>(m)});
    }
    return out;
  }
  Eigen::ComplexEigenSolver<CMatrix> solver(t.dense, false);
  if (solver.info() != Eigen::Success) throw GuardError("spectrum: eigensolver did not converge");
  std::vector<Complex> vals(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(vals.begin(), vals.end(), lex_less);
  for (Complex v : vals) out.push_back({v, -1});
  return out;
}

std::vector<Complex> spectrum(const OperatorTruncation& t) {
  std::vector<Complex> out;
  for (const auto& e : spectrum_by_mode(t)) out.push_back(e.value);
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

void write_spectrum_csv(std::ostream& out, const OperatorTruncation& t) {
  out << "re,im,mode\n";
  out.precision(17);
  for (const auto& e : spectrum_by_mode(t)) {
    out << e.value.real() << ',' << e.value.imag() << ',';
    if (e.mode >= 0) {
      const Frequency& k = t.modes[e.mode];
      for (std::size_t j = 0; j < k.size(); ++j) out << (j ? ";" : "") << k[j];
    }
    out << '\n';
  }
}

}  // namespace flateta
