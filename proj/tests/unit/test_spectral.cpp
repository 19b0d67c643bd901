#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>

#include "flateta/errors.hpp"
#include "flateta/spectral.hpp"
#include "oracles.hpp"

using namespace flateta;

namespace {

bool lex(Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); }

double max_sorted_distance(std::vector<Complex> a, std::vector<Complex> b) {
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST(Clifford, Relations) {
  for (int d : {1, 3, 5}) {
    const CliffordModel cl(d);
    const int n = cl.full_size();
    const CMatrix id = CMatrix::Identity(n, n);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const CMatrix anti = cl.clifford(j) * cl.clifford(k) + cl.clifford(k) * cl.clifford(j);
        const CMatrix expected = (j == k ? -2.0 : 0.0) * id;
        EXPECT_LT((anti - expected).cwiseAbs().maxCoeff(), 1e-14);
      }
      // In odd dimension Gamma is central.
      EXPECT_LT((cl.gamma() * cl.clifford(j) - cl.clifford(j) * cl.gamma()).cwiseAbs().maxCoeff(), 1e-14);
    }
    EXPECT_LT((cl.gamma() * cl.gamma() - id).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((cl.gamma().adjoint() - cl.gamma()).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(CliffordModel(2), DomainError);
}

TEST(Spectral, ModeListOrder) {
  const auto modes = mode_list(2, 1);
  ASSERT_EQ(modes.size(), 9u);
  EXPECT_EQ(modes.front(), (Frequency{-1, -1}));
  EXPECT_EQ(modes[1], (Frequency{-1, 0}));
  EXPECT_EQ(modes.back(), (Frequency{1, 1}));
}

TEST(Spectral, CircleSpectrumIsShiftedLattice) {
  for (Complex mu : {Complex(0.25), Complex(0.3, 0.07), Complex(-1.2, -0.4)}) {
    const OperatorTruncation t = build_truncation(Connection::circle(mu), 6);
    EXPECT_LT(max_sorted_distance(spectrum(t), oracle::circle_spectrum({mu}, 6)), 1e-12);
  }
}

TEST(Spectral, TorusUnitaryDiagonalIsSymmetric) {
  // Constant A_j = 2 pi i mu_j (rank 1): each mode carries +-2 pi |k + mu|,
  // each twice.
  const std::vector<double> mu{0.13, 0.41, 0.77};
  std::vector<CMatrix> a;
  for (double m : mu) a.push_back(CMatrix::Constant(1, 1, kTwoPiI * m));
  const Connection c = Connection::constant(3, a);
  const OperatorTruncation t = build_truncation(c, 2);
  std::vector<Complex> expected;
  for (const auto& k : t.modes) {
    double norm2 = 0.0;
    for (int j = 0; j < 3; ++j) norm2 += (k[j] + mu[j]) * (k[j] + mu[j]);
    const double v = 2.0 * kPi * std::sqrt(norm2);
    expected.insert(expected.end(), {v, v, -v, -v});
  }
  EXPECT_LT(max_sorted_distance(spectrum(t), expected), 1e-10);
  EXPECT_TRUE(t.formally_self_adjoint);
}

TEST(Spectral, GalerkinMatchesGaugeEquivalentConstant) {
  // A = 2 pi i 0.3 + 0.5 e^{2 pi i x} is gauge equivalent to 2 pi i 0.3, so
  // the low eigenvalues are 2 pi (n + 0.3).
  TrigPolyForm a = TrigPolyForm::scalar(1, kTwoPiI * 0.3, {0}, IndexSet::of({0}));
  a += TrigPolyForm::scalar(1, 0.5, {1}, IndexSet::of({0}));
  const OperatorTruncation t = build_truncation(Connection(a), 14);
  EXPECT_FALSE(t.block_diagonal);
  const std::vector<Complex> spec = spectrum(t);
  for (int n = -3; n <= 3; ++n) {
    const Complex target = 2.0 * kPi * (n + 0.3);
    double best = 1e9;
    for (Complex v : spec) best = std::min(best, std::abs(v - target));
    EXPECT_LT(best, 1e-8) << "n = " << n;
  }
}

TEST(Spectral, AssembleMatchesBlocks) {
  oracle::Rng rng(51);
  const Connection c = oracle::random_flat_constant(rng, 3, 1);
  const OperatorTruncation t = build_truncation(c, 1);
  Eigen::ComplexEigenSolver<CMatrix> solver(t.assemble(), false);
  std::vector<Complex> full(solver.eigenvalues().begin(), solver.eigenvalues().end());
  EXPECT_LT(max_sorted_distance(full, spectrum(t)), 1e-9);
}

TEST(Spectral, GuardOnOversizedTruncation) {
  EXPECT_THROW(build_truncation(Connection::trivial(3, 2), 200), GuardError);
  TrigPolyForm a = TrigPolyForm::scalar(1, 0.5, {1}, IndexSet::of({0}));
  EXPECT_THROW(build_truncation(Connection(a), 5000), GuardError);
}

TEST(Spectral, ModeBlockRejectsNonConstant) {
  TrigPolyForm a = TrigPolyForm::scalar(1, 0.5, {1}, IndexSet::of({0}));
  EXPECT_THROW(build_sig_mode(Connection(a), Frequency{0}), DomainError);
}

TEST(Spectral, CsvFormat) {
  const OperatorTruncation t = build_truncation(Connection::circle(0.25), 1);
  std::ostringstream out;
  write_spectrum_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "re,im,mode");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_NE(out.str().find(",-1\n"), std::string::npos);
}
