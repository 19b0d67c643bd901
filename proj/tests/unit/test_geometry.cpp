#include <gtest/gtest.h>

#include "flateta/errors.hpp"
#include "flateta/geometry.hpp"
#include "oracles.hpp"

using namespace flateta;

namespace {

TrigPolyForm as_column(const TrigPolyForm& v) {
  // Keep only the first column so that the form stands for a section.
  TrigPolyForm out(v.dim(), v.rank());
  for (const auto& [key, m] : v.terms()) {
    CMatrix c = CMatrix::Zero(m.rows(), m.cols());
    c.col(0) = m.col(0);
    out.add_term(key.k, key.dx, c);
  }
  return out;
}

CMatrix metric_matrix() {
  CMatrix g(2, 2);
  g << 2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 3.0;
  return g;
}

}  // namespace

TEST(Connection, RejectsInvalidInput) {
  const TrigPolyForm two_form = TrigPolyForm::scalar(3, 1.0, {0, 0, 0}, IndexSet::of({0, 1}));
  EXPECT_THROW(Connection{two_form}, DomainError);
  CMatrix not_hermitian(2, 2);
  not_hermitian << 1.0, 2.0, 0.0, 1.0;
  EXPECT_THROW(Connection(TrigPolyForm::zero(1, 2), TrigPolyForm::constant(1, not_hermitian)), DomainError);
  CMatrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(Connection(TrigPolyForm::zero(1, 2), TrigPolyForm::constant(1, indefinite)), DomainError);
  EXPECT_THROW(Connection(TrigPolyForm::zero(1, 2), TrigPolyForm::identity(1, 1)), ShapeError);
}

TEST(Connection, MetricCompatibilityOfOmega) {
  // d<u,v>_g = <nabla u, v>_g + <u, (nabla + omega) v>_g
  oracle::Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const TrigPolyForm a = oracle::random_form(rng, 3, 2, 1, 4);
    const TrigPolyForm g = TrigPolyForm::constant(3, metric_matrix());
    const Connection c(a, g);
    const TrigPolyForm u = as_column(oracle::random_form(rng, 3, 2, 0, 3));
    const TrigPolyForm v = as_column(oracle::random_form(rng, 3, 2, 0, 3));
    const TrigPolyForm nabla_u = ext_d(u) + wedge(a, u);
    const TrigPolyForm adj_v = ext_d(v) + wedge(a + omega_metric(c), v);
    const TrigPolyForm lhs = ext_d(wedge(wedge(dagger(u), g), v));
    const TrigPolyForm rhs = wedge(wedge(dagger(nabla_u), g), v) + wedge(wedge(dagger(u), g), adj_v);
    EXPECT_LT((lhs - rhs).max_abs(), 1e-10);
  }
}

TEST(Connection, UnitaryConnectionsHaveNoOmega) {
  oracle::Rng rng(32);
  const Connection c = oracle::random_flat_constant(rng, 3, 2, true);
  EXPECT_TRUE(is_unitary(c));
  EXPECT_TRUE(is_flat(c, 1e-12));
}

TEST(Connection, HermitianPartAndDeformations) {
  oracle::Rng rng(33);
  const Connection c = oracle::random_flat_constant(rng, 3, 2);
  EXPECT_FALSE(is_unitary(c));
  EXPECT_TRUE(is_unitary(hermitian_part(c), 1e-12));
  EXPECT_TRUE(approx_equal(adjoint_connection(adjoint_connection(c)).form(), c.form(), 1e-12));
  EXPECT_TRUE(approx_equal(r_deformation(c, 0.0).form(), hermitian_part(c).form(), 1e-12));
  // r = i recovers the connection itself, r = -i its adjoint.
  EXPECT_TRUE(approx_equal(r_deformation(c, Complex(0.0, 1.0)).form(), c.form(), 1e-12));
  EXPECT_TRUE(approx_equal(r_deformation(c, Complex(0.0, -1.0)).form(), adjoint_connection(c).form(), 1e-12));
}

TEST(Connection, BianchiIdentity) {
  oracle::Rng rng(34);
  const TrigPolyForm a = oracle::random_form(rng, 3, 2, 1, 4);
  const Connection c(a);
  const TrigPolyForm f = curvature(c);
  EXPECT_LT((ext_d(f) + wedge(a, f) - wedge(f, a)).max_abs(), 1e-10);
}

TEST(Connection, OddChernFormsOfFlatConnectionsAreClosed) {
  oracle::Rng rng(35);
  const Connection c = oracle::random_flat_constant(rng, 3, 2);
  for (int j = 0; j <= 1; ++j) EXPECT_LT(ext_d(chern_odd(c, j)).max_abs(), 1e-10);
  // A non-constant flat connection: gauge transform of a constant one.
  // Rotation by 2 pi y is unitary and a trigonometric polynomial.
  CMatrix cos_part(2, 2), sin_part(2, 2);
  cos_part << 0.5, 0.0, 0.0, 0.5;
  sin_part << 0.0, -0.5, 0.5, 0.0;
  const Complex minus_i(0.0, -1.0);
  TrigPolyForm rot = TrigPolyForm::monomial(3, cos_part, {0, 1, 0}, IndexSet()) +
                     TrigPolyForm::monomial(3, cos_part, {0, -1, 0}, IndexSet()) +
                     TrigPolyForm::monomial(3, minus_i * sin_part, {0, 1, 0}, IndexSet()) +
                     TrigPolyForm::monomial(3, -minus_i * sin_part, {0, -1, 0}, IndexSet());
  const Connection cg = gauge_transform(c, rot);
  EXPECT_FALSE(cg.form().is_constant());
  EXPECT_TRUE(is_flat(cg, 1e-10));
  EXPECT_LT(ext_d(chern_odd(cg, 0)).max_abs(), 1e-10);
}

TEST(Connection, AcoeffMatchesQuadrature) {
  for (int j = 0; j <= 6; ++j) {
    for (Complex r : {Complex(0.5), Complex(1.0), Complex(2.0), Complex(0.3, 0.7), Complex(0.0, 1.0)}) {
      const Complex quad =
          oracle::simpson([&](double u) { return std::pow(1.0 + u * u * r * r, j); }, 0.0, 1.0, 2000);
      EXPECT_NEAR(std::abs(a_coeff(j, r) - quad), 0.0, 1e-10 * std::max(1.0, std::abs(quad)));
    }
  }
}

TEST(Connection, AcoeffAtImaginaryUnitExact) {
  // a_j(i)/j! = 2^{2j} j! / (2j+1)!
  for (int j = 0; j <= 6; ++j) {
    std::int64_t jf = 1, odd = 1;
    for (int i = 2; i <= j; ++i) jf *= i;
    for (int i = 2; i <= 2 * j + 1; ++i) odd *= i;
    const Rational lhs = a_coeff_exact(j, Rational(-1)) / Rational(jf);
    const Rational rhs = Rational((std::int64_t{1} << (2 * j)) * jf, odd);
    EXPECT_EQ(lhs, rhs) << "j = " << j;
  }
}

TEST(ChernSimons, VanishesOnEqualEndpoints) {
  oracle::Rng rng(36);
  const Connection c(oracle::random_form(rng, 3, 2, 1));
  EXPECT_TRUE(cs_form(c, c).empty());
}

TEST(ChernSimons, TransgressesChernCharacter) {
  oracle::Rng rng(37);
  for (int trial = 0; trial < 4; ++trial) {
    const Connection c0(oracle::random_form(rng, 3, 2, 1, 3));
    const Connection c1(oracle::random_form(rng, 3, 2, 1, 3));
    const TrigPolyForm diff = chern_character(c1) - chern_character(c0);
    EXPECT_LT((ext_d(cs_form(c0, c1)) - diff).max_abs(), 1e-9);
  }
}

TEST(ChernSimons, IndependentOfSquareRootBranch) {
  oracle::Rng rng(38);
  const Connection c0(oracle::random_form(rng, 3, 2, 1, 3));
  const Connection c1(oracle::random_form(rng, 3, 2, 1, 3));
  EXPECT_TRUE(approx_equal(cs_form(c0, c1), cs_form(c0, c1, SqrtBranch::flipped), 1e-12));
}

TEST(ChernSimons, CircleValue) {
  // On the circle int CS(d + a0 dx, d + a1 dx) = -(a1 - a0) / (2 pi i).
  const Connection c0 = Connection::circle(Complex(0.2, 0.1));
  const Connection c1 = Connection::circle(Complex(0.45, -0.3));
  const Complex cs = integrate_scalar(cs_form(c0, c1), SubTorus::full(1));
  EXPECT_NEAR(std::abs(cs - (Complex(0.2, 0.1) - Complex(0.45, -0.3))), 0.0, 1e-14);
}

TEST(ChernSimons, RPolynomialInterpolatesDeformations) {
  oracle::Rng rng(39);
  const Connection c = oracle::random_flat_constant(rng, 3, 2);
  const RPolynomial poly = cs_r_poly(c);
  EXPECT_EQ(poly.degree(), 3);
  for (Complex r : {Complex(0.5), Complex(2.0), Complex(-0.4, 1.3)}) {
    const TrigPolyForm direct = cs_form(hermitian_part(c), r_deformation(c, r));
    EXPECT_LT((poly.evaluate(r) - direct).max_abs(), 1e-10);
  }
}

TEST(ChernSimons, LocalVariationIdentityOnSubtori) {
  oracle::Rng rng(40);
  for (int dim : {1, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Connection c = oracle::random_flat_constant(rng, dim, 2);
      for (double r : {0.5, 1.0, 2.0}) {
        const TrigPolyForm lhs = cs_form(hermitian_part(c), r_deformation(c, r));
        TrigPolyForm rhs = TrigPolyForm::zero(dim, 1);
        double jf = 1.0;
        for (int j = 0; 2 * j + 1 <= dim; ++j) {
          if (j > 0) jf *= j;
          rhs += (a_coeff(j, r) / jf) * chern_odd(c, j);
        }
        rhs *= Complex(-r / (2.0 * kPi));
        for (const auto& cycle : odd_subtori(dim)) {
          EXPECT_NEAR(std::abs(integrate_scalar(lhs, cycle) - integrate_scalar(rhs, cycle)), 0.0, 1e-9);
        }
      }
    }
  }
}

TEST(LForm, TrivialBelowDimensionFour) {
  oracle::Rng rng(41);
  const TrigPolyForm r = oracle::random_form(rng, 3, 2, 2);
  EXPECT_TRUE(approx_equal(l_form(r), TrigPolyForm::identity(3, 1), 0.0));
  EXPECT_TRUE(approx_equal(flat_l_form(3), TrigPolyForm::identity(3, 1), 0.0));
}

TEST(LForm, FirstCorrectionInDimensionFive) {
  // Rank one: sqrt((R/2) coth(R/2)) = 1 + R^2/24 + ..., then phi scales the
  // 4-form by (2 pi i)^{-2}.
  oracle::Rng rng(42);
  const TrigPolyForm r = oracle::random_form(rng, 5, 1, 2, 3);
  const TrigPolyForm expected =
      TrigPolyForm::identity(5, 1) + (1.0 / (24.0 * kTwoPiI * kTwoPiI)) * wedge(r, r);
  EXPECT_LT((l_form(r) - expected).max_abs(), 1e-12);
}

TEST(OddChern, WindingNumberOnCircle) {
  for (int w : {-3, -1, 0, 2}) {
    const TrigPolyForm g = TrigPolyForm::scalar(1, 1.0, {w}, IndexSet());
    EXPECT_NEAR(std::abs(integrate_scalar(odd_chern_char(g), SubTorus::full(1)) - double(w)), 0.0, 1e-13);
  }
}

TEST(Gauge, PreservesFlatnessAndHolonomyClass) {
  oracle::Rng rng(43);
  const Connection c = oracle::random_flat_constant(rng, 1, 1);
  const TrigPolyForm g = TrigPolyForm::scalar(1, 1.0, {2}, IndexSet());
  const Connection cg = gauge_transform(c, g);
  EXPECT_FALSE(approx_equal(cg.form(), c.form()));
  const std::vector<double> base{0.0};
  const CMatrix h0 = holonomy(c, 0, base);
  const CMatrix h1 = holonomy(cg, 0, base);
  EXPECT_LT((h0 - h1).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Holonomy, ConstantConnectionIsMatrixExponential) {
  oracle::Rng rng(44);
  const Connection c = oracle::random_flat_constant(rng, 3, 3);
  const std::vector<double> base{0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    const CMatrix a = c.form().fourier_coefficient({0, 0, 0}, IndexSet::of({j}));
    EXPECT_LT((holonomy(c, j, base) - oracle::expm_neg(a)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Holonomy, ScalarNonConstantConnection) {
  // A = (a0 + b e^{2 pi i x}) dx has holonomy exp(-a0).
  TrigPolyForm a = TrigPolyForm::scalar(1, Complex(0.3, 1.1), {0}, IndexSet::of({0}));
  a += TrigPolyForm::scalar(1, Complex(0.7, -0.2), {1}, IndexSet::of({0}));
  const std::vector<double> base{0.0};
  EXPECT_NEAR(std::abs(holonomy(Connection(a), 0, base)(0, 0) - std::exp(-Complex(0.3, 1.1))), 0.0, 1e-10);
}

TEST(Inverse, RejectsNonPolynomialInverse) {
  TrigPolyForm g = TrigPolyForm::identity(1, 1) * Complex(2.0);
  g += TrigPolyForm::scalar(1, 0.5, {1}, IndexSet());
  g += TrigPolyForm::scalar(1, 0.5, {-1}, IndexSet());
  EXPECT_THROW(zero_form_inverse(g), DomainError);
  EXPECT_NO_THROW(zero_form_inverse(TrigPolyForm::scalar(1, 1.0, {3}, IndexSet())));
}

TEST(Connection, JsonRoundTrip) {
  oracle::Rng rng(45);
  const Connection c(oracle::random_form(rng, 3, 2, 1), TrigPolyForm::constant(3, metric_matrix()));
  const nlohmann::json j = c;
  const Connection back = connection_from_json(j);
  EXPECT_TRUE(approx_equal(back.form(), c.form(), 0.0));
  EXPECT_TRUE(approx_equal(back.metric(), c.metric(), 0.0));
  nlohmann::json bad = j;
  bad["rank"] = 3;
  EXPECT_THROW(connection_from_json(bad), SchemaError);
}
