#include <gtest/gtest.h>

#include "flateta/errors.hpp"
#include "flateta/forms.hpp"
#include "oracles.hpp"

using namespace flateta;

namespace {

constexpr double kTol = 1e-10;

TrigPolyForm scalar_term(int dim, Complex c, Frequency k, std::initializer_list<int> idx) {
  return TrigPolyForm::scalar(dim, c, std::move(k), IndexSet::of(idx));
}

}  // namespace

TEST(IndexSet, MergeSignCountsTranspositions) {
  EXPECT_EQ(merge_sign(IndexSet::of({0}), IndexSet::of({1})), 1);
  EXPECT_EQ(merge_sign(IndexSet::of({1}), IndexSet::of({0})), -1);
  EXPECT_EQ(merge_sign(IndexSet::of({0, 2}), IndexSet::of({1})), -1);
  EXPECT_EQ(merge_sign(IndexSet::of({1, 2}), IndexSet::of({0})), 1);
  EXPECT_EQ(merge_sign(IndexSet::of({0}), IndexSet::of({0, 1})), 0);
}

TEST(Forms, ExteriorDerivativeOfExponential) {
  // d e^{2 pi i x} = 2 pi i e^{2 pi i x} dx
  const TrigPolyForm f = scalar_term(1, 1.0, {1}, {});
  const TrigPolyForm df = ext_d(f);
  ASSERT_EQ(df.size(), 1u);
  EXPECT_NEAR(std::abs(df.fourier_coefficient({1}, IndexSet::of({0}))(0, 0) - kTwoPiI), 0.0, 1e-15);
}

TEST(Forms, WedgeOfCoordinateOneForms) {
  const TrigPolyForm dx = scalar_term(3, 1.0, {0, 0, 0}, {0});
  const TrigPolyForm dy = scalar_term(3, 1.0, {0, 0, 0}, {1});
  EXPECT_TRUE(approx_equal(wedge(dx, dy), scalar_term(3, 1.0, {0, 0, 0}, {0, 1})));
  EXPECT_TRUE(approx_equal(wedge(dy, dx), scalar_term(3, -1.0, {0, 0, 0}, {0, 1})));
  EXPECT_TRUE(wedge(dx, dx).empty());
}

TEST(Forms, ExactZerosArePruned) {
  TrigPolyForm a = scalar_term(1, 2.0, {3}, {0});
  a -= scalar_term(1, 2.0, {3}, {0});
  EXPECT_TRUE(a.empty());
}

TEST(Forms, DSquaredVanishes) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    for (int dim : {1, 3, 5}) {
      const TrigPolyForm a = oracle::random_mixed_form(rng, dim, 2);
      EXPECT_LT(ext_d(ext_d(a)).max_abs(), kTol);
    }
  }
}

TEST(Forms, WedgeIsAssociative) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const TrigPolyForm a = oracle::random_mixed_form(rng, 3, 2);
    const TrigPolyForm b = oracle::random_mixed_form(rng, 3, 2);
    const TrigPolyForm c = oracle::random_mixed_form(rng, 3, 2);
    EXPECT_LT((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs(), kTol);
  }
}

TEST(Forms, ScalarFormsAreGradedCommutative) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    for (int p = 0; p <= 3; ++p) {
      for (int q = 0; q + p <= 3; ++q) {
        const TrigPolyForm a = oracle::random_form(rng, 3, 1, p);
        const TrigPolyForm b = oracle::random_form(rng, 3, 1, q);
        const double sign = (p * q) % 2 ? -1.0 : 1.0;
        EXPECT_LT((wedge(a, b) - sign * wedge(b, a)).max_abs(), kTol);
      }
    }
  }
}

TEST(Forms, LeibnizRule) {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = trial % 3;
    const TrigPolyForm a = oracle::random_form(rng, 3, 2, p);
    const TrigPolyForm b = oracle::random_mixed_form(rng, 3, 2);
    const double sign = p % 2 ? -1.0 : 1.0;
    const TrigPolyForm rhs = wedge(ext_d(a), b) + sign * wedge(a, ext_d(b));
    EXPECT_LT((ext_d(wedge(a, b)) - rhs).max_abs(), 1e-9);
  }
}

TEST(Forms, StokesOnTorus) {
  oracle::Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    for (int dim : {1, 3}) {
      const TrigPolyForm b = oracle::random_form(rng, dim, 2, dim - 1);
      EXPECT_LT(integrate(ext_d(b), SubTorus::full(dim)).cwiseAbs().maxCoeff(), kTol);
    }
    // Closed 1-dimensional sub-torus of T^3.
    const TrigPolyForm f = oracle::random_form(rng, 3, 1, 0);
    const SubTorus loop = SubTorus::coordinate(3, IndexSet::of({1}));
    EXPECT_LT(std::abs(integrate_scalar(ext_d(f), loop)), kTol);
  }
}

TEST(Forms, IntegralMatchesGridAverage) {
  oracle::Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const TrigPolyForm a = oracle::random_form(rng, 3, 2, 3);
    const CMatrix lib = integrate(a, SubTorus::full(3));
    const CMatrix ref = oracle::grid_mean(a, IndexSet::full(3), 5);
    EXPECT_LT((lib - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forms, IntegralOverPinnedSubTorus) {
  // f = e^{2 pi i (x + y)} dx on the loop y = 1/4: integral over x vanishes,
  // while g = e^{2 pi i y} dx gives e^{i pi / 2} = i.
  const TrigPolyForm f = scalar_term(3, 1.0, {1, 1, 0}, {0});
  const TrigPolyForm g = scalar_term(3, 1.0, {0, 1, 0}, {0});
  SubTorus loop = SubTorus::coordinate(3, IndexSet::of({0}));
  loop.base = {0.0, 0.25, 0.0};
  EXPECT_NEAR(std::abs(integrate_scalar(f, loop)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(integrate_scalar(g, loop) - Complex(0.0, 1.0)), 0.0, 1e-15);
}

TEST(Forms, IntegrateRejectsWrongDegree) {
  const TrigPolyForm a = scalar_term(3, 1.0, {0, 0, 0}, {0});
  EXPECT_THROW(integrate(a, SubTorus::full(3)), DomainError);
}

TEST(Forms, CoefficientAtMatchesDirectEvaluation) {
  oracle::Rng rng(17);
  const TrigPolyForm a = oracle::random_form(rng, 3, 2, 1, 5);
  const std::vector<double> x{0.1, 0.37, 0.8};
  for (int j = 0; j < 3; ++j) {
    const IndexSet dx = IndexSet::of({j});
    EXPECT_LT((a.coefficient_at(dx, x) - oracle::evaluate(a, dx, x)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Forms, ExpLogAreInverse) {
  oracle::Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = trial % 2 ? 5 : 3;
    TrigPolyForm a = oracle::random_form(rng, dim, 2, 2);
    if (dim == 5) a += oracle::random_form(rng, dim, 2, 4);
    EXPECT_LT((log_unipotent(exp_nilpotent(a)) - a).max_abs(), kTol);
  }
}

TEST(Forms, ExpOfTwoFormOnTorus) {
  // On T^3 a 2-form squares to zero unless it has two disjoint parts; for a
  // single term exp(a) = 1 + a.
  const TrigPolyForm a = scalar_term(3, Complex(0.3, 0.2), {1, 0, 0}, {0, 1});
  EXPECT_TRUE(approx_equal(exp_nilpotent(a), TrigPolyForm::identity(3, 1) + a));
}

TEST(Forms, DaggerIsAnInvolution) {
  oracle::Rng rng(19);
  const TrigPolyForm a = oracle::random_mixed_form(rng, 3, 3);
  EXPECT_TRUE(approx_equal(dagger(dagger(a)), a));
}

TEST(Forms, TraceOfCommutatorOfZeroForms) {
  oracle::Rng rng(20);
  const TrigPolyForm a = oracle::random_form(rng, 3, 3, 0);
  const TrigPolyForm b = oracle::random_form(rng, 3, 3, 0);
  EXPECT_LT(mat_trace(graded_commutator(a, b)).max_abs(), kTol);
}

TEST(Forms, PhiNormalizeScalesByDegree) {
  const TrigPolyForm a = scalar_term(3, 1.0, {0, 0, 0}, {0}) + scalar_term(3, 1.0, {0, 0, 0}, {0, 1, 2});
  const Complex root = sqrt_two_pi_i();
  EXPECT_NEAR(std::abs(root * root - kTwoPiI), 0.0, 1e-14);
  EXPECT_NEAR(std::arg(root), kPi / 4.0, 1e-15);
  const TrigPolyForm n = phi_normalize(a);
  EXPECT_NEAR(std::abs(n.fourier_coefficient({0, 0, 0}, IndexSet::of({0}))(0, 0) - 1.0 / root), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(n.fourier_coefficient({0, 0, 0}, IndexSet::full(3))(0, 0) - std::pow(root, -3)), 0.0,
              1e-15);
  const TrigPolyForm f = phi_normalize(a, SqrtBranch::flipped);
  EXPECT_TRUE(approx_equal(f, -1.0 * n));
}

TEST(Forms, JsonRoundTrip) {
  oracle::Rng rng(21);
  const TrigPolyForm a = oracle::random_mixed_form(rng, 3, 2);
  const nlohmann::json j = a;
  EXPECT_TRUE(approx_equal(form_from_json(j), a, 0.0));
}

TEST(Forms, JsonRejectsMalformedInput) {
  using nlohmann::json;
  const json good = json::parse(R"({"dim":3,"rank":1,"terms":[{"k":[0,0,0],"I":[1,2],"re":[[1]],"im":[[0]]}]})");
  EXPECT_NO_THROW(form_from_json(good));
  json extra = good;
  extra["colour"] = "red";
  EXPECT_THROW(form_from_json(extra), SchemaError);
  json descending = good;
  descending["terms"][0]["I"] = {2, 1};
  EXPECT_THROW(form_from_json(descending), SchemaError);
  json zero_based = good;
  zero_based["terms"][0]["I"] = {0};
  EXPECT_THROW(form_from_json(zero_based), SchemaError);
  json short_k = good;
  short_k["terms"][0]["k"] = {0};
  EXPECT_THROW(form_from_json(short_k), SchemaError);
}

TEST(Forms, ShapeMismatchThrows) {
  const TrigPolyForm a = TrigPolyForm::identity(3, 2);
  const TrigPolyForm b = TrigPolyForm::identity(3, 1);
  EXPECT_THROW(a + b, ShapeError);
  EXPECT_THROW(wedge(a, b), ShapeError);
}
