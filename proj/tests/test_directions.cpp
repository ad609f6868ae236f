#include <gtest/gtest.h>

#include "aels/directions.hpp"
#include "aels/objectives.hpp"

using namespace aels;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// f(x) = (x1^2 + 4 x2^2) / 2
QuadraticObjective diag14() { return QuadraticObjective(QuadraticProblem::diagonal(vec({1.0, 4.0}))); }

Matrix product_form_update(const Matrix& H, const Vector& s, const Vector& y) {
  const double rho = 1.0 / y.dot(s);
  const Matrix I = Matrix::Identity(H.rows(), H.cols());
  return (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
}

}  // namespace

TEST(FdGradient, ForwardDifferenceOnDiagonalQuadratic) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  const Vector x = vec({1.0, 1.0});
  const auto g = fd_gradient(h, x, f.value(x), FdConfig{1e-6});
  EXPECT_NEAR(g.g[0], 1.0 + 5e-7, 1e-8);
  EXPECT_NEAR(g.g[1], 4.0 + 2e-6, 1e-8);
  EXPECT_FALSE(g.non_finite);
  EXPECT_EQ(led.fevals, 2u);
  EXPECT_EQ(led.gevals, 0u);
}

TEST(FdGradient, FlagsNonFiniteProbe) {
  class Wall final : public Objective {
   public:
    Eigen::Index dim() const override { return 2; }
    double value(const Vector& x) const override { return x[1] > 0.0 ? kInf : x.squaredNorm(); }
  } f;
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  const Vector x = vec({1.0, 0.0});
  EXPECT_TRUE(fd_gradient(h, x, f.value(x)).non_finite);
}

TEST(FdGradient, RejectsBadSigma) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  EXPECT_THROW(fd_gradient(h, vec({1.0, 1.0}), 2.5, FdConfig{0.0}), std::invalid_argument);
}

TEST(FdDirectional, CoordinateAxes) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  const Vector x = vec({1.0, 1.0});
  const double fx = f.value(x);
  const FdConfig cfg{1e-6};
  EXPECT_NEAR(fd_directional(h, x, fx, vec({1.0, 0.0}), cfg), 1.0 + 5e-7, 1e-8);
  EXPECT_NEAR(fd_directional(h, x, fx, vec({0.0, 1.0}), cfg), 4.0 + 2e-6, 1e-8);
  EXPECT_EQ(led.fevals, 2u);
}

TEST(FdDirectional, RejectsNonUnitVector) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  EXPECT_THROW(fd_directional(h, vec({1.0, 1.0}), 2.5, vec({1.0, 1.0})), std::invalid_argument);
  EXPECT_THROW(fd_directional(h, vec({1.0, 1.0}), 2.5, vec({1.0})), std::invalid_argument);
}

TEST(RandomDirection, ForcedVector) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  const Vector x = vec({1.0, 1.0});
  const Vector v = vec({0.6, 0.8});
  const auto r = random_direction(h, x, f.value(x), v, FdConfig{1e-6});
  // grad . v = 0.6 + 3.2
  EXPECT_NEAR(r.mu, 3.8, 1e-5);
  EXPECT_NEAR(r.d[0], -3.8 * 0.6, 1e-5);
  EXPECT_NEAR(r.d[1], -3.8 * 0.8, 1e-5);
}

TEST(RandomDirection, AlwaysDescends) {
  const auto f = diag14();
  EvaluationLedger led;
  ObjectiveHandle h(f, led);
  RngStream rng(9);
  const Vector x = vec({1.0, -2.0});
  for (int k = 0; k < 100; ++k) {
    const auto r = random_direction(h, x, f.value(x), rng);
    EXPECT_NEAR(r.v.norm(), 1.0, 1e-14);
    EXPECT_LE(r.d.dot(f.gradient(x)), 1e-5);
  }
  EXPECT_EQ(led.fevals, 100u);
}

TEST(Bfgs, FreshStateIsSteepestDescent) {
  BfgsState s(3);
  const Vector g = vec({1.0, -2.0, 0.5});
  const auto d = bfgs_direction(s, g);
  EXPECT_TRUE(d.d.isApprox(-g));
  EXPECT_FALSE(d.used_fallback);
}

TEST(Bfgs, IndefiniteMatrixFallsBack) {
  BfgsState s(2);
  s.H = -Matrix::Identity(2, 2);
  s.history_valid = true;
  const Vector g = vec({1.0, 1.0});
  const auto d = bfgs_direction(s, g);
  EXPECT_TRUE(d.used_fallback);
  EXPECT_TRUE(d.d.isApprox(-g));
  EXPECT_TRUE(s.H.isIdentity());
  EXPECT_FALSE(s.history_valid);
}

TEST(Bfgs, NonFiniteMatrixFallsBack) {
  BfgsState s(2);
  s.H(0, 1) = std::nan("");
  EXPECT_TRUE(bfgs_direction(s, vec({1.0, 1.0})).used_fallback);
}

TEST(Bfgs, OneDimensionalUpdate) {
  BfgsState s(1);
  EXPECT_TRUE(bfgs_update(s, vec({-1.0}), vec({-1.0})));
  EXPECT_DOUBLE_EQ(s.H(0, 0), 1.0);
  EXPECT_TRUE(bfgs_update(s, vec({1.0}), vec({4.0})));
  EXPECT_DOUBLE_EQ(s.H(0, 0), 0.25);
}

TEST(Bfgs, SkipsNonPositiveCurvature) {
  BfgsState s(2);
  EXPECT_FALSE(bfgs_update(s, vec({1.0, 0.0}), vec({0.0, 1.0})));
  EXPECT_FALSE(bfgs_update(s, vec({1.0, 0.0}), vec({-1.0, 0.0})));
  EXPECT_TRUE(s.H.isIdentity());
}

TEST(Bfgs, MatchesProductFormAndSecant) {
  RngStream rng(17);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_below(6));
    const auto p = random_quadratic(rng, n, 0.5, 20.0, false);
    BfgsState st(n);
    for (int j = 0; j < 5; ++j) {
      Vector s(n);
      for (Eigen::Index i = 0; i < n; ++i) s[i] = rng.normal();
      const Vector y = p.curvature() * s;
      const Matrix expected = product_form_update(st.H, s, y);
      ASSERT_TRUE(bfgs_update(st, s, y));
      EXPECT_LE((st.H - expected).norm(), 1e-10 * expected.norm());
      EXPECT_LE((st.H * y - s).norm(), 1e-9 * s.norm());
      EXPECT_LE((st.H - st.H.transpose()).norm(), 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(st.H);
      EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Bfgs, ConjugatePairsRecoverInverseHessian) {
  // (1, 0) and (1, -3) are A-conjugate, so both secant pairs are kept.
  const Matrix A = (Matrix(2, 2) << 3.0, 1.0, 1.0, 2.0).finished();
  const Vector s1 = vec({1.0, 0.0}), s2 = vec({1.0, -3.0});
  BfgsState st(2);
  bfgs_update(st, s1, A * s1);
  bfgs_update(st, s2, A * s2);
  EXPECT_LE((st.H * A * s1 - s1).norm(), 1e-12);
  EXPECT_LE((st.H - A.inverse()).norm(), 1e-12);
}
