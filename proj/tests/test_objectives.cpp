#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "aels/mgh.hpp"
#include "aels/objectives.hpp"

using namespace aels;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SparseDataset tiny_no_bias() {
  SparseDataset d;
  d.dim = 2;
  const std::size_t idx[] = {0, 1};
  const double z1[] = {1.0, 1.0};
  const double z2[] = {1.0, -1.0};
  d.add_row(idx, z1, 1.0);
  d.add_row(idx, z2, -1.0);
  return d;
}

SparseDataset random_dataset(RngStream& rng, std::size_t rows, std::size_t features) {
  std::ostringstream text;
  for (std::size_t i = 0; i < rows; ++i) {
    text << (rng.uniform() < 0.5 ? "+1" : "-1");
    for (std::size_t j = 1; j <= features; ++j) {
      if (rng.uniform() < 0.6) text << ' ' << j << ':' << rng.normal();
    }
    text << '\n';
  }
  std::istringstream in(text.str());
  return parse_libsvm(in, features);
}

}  // namespace

// ---------------------------------------------------------------------------
// Quadratics

TEST(Quadratic, DiagonalExample) {
  const auto p = QuadraticProblem::diagonal(vec({1.0, 4.0}));
  const auto r = quadratic_eval(p, vec({1.0, 1.0}), true);
  EXPECT_DOUBLE_EQ(r.value, 2.5);
  EXPECT_DOUBLE_EQ((*r.gradient)[0], 1.0);
  EXPECT_DOUBLE_EQ((*r.gradient)[1], 4.0);
  EXPECT_DOUBLE_EQ(p.m(), 1.0);
  EXPECT_DOUBLE_EQ(p.L(), 4.0);
}

TEST(Quadratic, OriginOfHomogeneousQuadratic) {
  RngStream rng(2);
  const auto p = random_quadratic(rng, 5, 0.5, 3.0, false);
  const auto r = quadratic_eval(p, Vector::Zero(5), true);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.gradient->isZero(0.0));
}

TEST(Quadratic, DimensionMismatchRejected) {
  const auto p = QuadraticProblem::diagonal(vec({1.0, 4.0}));
  EXPECT_THROW(quadratic_eval(p, Vector::Zero(3), false), std::invalid_argument);
}

TEST(Quadratic, ConstructorValidation) {
  Matrix asym(2, 2);
  asym << 1, 1, 0, 1;
  EXPECT_THROW(QuadraticProblem(asym, Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(QuadraticProblem::diagonal(vec({1.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(QuadraticProblem::diagonal(vec({1.0, 2.0}), Vector::Zero(3)), std::invalid_argument);
}

TEST(Quadratic, RandomInstanceHasRequestedSpectrum) {
  RngStream rng(9);
  for (int k = 0; k < 20; ++k) {
    const auto p = random_quadratic(rng, 6, 0.3, 40.0, true);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.curvature());
    EXPECT_NEAR(es.eigenvalues().minCoeff(), 0.3, 1e-10);
    EXPECT_NEAR(es.eigenvalues().maxCoeff(), 40.0, 1e-9);
    EXPECT_NEAR(p.m(), 0.3, 1e-10);
    EXPECT_NEAR(p.L(), 40.0, 1e-9);
  }
  EXPECT_THROW(random_quadratic(rng, 1, 0.5, 2.0, false), std::invalid_argument);
  EXPECT_NO_THROW(random_quadratic(rng, 1, 2.0, 2.0, false));
  EXPECT_THROW(random_quadratic(rng, 3, 2.0, 1.0, false), std::invalid_argument);
}

TEST(Quadratic, GradientMatchesFiniteDifference) {
  RngStream rng(4);
  const double sigma = 1e-6;
  for (int k = 0; k < 10; ++k) {
    const auto p = random_quadratic(rng, 4, 1.0, 10.0, true);
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.normal();
    const Vector g = *quadratic_eval(p, x, true).gradient;
    for (int i = 0; i < 4; ++i) {
      Vector xp = x, xm = x;
      xp[i] += sigma;
      xm[i] -= sigma;
      const double fd = (quadratic_eval(p, xp, false).value - quadratic_eval(p, xm, false).value) / (2 * sigma);
      EXPECT_LE(std::abs(fd - g[i]), 1e-6);
    }
  }
}

TEST(Quadratic, MinimizerAndValue) {
  const auto p = QuadraticProblem::diagonal(vec({2.0, 4.0}), vec({-2.0, 4.0}));
  const Vector xs = p.minimizer();
  EXPECT_NEAR(xs[0], 1.0, 1e-15);
  EXPECT_NEAR(xs[1], -1.0, 1e-15);
  // f(x*) = -1/2 b' A^{-1} b = -1/2 (2 + 4) = -3
  EXPECT_NEAR(p.min_value(), -3.0, 1e-14);
}

TEST(Quadratic, ObjectiveWrapper) {
  QuadraticObjective f(QuadraticProblem::diagonal(vec({1.0, 4.0})));
  EXPECT_TRUE(f.has_gradient());
  EXPECT_DOUBLE_EQ(f.value(f.initial_point()), 2.5);
  EXPECT_THROW(QuadraticObjective(QuadraticProblem::diagonal(vec({1.0, 4.0})), Vector::Zero(3)),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// LIBSVM

TEST(Libsvm, SingleRowWithExpectedDim) {
  std::istringstream in("+1 3:0.5 7:1.2\n");
  const SparseDataset d = parse_libsvm(in, 7);
  ASSERT_EQ(d.rows(), 1u);
  EXPECT_EQ(d.dim, 8u);
  const Vector z = d.dense_row(0);
  const Vector expect = vec({0, 0, 0.5, 0, 0, 0, 1.2, 1});
  EXPECT_EQ(z, expect);
  EXPECT_EQ(d.labels[0], 1.0);
}

TEST(Libsvm, LabelOutsideSetRejectedWithLine) {
  std::istringstream in("+1 1:1\n2 1:0.5\n");
  try {
    parse_libsvm(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Libsvm, MalformedInputs) {
  for (const char* text : {"+1 3:0.5 2:1\n", "+1 abc\n", "+1 0:1\n", "x 1:1\n", "+1 1:nan\n", "-1 1:2:3\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_libsvm(in), ParseError) << text;
  }
  std::istringstream wide("+1 9:1\n");
  EXPECT_THROW(parse_libsvm(wide, 4), ParseError);
}

TEST(Libsvm, ZeroOneLabelsRemapped) {
  std::istringstream in("0 1:1\n1 2:1\n\n-1 1:3\n");
  const SparseDataset d = parse_libsvm(in);
  ASSERT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.labels[0], -1.0);
  EXPECT_EQ(d.labels[1], 1.0);
  EXPECT_EQ(d.labels[2], -1.0);
  EXPECT_EQ(d.dim, 3u);
  for (std::size_t i = 0; i < d.rows(); ++i) EXPECT_EQ(d.dense_row(i)[2], 1.0);
}

TEST(Libsvm, SerializeRoundTrip) {
  RngStream rng(17);
  const SparseDataset d = random_dataset(rng, 30, 6);
  std::istringstream in(serialize_libsvm(d));
  EXPECT_EQ(parse_libsvm(in, 6), d);
}

TEST(Libsvm, SyntheticDatasetShape) {
  const SparseDataset a = make_synthetic_logistic(50, 4, 3);
  const SparseDataset b = make_synthetic_logistic(50, 4, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rows(), 50u);
  EXPECT_EQ(a.dim, 5u);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    EXPECT_TRUE(a.labels[i] == 1.0 || a.labels[i] == -1.0);
    EXPECT_EQ(a.dense_row(i)[4], 1.0);
  }
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST(Logistic, ValueAtOriginIsLog2) {
  RngStream rng(1);
  const SparseDataset d = random_dataset(rng, 20, 5);
  const LogisticProblem p(d);
  EXPECT_NEAR(logistic_eval(p, full_batch(d), Vector::Zero(6), false).value, std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(p.lambda, 1.0 / 20.0);
}

TEST(Logistic, TwoRowGradientExample) {
  const SparseDataset d = tiny_no_bias();
  const LogisticProblem p(d, 0.5);
  const auto r = logistic_eval(p, full_batch(d), Vector::Zero(2), true);
  EXPECT_NEAR((*r.gradient)[0], 0.0, 1e-15);
  EXPECT_NEAR((*r.gradient)[1], -0.5, 1e-15);
}

TEST(Logistic, ExtremeLogitsStayFinite) {
  EXPECT_NEAR(softplus(1000.0), 1000.0, 1e-12);
  EXPECT_NEAR(softplus(-1000.0), 0.0, 1e-300);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  const SparseDataset d = tiny_no_bias();
  const LogisticProblem p(d, 0.5);
  // Row 1 logit -1000 for y=+1 at x = (-500, -500).
  const auto r = logistic_eval(p, full_batch(d), vec({-500.0, -500.0}), true);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_TRUE(r.gradient->allFinite());
}

TEST(Logistic, DimensionMismatchRejected) {
  const SparseDataset d = tiny_no_bias();
  const LogisticProblem p(d);
  EXPECT_THROW(logistic_eval(p, full_batch(d), Vector::Zero(3), false), std::invalid_argument);
}

TEST(Logistic, GradientMatchesCentralDifference) {
  RngStream rng(23);
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = 2 + rng.uniform_below(9);
    const SparseDataset d = random_dataset(rng, 10 + rng.uniform_below(41), n);
    const LogisticProblem p(d);
    const MinibatchView all = full_batch(d);
    Vector x(static_cast<Eigen::Index>(d.dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const Vector g = *logistic_eval(p, all, x, true).gradient;
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (logistic_eval(p, all, xp, false).value - logistic_eval(p, all, xm, false).value) / (2 * h);
      EXPECT_LE(std::abs(fd - g[i]), 1e-5 * std::max(1.0, std::abs(g[i])));
    }
  }
}

TEST(Logistic, LambdaStronglyConvex) {
  RngStream rng(29);
  const SparseDataset d = random_dataset(rng, 40, 5);
  const LogisticProblem p(d);
  const MinibatchView all = full_batch(d);
  for (int k = 0; k < 200; ++k) {
    Vector x(6), y(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = 3 * rng.normal();
      y[i] = 3 * rng.normal();
    }
    const auto fx = logistic_eval(p, all, x, true);
    const double fy = logistic_eval(p, all, y, false).value;
    const double lower = fx.value + fx.gradient->dot(y - x) + 0.5 * p.lambda * (y - x).squaredNorm();
    EXPECT_GE(fy, lower - 1e-12 * std::abs(fy));
  }
}

TEST(Logistic, ReferenceMinimumHasTinyGradient) {
  const SparseDataset d = make_synthetic_logistic(200, 5, 1);
  const LogisticProblem p(d);
  const ReferenceMinimum ref = logistic_reference_minimum(p);
  EXPECT_LE(ref.grad_norm, 1e-10);
  EXPECT_LT(ref.value, std::log(2.0));
}

// ---------------------------------------------------------------------------
// Minibatches

TEST(Minibatch, FullBatchEveryIndexOnce) {
  RngStream rng(5);
  const SparseDataset d = make_synthetic_logistic(30, 2, 1);
  const MinibatchView v = sample_minibatch(d, 30, rng);
  ASSERT_EQ(v.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(v.indices[i], i);
}

TEST(Minibatch, DistinctSortedIndices) {
  RngStream rng(6);
  const SparseDataset d = make_synthetic_logistic(100, 2, 1);
  for (int k = 0; k < 50; ++k) {
    const MinibatchView v = sample_minibatch(d, 37, rng);
    ASSERT_EQ(v.size(), 37u);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v.indices[i - 1], v.indices[i]);
  }
}

TEST(Minibatch, SingleIndexFrequencyWithinThreeSigma) {
  RngStream rng(7);
  const std::size_t N = 20;
  const SparseDataset d = make_synthetic_logistic(N, 2, 1);
  const int draws = 100000;
  std::vector<int> hits(N, 0);
  for (int k = 0; k < draws; ++k) ++hits[sample_minibatch(d, 1, rng).indices[0]];
  const double p = 1.0 / N;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_LE(std::abs(h - draws * p), 3 * sd + 1);
}

TEST(Minibatch, StreamAdvances) {
  RngStream rng(8);
  const SparseDataset d = make_synthetic_logistic(1000, 2, 1);
  const auto a = sample_minibatch(d, 10, rng);
  const auto b = sample_minibatch(d, 10, rng);
  EXPECT_NE(a.indices, b.indices);
  RngStream r1(8), r2(8);
  EXPECT_EQ(sample_minibatch(d, 10, r1).indices, sample_minibatch(d, 10, r2).indices);
}

TEST(Minibatch, SizeValidation) {
  RngStream rng(1);
  const SparseDataset d = make_synthetic_logistic(10, 2, 1);
  EXPECT_THROW(sample_minibatch(d, 0, rng), std::invalid_argument);
  EXPECT_THROW(sample_minibatch(d, 11, rng), std::invalid_argument);
}

TEST(Minibatch, StochasticObjectiveDrawsBatches) {
  const SparseDataset d = make_synthetic_logistic(50, 3, 2);
  LogisticObjective full(d);
  RngStream rng(0);
  EXPECT_EQ(full.sample_step(rng), nullptr);
  LogisticObjective sgd(d, std::nullopt, 5);
  auto step = sgd.sample_step(rng);
  ASSERT_NE(step, nullptr);
  EXPECT_TRUE(step->has_gradient());
  EXPECT_NEAR(step->value(Vector::Zero(4)), std::log(2.0), 1e-15);
}

// ---------------------------------------------------------------------------
// BB initial step

TEST(BbStep, DiagonalExample) {
  QuadraticObjective f(QuadraticProblem::diagonal(vec({1.0, 4.0})));
  EvaluationLedger led;
  const BbStep bb = bb_initial_step(ObjectiveHandle(f, led), vec({1.0, 1.0}));
  EXPECT_NEAR(bb.step, 17.0 / 65.0, 1e-12);
  EXPECT_FALSE(bb.fallback);
  EXPECT_EQ(led.gevals, 2u);
}

TEST(BbStep, IsotropicGivesInverseCurvature) {
  QuadraticObjective f(QuadraticProblem::diagonal(vec({2.5, 2.5, 2.5})));
  EvaluationLedger led;
  const BbStep bb = bb_initial_step(ObjectiveHandle(f, led), vec({-3.0, 0.2, 7.0}));
  EXPECT_NEAR(bb.step, 1.0 / 2.5, 1e-12);
}

TEST(BbStep, FallbackAtMinimizer) {
  QuadraticObjective f(QuadraticProblem::diagonal(vec({1.0, 4.0})));
  EvaluationLedger led;
  const BbStep bb = bb_initial_step(ObjectiveHandle(f, led), Vector::Zero(2));
  EXPECT_EQ(bb.step, 1.0);
  EXPECT_TRUE(bb.fallback);
}

// ---------------------------------------------------------------------------
// MGH

TEST(Mgh, RosenbrockValues) {
  const MghProblem& p = mgh_problem("rosenbrock");
  EXPECT_NEAR(mgh_eval(p, p.start), 24.2, 1e-12);
  EXPECT_EQ(mgh_eval(p, vec({1.0, 1.0})), 0.0);
  EXPECT_EQ(&mgh_problem("1"), &p);
}

TEST(Mgh, UnknownIdRejected) {
  EXPECT_THROW(mgh_problem("no_such_problem"), std::invalid_argument);
  EXPECT_THROW(mgh_eval(mgh_problem("beale"), Vector::Zero(3)), std::invalid_argument);
}

TEST(Mgh, CoverageAndDimensions) {
  const auto& cat = mgh_catalogue();
  EXPECT_GE(cat.size(), 12u);
  for (const char* required : {"rosenbrock", "freudenstein_roth", "powell_badly_scaled", "helical_valley", "wood",
                               "extended_rosenbrock", "trigonometric", "brown_badly_scaled", "beale", "box_3d",
                               "variably_dimensioned", "penalty1"}) {
    EXPECT_NO_THROW(mgh_problem(required)) << required;
  }
  for (const auto& p : cat) {
    EXPECT_LE(p.n, 12) << p.name;
    EXPECT_EQ(p.start.size(), p.n) << p.name;
    EXPECT_GE(mgh_eval(p, p.start), 0.0);
  }
}

// Frozen from tests/oracles/mgh_start_values.py (independent numpy residuals).
TEST(Mgh, StartValuesMatchIndependentOracle) {
  const std::map<std::string, double> oracle = {
      {"rosenbrock", 24.199999999999996},
      {"freudenstein_roth", 400.5},
      {"powell_badly_scaled", 1.1352617173483783},
      {"brown_badly_scaled", 999998000003.0},
      {"beale", 14.203125},
      {"jennrich_sampson", 4171.306161960493},
      {"helical_valley", 2500.0},
      {"bard", 41.681695861678},
      {"gaussian", 3.888106991166684e-06},
      {"box_3d", 1031.1538106093983},
      {"powell_singular", 215.00000000000003},
      {"wood", 19192.0},
      {"kowalik_osborne", 0.00531317227210854},
      {"brown_dennis", 7926693.336997433},
      {"osborne1", 0.8790262935446401},
      {"biggs_exp6", 0.7790700756559701},
      {"extended_rosenbrock", 96.8},
      {"extended_powell", 430.0},
      {"penalty1", 885.06264},
      {"variably_dimensioned", 423478.5},
      {"trigonometric", 0.008451866054432825},
      {"brown_almost_linear", 273.2480478286743},
      {"discrete_boundary_value", 0.0013749917331919122},
      {"broyden_tridiagonal", 19.0},
      {"linear_full_rank", 71.99999999999997},
      {"chebyquad", 0.03861769828593029},
  };
  for (const auto& p : mgh_catalogue()) {
    const auto it = oracle.find(p.name);
    ASSERT_NE(it, oracle.end()) << p.name;
    EXPECT_NEAR(mgh_eval(p, p.start), it->second, 1e-13 * std::max(1.0, it->second)) << p.name;
  }
}

// Freudenstein-Roth's global minimiser (5, 4) lies below its local f_ref.
TEST(Mgh, CataloguedMinimizers) {
  for (const auto& p : mgh_catalogue()) {
    if (!p.minimizer) continue;
    const double f = mgh_eval(p, *p.minimizer);
    EXPECT_LE(f, p.f_ref + 1e-8) << p.name;
    if (p.f_ref == 0.0) EXPECT_LE(f, 1e-8) << p.name;
  }
  EXPECT_EQ(mgh_eval(mgh_problem("freudenstein_roth"), vec({5.0, 4.0})), 0.0);
}

TEST(Mgh, ObjectiveWrapper) {
  MghObjective f(mgh_problem("wood"));
  EXPECT_EQ(f.dim(), 4);
  EXPECT_FALSE(f.has_gradient());
  EXPECT_DOUBLE_EQ(f.value(f.initial_point()), 19192.0);
}
