#include <gtest/gtest.h>

#include <cmath>

#include "aels/driver.hpp"
#include "aels/mgh.hpp"
#include "aels/objectives.hpp"

using namespace aels;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

QuadraticObjective diag14() {
  return QuadraticObjective(QuadraticProblem::diagonal(vec({1.0, 4.0})), vec({1.0, 1.0}));
}

class Flat final : public Objective {
 public:
  Eigen::Index dim() const override { return 3; }
  double value(const Vector&) const override { return 2.0; }
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override { return Vector::Zero(x.size()); }
  Vector initial_point() const override { return Vector::Ones(3); }
};

class Square final : public Objective {
 public:
  Eigen::Index dim() const override { return 1; }
  double value(const Vector& x) const override { return x[0] * x[0]; }
};

DescentConfig config(DirectionKind d, SearchKind s, double T0 = 1.0) {
  DescentConfig c;
  c.direction = d;
  c.search = s;
  c.T0 = T0;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stopping rules

TEST(CheckStop, RelativeError) {
  StopRule r = StopRule::relative_error(1e-4, 1.0);
  r.f0 = 11.0;
  EXPECT_FALSE(check_stop(r, 1.0011, {}, 0).stop);
  const auto d = check_stop(r, 1.0009, {}, 0);
  EXPECT_TRUE(d.stop);
  EXPECT_EQ(d.reason, "converged");
}

TEST(CheckStop, MwTest) {
  StopRule r = StopRule::mw_test(0.1, 0.0);
  r.f0 = 10.0;
  EXPECT_TRUE(check_stop(r, 1.0, {}, 0).stop);
  EXPECT_FALSE(check_stop(r, 1.01, {}, 0).stop);
}

TEST(CheckStop, BudgetDominates) {
  StopRule r = StopRule::relative_error(1e-4, 0.0).with_fevals(50);
  r.f0 = 1.0;
  EvaluationLedger led;
  led.fevals = 50;
  const auto d = check_stop(r, 0.0, led, 0);
  EXPECT_TRUE(d.stop);
  EXPECT_EQ(d.reason, "budget");
  led.fevals = 49;
  EXPECT_EQ(check_stop(r, 0.0, led, 0).reason, "converged");
  r.max_iters = 3;
  EXPECT_EQ(check_stop(r, 0.5, led, 3).reason, "budget");
}

TEST(CheckStop, GradNorm) {
  const StopRule r = StopRule::grad_norm(1e-3);
  EXPECT_TRUE(check_stop(r, 5.0, {}, 0, 1e-4).stop);
  EXPECT_FALSE(check_stop(r, 5.0, {}, 0, 1e-2).stop);
  EXPECT_THROW(check_stop(r, 5.0, {}, 0), std::invalid_argument);
}

TEST(CheckStop, Validation) {
  StopRule r;
  r.kind = StopKind::relative_error;
  r.epsilon = 1e-4;
  EXPECT_THROW(r.validate(), std::invalid_argument);
  EXPECT_THROW(StopRule::mw_test(0.0, 1.0).validate(), std::invalid_argument);
  StopRule ok = StopRule::relative_error(1e-4, 0.0);
  EXPECT_THROW(check_stop(ok, 1.0, {}, 0), std::invalid_argument);
}

TEST(Names, RoundTrip) {
  for (auto k : {DirectionKind::gradient, DirectionKind::fd_gradient, DirectionKind::random, DirectionKind::bfgs}) {
    EXPECT_EQ(parse_direction(to_string(k)), k);
  }
  for (auto k : {SearchKind::aels, SearchKind::adaptive, SearchKind::traditional, SearchKind::wolfe,
                 SearchKind::constant, SearchKind::inverse}) {
    EXPECT_EQ(parse_search(to_string(k)), k);
  }
  EXPECT_THROW(parse_direction("newton"), std::invalid_argument);
  EXPECT_THROW(parse_search("golden"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Descent loop

TEST(Descent, GradientAelsOnDiagonalQuadratic) {
  // Contraction 1 - beta^2 (1 - sqrt(1 - m/L)) with m = 1, L = 4 bounds the
  // iteration count by ceil(ln 1e-4 / ln 0.9488263) = 176.
  const double beta = kInverseGolden;
  const double rate = 1.0 - beta * beta * (1.0 - std::sqrt(0.75));
  const long bound = static_cast<long>(std::ceil(std::log(1e-4) / std::log(rate)));
  EXPECT_EQ(bound, 176);
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::aels),
                              StopRule::relative_error(1e-4, 0.0).with_fevals(100000), rng);
  EXPECT_TRUE(tr.converged);
  EXPECT_EQ(tr.reason, "converged");
  EXPECT_LE(static_cast<long>(tr.iterations.size()), bound);
  EXPECT_LE(tr.f, 1e-4 * tr.f0);
  EXPECT_DOUBLE_EQ(tr.f0, 2.5);
}

TEST(Descent, PerStepContractionHolds) {
  const double beta = kInverseGolden;
  const double rate = 1.0 - beta * beta * (1.0 - std::sqrt(0.75));
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::aels, 0.01),
                              StopRule::relative_error(1e-8, 0.0).with_fevals(100000), rng);
  double prev = tr.f0;
  for (const auto& it : tr.iterations) {
    EXPECT_LE(it.f, rate * prev * (1 + 1e-12));
    prev = it.f;
  }
}

TEST(Descent, WarmStartUsesPreviousStep) {
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::aels, 3.0),
                              StopRule::budget(200), rng);
  ASSERT_GE(tr.iterations.size(), 3u);
  EXPECT_DOUBLE_EQ(tr.iterations[0].T, 3.0 / kInverseGolden);
  for (std::size_t i = 1; i < tr.iterations.size(); ++i) {
    EXPECT_DOUBLE_EQ(tr.iterations[i].T, tr.iterations[i - 1].step / kInverseGolden);
  }
}

TEST(Descent, TraditionalRestartsAtT0) {
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::traditional, 2.0),
                              StopRule::budget(200), rng);
  for (const auto& it : tr.iterations) EXPECT_EQ(it.T, 2.0);
}

TEST(Descent, InverseScheduleSteps) {
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::inverse, 6.0),
                              StopRule::budget(1000).with_iters(4), rng);
  ASSERT_EQ(tr.iterations.size(), 4u);
  const double expected[] = {6.0, 3.0, 2.0, 1.5};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(tr.iterations[static_cast<std::size_t>(i)].step, expected[i]);
  EXPECT_EQ(tr.reason, "budget");
}

TEST(Descent, ConstantScheduleSteps) {
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::constant, 0.1),
                              StopRule::budget(1000).with_iters(5), rng);
  for (const auto& it : tr.iterations) EXPECT_EQ(it.step, 0.1);
}

TEST(Descent, FlatObjectiveRandomDirectionsRunToBudget) {
  Flat f;
  RngStream rng(4);
  const auto tr = run_descent(f, config(DirectionKind::random, SearchKind::aels), StopRule::budget(60), rng);
  EXPECT_EQ(tr.reason, "budget");
  EXPECT_GE(tr.iterations.size(), 2u);
  for (const auto& it : tr.iterations) {
    EXPECT_TRUE(it.abandoned);
    EXPECT_EQ(it.step, 0.0);
  }
  EXPECT_TRUE(tr.x.isApprox(Vector::Ones(3)));
}

TEST(Descent, FlatObjectiveGradientStallsAfterRetry) {
  Flat f;
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::aels), StopRule::budget(1000), rng);
  EXPECT_EQ(tr.reason, "stalled");
  EXPECT_EQ(tr.iterations.size(), 2u);
  EXPECT_FALSE(tr.converged);
}

TEST(Descent, MonotoneOnDeterministicObjectives) {
  const auto& rosen = mgh_problem("rosenbrock");
  MghObjective f(rosen);
  for (auto dir : {DirectionKind::gradient, DirectionKind::fd_gradient, DirectionKind::bfgs}) {
    for (auto search : {SearchKind::aels, SearchKind::adaptive, SearchKind::traditional, SearchKind::wolfe}) {
      if (dir == DirectionKind::gradient && !f.has_gradient()) continue;
      RngStream rng(1);
      const auto tr = run_descent(f, config(dir, search), StopRule::budget(3000), rng);
      double prev = tr.f0;
      for (const auto& it : tr.iterations) {
        EXPECT_LE(it.f, prev) << to_string(dir) << ":" << to_string(search);
        prev = it.f;
      }
    }
  }
}

TEST(Descent, LedgerMatchesIterationDeltas) {
  const auto f = diag14();
  for (auto search : {SearchKind::aels, SearchKind::wolfe, SearchKind::traditional}) {
    RngStream rng(0);
    const auto tr = run_descent(f, config(DirectionKind::fd_gradient, search), StopRule::budget(500), rng);
    std::uint64_t sum = 1;  // f(x0)
    for (const auto& it : tr.iterations) sum += it.delta.fevals;
    EXPECT_EQ(sum, tr.ledger.fevals);
    EXPECT_EQ(tr.ledger.gevals, 0u);
  }
}

TEST(Descent, BfgsAelsSolvesRosenbrock) {
  MghObjective f(mgh_problem("rosenbrock"));
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::bfgs, SearchKind::aels),
                              StopRule::mw_test(1e-5, 0.0).with_fevals(1300), rng);
  EXPECT_TRUE(tr.converged) << tr.reason << " f=" << tr.f;
}

TEST(Descent, GradNormStop) {
  const auto f = diag14();
  RngStream rng(0);
  const auto tr = run_descent(f, config(DirectionKind::gradient, SearchKind::aels),
                              StopRule::grad_norm(1e-6).with_fevals(100000), rng);
  EXPECT_TRUE(tr.converged);
  EXPECT_LE(f.gradient(tr.x).norm(), 1e-6);
}

TEST(Descent, SameSeedSameTrajectory) {
  const auto f = diag14();
  RngStream a(99), b(99);
  const auto ta = run_descent(f, config(DirectionKind::random, SearchKind::aels), StopRule::budget(400), a);
  const auto tb = run_descent(f, config(DirectionKind::random, SearchKind::aels), StopRule::budget(400), b);
  ASSERT_EQ(ta.iterations.size(), tb.iterations.size());
  for (std::size_t i = 0; i < ta.iterations.size(); ++i) EXPECT_EQ(ta.iterations[i].f, tb.iterations[i].f);
  EXPECT_EQ(ta.x, tb.x);
}

TEST(Descent, RejectsBadInputs) {
  const auto f = diag14();
  RngStream rng(0);
  EXPECT_THROW(run_descent(f, config(DirectionKind::gradient, SearchKind::aels, 0.0), StopRule::budget(10), rng),
               std::invalid_argument);
  Square sq;
  EXPECT_THROW(run_descent(sq, config(DirectionKind::gradient, SearchKind::aels), StopRule::budget(10), rng),
               std::invalid_argument);
  EXPECT_THROW(run_descent(f, config(DirectionKind::gradient, SearchKind::aels), StopRule::budget(10), rng,
                           vec({1.0, 2.0, 3.0})),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Nelder-Mead

TEST(NelderMead, OneIterationHandTrace) {
  // Simplex {1, 2} on x^2: reflection lands on 0, expansion on -1 is worse.
  Square f;
  const auto tr = nelder_mead(f, StopRule::budget(100).with_iters(1), std::vector<Vector>{vec({1.0}), vec({2.0})});
  EXPECT_EQ(tr.x[0], 0.0);
  EXPECT_EQ(tr.f, 0.0);
  EXPECT_EQ(tr.ledger.fevals, 4u);
}

TEST(NelderMead, InitialSimplexPerturbation) {
  Square f;
  const auto tr = nelder_mead(f, StopRule::budget(2), vec({4.0}));
  EXPECT_EQ(tr.ledger.fevals, 2u);
  EXPECT_EQ(tr.f, 16.0);
  const auto tz = nelder_mead(f, StopRule::budget(2), vec({0.0}));
  EXPECT_EQ(tz.f, 0.0);
}

TEST(NelderMead, FlatObjectiveCollapsesSimplex) {
  Flat f;
  const auto tr = nelder_mead(f, StopRule::budget(100000));
  EXPECT_EQ(tr.reason, "simplex");
}

TEST(NelderMead, SolvesRosenbrock) {
  MghObjective f(mgh_problem("rosenbrock"));
  const auto tr = nelder_mead(f, StopRule::mw_test(1e-5, 0.0).with_fevals(10000));
  EXPECT_TRUE(tr.converged) << tr.reason << " f=" << tr.f;
}

TEST(NelderMead, RejectsWrongVertexCount) {
  Square f;
  EXPECT_THROW(nelder_mead(f, StopRule::budget(10), std::vector<Vector>{vec({1.0})}), std::invalid_argument);
}
