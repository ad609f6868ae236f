#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aels/linesearch.hpp"
#include "aels/objectives.hpp"

namespace aels {

/// Constants of an m-strongly convex objective with L-Lipschitz gradient and
/// of the methods run on it.
struct TheoryParams {
  double m = 1.0;
  double L = 1.0;
  double beta = kInverseGolden;
  double c1 = 0.5;
  double c2 = 0.9;
  /// Range of gamma = -d'grad f / |d|^2 over the run.
  double gamma_min = 1.0;
  double gamma_max = 1.0;
  /// Relative FD radius and the distance tolerance it is tied to.
  double sigma_tilde = 0.0;
  double Delta = 0.0;
  /// Absolute FD radius used by the Armijo envelopes.
  double sigma = 0.0;
  long n = 1;
  double T0 = 1.0;
  /// Bound on |g - grad f|.
  double rho = 0.0;
  /// |x0 - x*|.
  double x0_dist = 0.0;
  /// Step range of an Armijo method, for its envelope.
  double t_min = 0.0;
  double t_max = 0.0;

  void validate() const;
  /// sqrt(1 - m/L)
  double s() const;
};

struct StepInterval {
  double lo;
  double hi;

  /// lo (1 - slack) <= t <= hi (1 + slack)
  bool contains(double t, double rel_slack = 0.0) const {
    return t >= lo * (1.0 - rel_slack) && t <= hi * (1.0 + rel_slack);
  }
};

/// Closed-form minimiser of t -> f(x + t d) for f = 1/2 x'Ax + b'x.
double exact_quadratic_step(const QuadraticProblem& p, const Vector& x, const Vector& d);
double exact_quadratic_step(const Matrix& A, const Vector& b, const Vector& x, const Vector& d);

/// Golden-section search on [a, b] until the bracket is narrower than tol.
double oracle_line_minimizer(const std::function<double(double)>& h, double a, double b, double tol);

/// Positive root of h(t) = h(0) + c1 t slope, bracketed by doubling and then
/// bisected to `tol` relative.
double armijo_equality_step(const std::function<double(double)>& h, double slope, double c1 = 0.5,
                            double tol = 1e-10);

struct StepIntervals {
  StepInterval armijo;
  StepInterval exact;
  StepInterval wolfe;
};

StepIntervals step_size_intervals(const TheoryParams& p, double gamma);

struct ComplexityBounds {
  double aels_contraction;
  /// Per-step AELS fevals after the first step.
  double aels_fevals_per_step;
  /// Extra term for the first step.
  double aels_first_step_extra;
  /// Wolfe fevals per search at gamma = gamma_max and T = T0.
  double wolfe_fevals_per_search;
};

ComplexityBounds complexity_bounds(const TheoryParams& p);

/// Wolfe fevals for one search with two-point FD derivatives.
double wolfe_fevals_bound(const TheoryParams& p, double gamma, double T);

/// Total AELS fevals over k steps, counting the initial f(x0).
double aels_total_fevals_bound(const TheoryParams& p, long k);

enum class RateMode { gradient, fd_gradient, random, armijo_gradient, armijo_fd_gradient, armijo_random };

/// Upper bound on f(x_k) - f* given f(x0) - f*.
double rate_envelope(const TheoryParams& p, RateMode mode, long k, double f0_gap);

struct TheoryCheck {
  std::string name;
  long trials = 0;
  long violations = 0;
  std::string detail;
  bool passed() const { return trials > 0 && violations == 0; }
};

/// Randomised bound suites on quadratics; used by the check-theory command.
std::vector<TheoryCheck> theory_checks(std::uint64_t seed = 1, long instances = 200);

}  // namespace aels
