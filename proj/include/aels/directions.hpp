#pragma once

#include "aels/core.hpp"

namespace aels {

struct FdConfig {
  double sigma = 1.5e-8;

  void validate() const;
};

struct FdGradient {
  Vector g;
  /// Some probe returned a non-finite value.
  bool non_finite = false;
};

/// Forward differences g_i = (f(x + sigma e_i) - f(x)) / sigma. `fx` is the
/// cached f(x); costs n fevals.
FdGradient fd_gradient(const ObjectiveHandle& obj, const Vector& x, double fx, const FdConfig& cfg = {});

/// (f(x + sigma v) - f(x)) / sigma for a unit vector v; one feval.
double fd_directional(const ObjectiveHandle& obj, const Vector& x, double fx, const Vector& v,
                      const FdConfig& cfg = {});

struct RandomDirection {
  Vector d;  ///< -mu v
  Vector v;
  double mu;
};

/// d = -mu v with v uniform on the sphere and mu the FD directional derivative.
RandomDirection random_direction(const ObjectiveHandle& obj, const Vector& x, double fx, RngStream& rng,
                                 const FdConfig& cfg = {});
/// Same with a caller-chosen unit vector.
RandomDirection random_direction(const ObjectiveHandle& obj, const Vector& x, double fx, const Vector& v,
                                 const FdConfig& cfg = {});

/// Dense inverse-Hessian approximation.
struct BfgsState {
  Matrix H;
  bool history_valid = false;

  explicit BfgsState(Eigen::Index n) : H(Matrix::Identity(n, n)) {}
  void reset();
};

struct BfgsDirection {
  Vector d;
  bool used_fallback;
};

/// d = -H g, falling back to -g (and resetting H) when d is not a descent
/// direction.
BfgsDirection bfgs_direction(BfgsState& state, const Vector& g);

/// Standard inverse update. Skipped when y's <= 1e-10 |s| |y|; returns
/// whether the update was applied.
bool bfgs_update(BfgsState& state, const Vector& s, const Vector& y);

}  // namespace aels
