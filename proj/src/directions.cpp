#include "aels/directions.hpp"

#include <stdexcept>

namespace aels {

void FdConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("FdConfig: sigma must be positive");
}

FdGradient fd_gradient(const ObjectiveHandle& obj, const Vector& x, double fx, const FdConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = x.size();
  FdGradient out{Vector(n), !std::isfinite(fx)};
  Vector probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    probe[i] = x[i] + cfg.sigma;
    const double fi = obj.value(probe);
    probe[i] = x[i];
    if (!std::isfinite(fi)) out.non_finite = true;
    out.g[i] = (fi - fx) / cfg.sigma;
  }
  return out;
}

double fd_directional(const ObjectiveHandle& obj, const Vector& x, double fx, const Vector& v,
                      const FdConfig& cfg) {
  cfg.validate();
  if (v.size() != x.size()) throw std::invalid_argument("fd_directional: dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("fd_directional: v must be a unit vector");
  return (obj.value(x + cfg.sigma * v) - fx) / cfg.sigma;
}

RandomDirection random_direction(const ObjectiveHandle& obj, const Vector& x, double fx, RngStream& rng,
                                 const FdConfig& cfg) {
  return random_direction(obj, x, fx, random_unit_vector(rng, x.size()), cfg);
}

RandomDirection random_direction(const ObjectiveHandle& obj, const Vector& x, double fx, const Vector& v,
                                 const FdConfig& cfg) {
  const double mu = fd_directional(obj, x, fx, v, cfg);
  return {-mu * v, v, mu};
}

void BfgsState::reset() {
  H.setIdentity();
  history_valid = false;
}

BfgsDirection bfgs_direction(BfgsState& state, const Vector& g) {
  if (g.size() != state.H.rows()) throw std::invalid_argument("bfgs_direction: dimension mismatch");
  const double gnorm = g.norm();
  if (gnorm == 0.0) return {Vector::Zero(g.size()), false};
  Vector d = -(state.H * g);
  if (d.dot(g) >= -1e-12 * d.norm() * gnorm || !d.allFinite()) {
    state.reset();
    return {-g, true};
  }
  return {std::move(d), false};
}

bool bfgs_update(BfgsState& state, const Vector& s, const Vector& y) {
  const Eigen::Index n = state.H.rows();
  if (s.size() != n || y.size() != n) throw std::invalid_argument("bfgs_update: dimension mismatch");
  const double ys = y.dot(s);
  if (!(ys > 1e-10 * s.norm() * y.norm())) return false;
  const double rho = 1.0 / ys;
  // H+ = (I - rho s y') H (I - rho y s') + rho s s', expanded.
  const Vector Hy = state.H * y;
  const double yHy = y.dot(Hy);
  state.H += (rho * rho * yHy + rho) * (s * s.transpose()) - rho * (Hy * s.transpose() + s * Hy.transpose());
  state.H = (0.5 * (state.H + state.H.transpose())).eval();
  state.history_valid = true;
  return true;
}

}  // namespace aels
