#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aels/core.hpp"

namespace aels {

/// One Moré-Garbow-Hillstrom least-squares problem: f(x) = sum_j r_j(x)^2.
struct MghProblem {
  int id;                     ///< number in the original catalogue
  std::string name;           ///< short lowercase key, e.g. "rosenbrock"
  Eigen::Index n;
  Eigen::Index m;             ///< residual count
  std::function<void(const Vector& x, Vector& r)> residuals;
  Vector start;
  /// Reference optimum used by the convergence test. For Freudenstein-Roth
  /// and the trigonometric function this is the local minimum reached from
  /// the standard start.
  double f_ref;
  std::optional<Vector> minimizer;
};

/// Every implemented problem, ordered by catalogue number.
const std::vector<MghProblem>& mgh_catalogue();

/// Lookup by name ("rosenbrock") or number ("1"). Throws for unknown ids.
const MghProblem& mgh_problem(const std::string& id);

double mgh_eval(const MghProblem& p, const Vector& x);

class MghObjective final : public Objective {
 public:
  explicit MghObjective(const MghProblem& p) : p_(&p) {}
  Eigen::Index dim() const override { return p_->n; }
  double value(const Vector& x) const override { return mgh_eval(*p_, x); }
  Vector initial_point() const override { return p_->start; }
  const MghProblem& problem() const { return *p_; }

 private:
  const MghProblem* p_;
};

}  // namespace aels
