#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace aels {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Non-finite objective values order as "worse than anything finite".
inline double sanitize(double v) { return std::isfinite(v) ? v : kInf; }

/// Counts of objective work done inside one trial. Never shared across trials.
struct EvaluationLedger {
  std::uint64_t fevals = 0;
  std::uint64_t gevals = 0;
  std::uint64_t dd_evals = 0;
};

inline EvaluationLedger operator-(const EvaluationLedger& a, const EvaluationLedger& b) {
  return {a.fevals - b.fevals, a.gevals - b.gevals, a.dd_evals - b.dd_evals};
}

/// xoshiro256** seeded through splitmix64. The algorithm is fixed so a seed
/// yields the same draws on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  /// Independent stream for one trial of a suite.
  static RngStream for_trial(std::uint64_t suite_seed, std::uint64_t trial_index);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Standard normal via Box-Muller (cosine branch only, no cached spare).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

/// v = z / ||z|| with z ~ N(0, I_n): uniform on the unit sphere.
Vector random_unit_vector(RngStream& rng, Eigen::Index n);

/// x + t d. Line searches and the descent driver both go through this so a
/// probed point and the accepted iterate are bitwise identical.
Vector line_point(const Vector& x, const Vector& d, double t);

/// An evaluatable problem. Data is immutable after construction; every call
/// is pure given its arguments, so one Objective may back many trials.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual bool has_gradient() const { return false; }
  virtual Vector gradient(const Vector& x) const;
  virtual Vector initial_point() const { return Vector::Zero(dim()); }

  /// Objective for one descent step of a stochastic run (a fresh minibatch).
  /// Deterministic objectives return nullptr.
  virtual std::unique_ptr<Objective> sample_step(RngStream& rng) const;

  void check_dim(const Vector& x) const;
};

/// An objective paired with the ledger of the trial evaluating it. All
/// counted work goes through here.
class ObjectiveHandle {
 public:
  ObjectiveHandle(const Objective& f, EvaluationLedger& ledger) : f_(&f), ledger_(&ledger) {}

  double value(const Vector& x) const {
    ++ledger_->fevals;
    return f_->value(x);
  }
  Vector gradient(const Vector& x) const {
    ++ledger_->gevals;
    return f_->gradient(x);
  }
  bool has_gradient() const { return f_->has_gradient(); }
  Eigen::Index dim() const { return f_->dim(); }

  const Objective& objective() const { return *f_; }
  EvaluationLedger& ledger() const { return *ledger_; }

 private:
  const Objective* f_;
  EvaluationLedger* ledger_;
};

}  // namespace aels
