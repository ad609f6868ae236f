#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "aels/core.hpp"

namespace aels {

/// Inverse golden ratio.
inline const double kInverseGolden = 2.0 / (1.0 + std::sqrt(5.0));

struct LineSearchConfig {
  double beta = kInverseGolden;
  double c1 = 1e-4;
  double c2 = 0.9;
  /// Cap on evaluations inside each adjustment loop.
  int patience = 20;
  /// Wolfe extension cap and zoom bisection cap.
  int max_extend = 50;
  int max_zoom = 64;
  /// Backtracking below this step abandons the search.
  double min_step = 1e-30;

  void validate() const;
};

/// Counted restriction h(t) = f(x + t d) of an objective to a line. h(0) is
/// supplied up front; querying t = 0 returns it without a count.
class LineProbe {
 public:
  using Fn = std::function<double(double)>;

  LineProbe(double base_value, Fn value, Fn derivative = nullptr)
      : base_(base_value), value_(std::move(value)), derivative_(std::move(derivative)) {}

  /// Probe along x + t d. With `fd_sigma` set (or when the objective has no
  /// gradient) the derivative is the two-point forward difference
  /// (h(t + s) - h(t)) / s with s = sigma max(1, |t|), costing one feval.
  static LineProbe along(const ObjectiveHandle& obj, Vector x, Vector d, double fx,
                         std::optional<double> fd_sigma = std::nullopt);

  /// Probe for a scalar function; each call is charged to `ledger`.
  static LineProbe from_function(double base_value, std::function<double(double)> h,
                                 std::function<double(double)> dh, EvaluationLedger& ledger);

  double base_value() const { return base_; }
  double operator()(double t);
  bool has_derivative() const { return derivative_ || fd_derivative_; }
  /// h'(t). `h_at_t` must be the value already observed at t (used by the
  /// finite-difference form).
  double derivative(double t, double h_at_t);

  int probes() const { return probes_; }
  int dd_probes() const { return dd_probes_; }

 private:
  double base_;
  Fn value_;
  Fn derivative_;
  std::function<double(double, double)> fd_derivative_;
  int probes_ = 0;
  int dd_probes_ = 0;
};

struct LineSearchOutcome {
  double step = 0.0;
  int probes = 0;
  int dd_probes = 0;
  bool abandoned = false;
  /// h at the chosen step when it was observed (always, unless abandoned).
  double value = kInf;
  std::vector<std::pair<double, double>> trial_trace;
};

/// Approximately exact line search. Forward-tracks by 1/beta or backtracks by
/// beta while h keeps decreasing; the returned step sits in [beta^2 t*, t*]
/// for strictly unimodal h. Uses function values only.
LineSearchOutcome aels(LineProbe& probe, double T, const LineSearchConfig& cfg = {});

/// First t in T, beta T, beta^2 T, ... with h(t) <= h(0) + c1 t slope.
LineSearchOutcome armijo_backtrack(LineProbe& probe, double slope, double T,
                                   const LineSearchConfig& cfg = {});

/// Strong-Wolfe search: steps grow by 1/beta, zoom bisects.
LineSearchOutcome wolfe_search(LineProbe& probe, double slope0, double T,
                               const LineSearchConfig& cfg = {});

/// Bisection zoom on [lo, hi] (either order). Evaluates h(lo) unless lo == 0.
LineSearchOutcome zoom(LineProbe& probe, double slope0, double lo, double hi,
                       const LineSearchConfig& cfg = {});

enum class Schedule { constant, inverse };

double schedule_step(Schedule kind, double T0, long i);

}  // namespace aels
