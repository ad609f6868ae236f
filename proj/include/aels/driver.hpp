#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aels/core.hpp"
#include "aels/directions.hpp"
#include "aels/linesearch.hpp"

namespace aels {

enum class StopKind { relative_error, mw_test, grad_norm, budget_only };

/// Primary convergence criterion plus budgets. Budgets are always enforced.
struct StopRule {
  StopKind kind = StopKind::budget_only;
  double epsilon = 0.0;
  /// f* for relative_error, f_L for mw_test.
  std::optional<double> f_star;
  /// f(x0); filled in by the driver when unset.
  std::optional<double> f0;
  double tau = 0.0;
  std::uint64_t max_fevals = std::numeric_limits<std::uint64_t>::max();
  long max_iters = std::numeric_limits<long>::max();

  static StopRule relative_error(double eps, double f_star);
  static StopRule mw_test(double tau, double f_L);
  static StopRule grad_norm(double eps);
  static StopRule budget(std::uint64_t max_fevals);

  StopRule& with_fevals(std::uint64_t n) {
    max_fevals = n;
    return *this;
  }
  StopRule& with_iters(long n) {
    max_iters = n;
    return *this;
  }

  void validate() const;
};

struct StopDecision {
  bool stop = false;
  /// "converged", "budget" or empty. The driver adds "stalled" and "simplex".
  std::string reason;
};

/// Budget is tested first. grad_norm rules need the current gradient norm.
StopDecision check_stop(const StopRule& rule, double current_f, const EvaluationLedger& ledger, long iter,
                        std::optional<double> grad_norm = std::nullopt);

enum class DirectionKind { gradient, fd_gradient, random, bfgs };
enum class SearchKind { aels, adaptive, traditional, wolfe, constant, inverse };

const char* to_string(DirectionKind k);
const char* to_string(SearchKind k);
DirectionKind parse_direction(const std::string& s);
SearchKind parse_search(const std::string& s);

struct DescentConfig {
  DirectionKind direction = DirectionKind::gradient;
  SearchKind search = SearchKind::aels;
  double T0 = 1.0;
  LineSearchConfig ls;
  FdConfig fd;
};

struct IterationRecord {
  long iter;
  /// Initial trial step handed to the search (the schedule value for fixed steps).
  double T;
  double step;
  /// Direction strategy name, or "nelder-mead".
  const char* direction;
  EvaluationLedger delta;
  int probes;
  /// Objective after the step (full batch for stochastic runs, uncounted).
  double f;
  bool abandoned;
};

struct DescentTrace {
  std::vector<IterationRecord> iterations;
  Vector x;
  double f = kInf;
  double f0 = kInf;
  EvaluationLedger ledger;
  std::string reason;
  bool converged = false;
};

/// Line-search descent from x0 (the objective's initial point when unset).
/// Stochastic objectives draw a fresh minibatch for each step from `rng`;
/// the random direction strategy also draws from `rng`.
DescentTrace run_descent(const Objective& obj, const DescentConfig& cfg, const StopRule& stop, RngStream& rng,
                         std::optional<Vector> x0 = std::nullopt);

/// Simplex method with reflection 1, expansion 2, contraction 1/2, shrink 1/2.
/// Also stops when the simplex diameter drops below 1e-12.
DescentTrace nelder_mead(const Objective& obj, const StopRule& stop, std::optional<Vector> x0 = std::nullopt);
/// Same from a caller-supplied simplex of n + 1 vertices.
DescentTrace nelder_mead(const Objective& obj, const StopRule& stop, std::vector<Vector> simplex);

}  // namespace aels
