#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aels/driver.hpp"
#include "aels/objectives.hpp"

namespace aels {

/// Options shared by every problem of a run.
struct ProblemOptions {
  double eps = 1e-4;  ///< relative-error target (logistic, quadratic)
  double tau = 1e-5;  ///< Moré-Wild tolerance (MGH)
};

/// A loaded benchmark problem. Problem specs:
///   mgh:<name|number>        quad:<d1>/<d2>/...
///   logistic:<libsvm path>   synth:<N>x<n>[@seed]
/// Relative dataset paths resolve against $AELS_DATA_DIR when set.
class ProblemInstance {
 public:
  static ProblemInstance load(const std::string& spec, const ProblemOptions& opts = {});

  const std::string& id() const { return id_; }
  /// batch 0 means full batch. Only logistic problems accept a batch.
  std::shared_ptr<const Objective> objective(std::size_t batch = 0) const;
  const Vector& x0() const { return x0_; }
  /// Scale for "bb" initial steps: t_BB at x0 when a gradient exists, else 1.
  double t0_reference() const { return t0_ref_; }
  /// Stop rule without budgets.
  const StopRule& stop() const { return stop_; }
  bool supports_batches() const { return static_cast<bool>(data_); }

 private:
  std::string id_;
  std::shared_ptr<const SparseDataset> data_;
  std::shared_ptr<const Objective> full_;
  Vector x0_;
  double t0_ref_ = 1.0;
  StopRule stop_;
};

/// "<direction>:<search>" or "nelder-mead".
struct AlgorithmSpec {
  std::string id;
  bool nelder_mead = false;
  DescentConfig descent;

  static AlgorithmSpec parse(const std::string& s);
};

/// Absolute ("0.5") or relative to t0_reference ("0.1bb").
struct T0Spec {
  std::string text;
  double value = 1.0;
  bool relative = false;

  static T0Spec parse(const std::string& s);
  double resolve(double reference) const { return relative ? value * reference : value; }
};

struct TrialRecord {
  std::string problem;
  std::string algorithm;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  std::size_t batch = 0;
  std::uint64_t fevals = 0;
  std::uint64_t gevals = 0;
  long iters = 0;
  double final_f = 0.0;
  bool converged = false;
  std::string reason;
  double wall_ms = 0.0;
};

struct TrialResult {
  TrialRecord record;
  DescentTrace trace;
};

/// One isolated trial. The RNG stream is derived from (seed, stream_index).
TrialResult run_trial(const ProblemInstance& problem, const AlgorithmSpec& algo, double t0, std::size_t batch,
                      std::uint64_t seed, std::uint64_t stream_index, StopRule budget);

struct SuiteConfig {
  std::vector<std::string> problems;
  std::vector<std::string> algorithms;
  std::vector<std::string> t0 = {"0.01bb", "0.1bb", "1bb", "10bb", "100bb"};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  /// Empty means full batch only.
  std::vector<std::size_t> batches;
  ProblemOptions options;
  std::uint64_t max_fevals = 100000;
  long max_iters = std::numeric_limits<long>::max();
  unsigned parallelism = 1;
  /// Records file; empty disables writing.
  std::string records_path;

  /// Key-value lines `key = value`; `#` starts a comment. `problem` and
  /// `algorithm` may repeat; list keys take comma-separated values.
  static SuiteConfig parse(std::istream& in);
  static SuiteConfig parse_file(const std::string& path);
  void validate() const;
};

/// Every trial of the grid, ordered problem, algorithm, T0, batch, seed.
/// Fails before running anything if a problem or algorithm is invalid.
std::vector<TrialResult> run_suite(const SuiteConfig& cfg);

// ---------------------------------------------------------------------------
// Records

extern const char* const kRecordColumns[12];

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
std::string record_csv_line(const TrialRecord& r);
std::vector<TrialRecord> read_records_csv(std::istream& in);
std::vector<TrialRecord> read_records_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Performance profiles

bool mw_convergence_test(double f_current, double f0, double f_L, double tau);

enum class CostMetric { fevals, wall_ms };
CostMetric parse_metric(const std::string& s);

struct ProfileCurve {
  std::string label;
  /// (tau, rho) at every tau where rho jumps, ascending.
  std::vector<std::pair<double, double>> breakpoints;
  double solved_fraction = 0.0;

  double rho(double tau) const;
};

/// Curves per (algorithm, T0 rank, batch). T0 values are ranked per
/// (problem, algorithm) so relative grids line up across problems;
/// `t0_labels` names the ranks. Multi-seed cells use the median converged
/// cost and are unsolved when most seeds fail.
std::vector<ProfileCurve> performance_profile(const std::vector<TrialRecord>& records, CostMetric metric,
                                              const std::vector<std::string>& t0_labels = {});

/// records.csv plus profile_<label>.csv and profile_<label>.svg per curve.
std::vector<std::string> emit_outputs(const std::vector<TrialRecord>& records,
                                      const std::vector<ProfileCurve>& curves, const std::string& out_dir);

std::string profile_svg(const ProfileCurve& curve);

}  // namespace aels
