// Command-line front end: run, suite, profile, check-theory.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aels/bench.hpp"
#include "aels/theory.hpp"

namespace {

int cmd_run(const std::string& problem, const std::string& algo, const std::string& t0, std::size_t batch,
            std::uint64_t seed, double eps, double tau, std::uint64_t max_fevals) {
  aels::ProblemOptions opts;
  opts.eps = eps;
  opts.tau = tau;
  const auto inst = aels::ProblemInstance::load(problem, opts);
  const auto spec = aels::AlgorithmSpec::parse(algo);
  const double T0 = aels::T0Spec::parse(t0).resolve(inst.t0_reference());
  aels::StopRule budget;
  budget.max_fevals = max_fevals;
  const auto res = aels::run_trial(inst, spec, T0, batch, seed, 0, budget);
  aels::write_records_csv(std::cout, {res.record});
  return 0;
}

int cmd_suite(const std::string& path, const std::string& out, unsigned workers) {
  auto cfg = aels::SuiteConfig::parse_file(path);
  if (!out.empty()) cfg.records_path = out;
  if (cfg.records_path.empty()) cfg.records_path = "records.csv";
  if (workers) cfg.parallelism = workers;
  const auto results = aels::run_suite(cfg);
  std::size_t converged = 0;
  for (const auto& r : results) converged += r.record.converged;
  std::printf("%zu trials, %zu converged; records written to %s\n", results.size(), converged,
              cfg.records_path.c_str());
  return 0;
}

int cmd_profile(const std::string& records, const std::string& metric, const std::string& out,
                const std::vector<std::string>& labels) {
  const auto recs = aels::read_records_csv(records);
  const auto curves = aels::performance_profile(recs, aels::parse_metric(metric), labels);
  const auto files = aels::emit_outputs(recs, curves, out);
  for (const auto& c : curves) {
    std::printf("%-32s rho(1)=%.3f solved=%.3f\n", c.label.c_str(), c.rho(1.0), c.solved_fraction);
  }
  std::printf("%zu files written to %s\n", files.size(), out.c_str());
  return 0;
}

int cmd_check_theory(std::uint64_t seed, long instances) {
  bool ok = true;
  for (const auto& c : aels::theory_checks(seed, instances)) {
    std::printf("%s %-18s %s\n", c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximately exact line search benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one trial and print its record");
  std::string problem, algo, t0 = "1bb";
  std::size_t batch = 0;
  std::uint64_t seed = 0;
  double eps = 1e-4, tau = 1e-5;
  std::uint64_t max_fevals = 100000;
  run->add_option("--problem", problem, "mgh:<id>, quad:<d1>/<d2>/..., logistic:<path> or synth:<N>x<n>[@seed]")
      ->required();
  run->add_option("--algo", algo, "<direction>:<search> or nelder-mead")->required();
  run->add_option("--t0", t0, "initial step, absolute or with a bb suffix")->required();
  run->add_option("--batch", batch, "minibatch size (0 = full batch)");
  run->add_option("--seed", seed, "trial seed");
  run->add_option("--eps", eps, "relative-error target");
  run->add_option("--tau", tau, "More-Wild tolerance for mgh problems");
  run->add_option("--max-fevals", max_fevals, "function evaluation budget");

  auto* suite = app.add_subcommand("suite", "Run a benchmark grid from a config file");
  std::string config, suite_out;
  unsigned workers = 0;
  suite->add_option("--config", config, "suite config path")->required()->check(CLI::ExistingFile);
  suite->add_option("--out", suite_out, "records file (overrides the config)");
  suite->add_option("--workers", workers, "worker threads (overrides the config)");

  auto* profile = app.add_subcommand("profile", "Build performance profiles from a records file");
  std::string records, metric = "fevals", out_dir;
  std::vector<std::string> labels;
  profile->add_option("--records", records, "records.csv")->required()->check(CLI::ExistingFile);
  profile->add_option("--metric", metric, "fevals or wall_ms");
  profile->add_option("--out", out_dir, "output directory")->required();
  profile->add_option("--t0-labels", labels, "names for T0 ranks, e.g. 0.01bb,0.1bb,1bb")->delimiter(',');

  auto* theory = app.add_subcommand("check-theory", "Check analytic bounds on random quadratics");
  std::uint64_t theory_seed = 1;
  long instances = 200;
  theory->add_option("--seed", theory_seed, "suite seed");
  theory->add_option("--instances", instances, "instances per check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(problem, algo, t0, batch, seed, eps, tau, max_fevals);
    if (*suite) return cmd_suite(config, suite_out, workers);
    if (*profile) return cmd_profile(records, metric, out_dir, labels);
    if (*theory) return cmd_check_theory(theory_seed, instances);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
