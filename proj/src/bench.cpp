#include "aels/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aels/mgh.hpp"

namespace aels {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T v{};
  const char* b = text.data();
  const char* e = b + text.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw std::invalid_argument(std::string("bad ") + what + ": '" + text + "'");
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string resolve_data_path(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  if (const char* root = std::getenv("AELS_DATA_DIR"); root && *root) return (fs::path(root) / p).string();
  return path;
}

double bb_reference(const Objective& obj, const Vector& x0) {
  EvaluationLedger scratch;
  return bb_initial_step(ObjectiveHandle(obj, scratch), x0).step;
}

}  // namespace

ProblemInstance ProblemInstance::load(const std::string& spec, const ProblemOptions& opts) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("problem spec '" + spec + "' must look like kind:argument");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  ProblemInstance inst;
  inst.id_ = spec;

  if (kind == "mgh") {
    const MghProblem& p = mgh_problem(arg);
    inst.full_ = std::make_shared<MghObjective>(p);
    inst.x0_ = p.start;
    inst.stop_ = StopRule::mw_test(opts.tau, p.f_ref);
    return inst;
  }
  if (kind == "quad") {
    const auto parts = split(arg, '/');
    Vector diag(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) diag[static_cast<Eigen::Index>(i)] = parse_number<double>(parts[i], "eigenvalue");
    if (diag.size() == 0) throw std::invalid_argument("quad: need at least one eigenvalue");
    auto obj = std::make_shared<QuadraticObjective>(QuadraticProblem::diagonal(diag));
    inst.x0_ = obj->initial_point();
    inst.stop_ = StopRule::relative_error(opts.eps, obj->problem().min_value());
    inst.t0_ref_ = bb_reference(*obj, inst.x0_);
    inst.full_ = std::move(obj);
    return inst;
  }
  if (kind == "logistic" || kind == "synth") {
    std::shared_ptr<SparseDataset> data;
    if (kind == "logistic") {
      data = std::make_shared<SparseDataset>(parse_libsvm_file(resolve_data_path(arg)));
    } else {
      const auto at = arg.find('@');
      const std::string shape = arg.substr(0, at);
      const auto x = shape.find('x');
      if (x == std::string::npos) throw std::invalid_argument("synth spec must be <N>x<n>[@seed]");
      const auto rows = parse_number<std::size_t>(shape.substr(0, x), "row count");
      const auto cols = parse_number<std::size_t>(shape.substr(x + 1), "feature count");
      const std::uint64_t seed = at == std::string::npos ? 0 : parse_number<std::uint64_t>(arg.substr(at + 1), "seed");
      data = std::make_shared<SparseDataset>(make_synthetic_logistic(rows, cols, seed));
    }
    if (data->rows() == 0) throw std::invalid_argument("dataset '" + arg + "' has no rows");
    auto obj = std::make_shared<LogisticObjective>(*data);
    inst.x0_ = Vector::Zero(obj->dim());
    inst.stop_ = StopRule::relative_error(opts.eps, logistic_reference_minimum(obj->problem()).value);
    inst.t0_ref_ = bb_reference(*obj, inst.x0_);
    inst.full_ = std::move(obj);
    inst.data_ = std::move(data);
    return inst;
  }
  throw std::invalid_argument("unknown problem kind '" + kind + "' (expected mgh, quad, logistic or synth)");
}

std::shared_ptr<const Objective> ProblemInstance::objective(std::size_t batch) const {
  if (batch == 0) return full_;
  if (!data_) throw std::invalid_argument("problem '" + id_ + "' does not support minibatches");
  return std::make_shared<LogisticObjective>(*data_, std::nullopt, batch);
}

AlgorithmSpec AlgorithmSpec::parse(const std::string& s) {
  AlgorithmSpec a;
  if (s == "nelder-mead") {
    a.id = s;
    a.nelder_mead = true;
    return a;
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("algorithm '" + s + "' must be <direction>:<search> or nelder-mead");
  }
  a.descent.direction = parse_direction(s.substr(0, colon));
  a.descent.search = parse_search(s.substr(colon + 1));
  a.id = std::string(to_string(a.descent.direction)) + ":" + to_string(a.descent.search);
  return a;
}

T0Spec T0Spec::parse(const std::string& s) {
  T0Spec t;
  t.text = trim(s);
  std::string num = t.text;
  if (num.size() > 2 && num.compare(num.size() - 2, 2, "bb") == 0) {
    t.relative = true;
    num.resize(num.size() - 2);
  }
  t.value = parse_number<double>(num, "T0");
  if (!(t.value > 0.0) || !std::isfinite(t.value)) throw std::invalid_argument("T0 must be positive: '" + s + "'");
  return t;
}

TrialResult run_trial(const ProblemInstance& problem, const AlgorithmSpec& algo, double t0, std::size_t batch,
                      std::uint64_t seed, std::uint64_t stream_index, StopRule budget) {
  const auto obj = problem.objective(batch);
  StopRule rule = problem.stop();
  rule.max_fevals = budget.max_fevals;
  rule.max_iters = budget.max_iters;
  RngStream rng = RngStream::for_trial(seed, stream_index);

  const auto start = std::chrono::steady_clock::now();
  TrialResult res;
  if (algo.nelder_mead) {
    res.trace = nelder_mead(*obj, rule, problem.x0());
  } else {
    DescentConfig cfg = algo.descent;
    cfg.T0 = t0;
    res.trace = run_descent(*obj, cfg, rule, rng, problem.x0());
  }
  const auto stop = std::chrono::steady_clock::now();

  TrialRecord& r = res.record;
  r.problem = problem.id();
  r.algorithm = algo.id;
  r.seed = seed;
  r.t0 = algo.nelder_mead ? 0.0 : t0;
  r.batch = batch;
  r.fevals = res.trace.ledger.fevals;
  r.gevals = res.trace.ledger.gevals;
  r.iters = static_cast<long>(res.trace.iterations.size());
  r.final_f = res.trace.f;
  r.converged = res.trace.converged;
  r.reason = res.trace.reason;
  r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Suite configuration

SuiteConfig SuiteConfig::parse(std::istream& in) {
  SuiteConfig cfg;
  bool seeds_set = false;
  bool t0_set = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "problem" || key == "problems") {
        for (auto& v : split(value, ',')) cfg.problems.push_back(v);
      } else if (key == "algorithm" || key == "algorithms") {
        for (auto& v : split(value, ',')) cfg.algorithms.push_back(v);
      } else if (key == "t0") {
        if (!t0_set) cfg.t0.clear();
        t0_set = true;
        for (auto& v : split(value, ',')) cfg.t0.push_back(v);
      } else if (key == "seeds") {
        if (!seeds_set) cfg.seeds.clear();
        seeds_set = true;
        for (auto& v : split(value, ',')) {
          if (const auto dots = v.find(".."); dots != std::string::npos) {
            const auto a = parse_number<std::uint64_t>(trim(v.substr(0, dots)), "seed");
            const auto b = parse_number<std::uint64_t>(trim(v.substr(dots + 2)), "seed");
            if (b < a) throw std::invalid_argument("empty seed range");
            for (auto s = a; s <= b; ++s) cfg.seeds.push_back(s);
          } else {
            cfg.seeds.push_back(parse_number<std::uint64_t>(v, "seed"));
          }
        }
      } else if (key == "batch" || key == "batches") {
        for (auto& v : split(value, ',')) cfg.batches.push_back(parse_number<std::size_t>(v, "batch size"));
      } else if (key == "eps") {
        cfg.options.eps = parse_number<double>(value, "eps");
      } else if (key == "tau") {
        cfg.options.tau = parse_number<double>(value, "tau");
      } else if (key == "max_fevals") {
        cfg.max_fevals = parse_number<std::uint64_t>(value, "max_fevals");
      } else if (key == "max_iters") {
        cfg.max_iters = parse_number<long>(value, "max_iters");
      } else if (key == "parallelism" || key == "workers") {
        cfg.parallelism = parse_number<unsigned>(value, "parallelism");
      } else if (key == "records") {
        cfg.records_path = value;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return cfg;
}

SuiteConfig SuiteConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite config '" + path + "'");
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void SuiteConfig::validate() const {
  if (problems.empty()) throw std::invalid_argument("suite: no problems");
  if (algorithms.empty()) throw std::invalid_argument("suite: no algorithms");
  if (t0.empty()) throw std::invalid_argument("suite: no T0 values");
  if (seeds.empty()) throw std::invalid_argument("suite: no seeds");
  if (parallelism == 0) throw std::invalid_argument("suite: parallelism must be >= 1");
  if (!(options.eps > 0.0) || !(options.tau > 0.0)) throw std::invalid_argument("suite: eps and tau must be positive");
}

namespace {

struct TrialSpec {
  std::size_t problem;
  std::size_t algorithm;
  double t0;
  std::size_t batch;
  std::uint64_t seed;
};

}  // namespace

std::vector<TrialResult> run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  std::vector<ProblemInstance> problems;
  for (const auto& p : cfg.problems) problems.push_back(ProblemInstance::load(p, cfg.options));
  std::vector<AlgorithmSpec> algos;
  for (const auto& a : cfg.algorithms) algos.push_back(AlgorithmSpec::parse(a));
  std::vector<T0Spec> t0s;
  for (const auto& t : cfg.t0) t0s.push_back(T0Spec::parse(t));
  for (std::size_t b : cfg.batches) {
    for (const auto& p : problems) {
      if (b != 0 && p.supports_batches()) p.objective(b);  // rejects batch > N up front
    }
  }
  for (const auto& a : algos) {
    if (a.nelder_mead || a.descent.direction != DirectionKind::gradient) continue;
    for (std::size_t pi = 0; pi < problems.size(); ++pi) {
      if (!problems[pi].objective()->has_gradient()) {
        throw std::invalid_argument("algorithm '" + a.id + "' needs a gradient but problem '" + cfg.problems[pi] +
                                    "' has none");
      }
    }
  }

  std::vector<TrialSpec> grid;
  for (std::size_t pi = 0; pi < problems.size(); ++pi) {
    std::vector<std::size_t> batches = {0};
    if (problems[pi].supports_batches() && !cfg.batches.empty()) batches = cfg.batches;
    for (std::size_t ai = 0; ai < algos.size(); ++ai) {
      const std::size_t n_t0 = algos[ai].nelder_mead ? 1 : t0s.size();
      for (std::size_t ti = 0; ti < n_t0; ++ti) {
        const double t0 = t0s[ti].resolve(problems[pi].t0_reference());
        for (std::size_t b : batches) {
          if (algos[ai].nelder_mead && b != 0) continue;
          for (std::uint64_t s : cfg.seeds) grid.push_back({pi, ai, t0, b, s});
        }
      }
    }
  }

  StopRule budget;
  budget.max_fevals = cfg.max_fevals;
  budget.max_iters = cfg.max_iters;

  std::vector<TrialResult> results(grid.size());
  std::ofstream records;
  if (!cfg.records_path.empty()) {
    if (const fs::path parent = fs::path(cfg.records_path).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    records.open(cfg.records_path, std::ios::trunc);
    if (!records) throw std::runtime_error("cannot write records file '" + cfg.records_path + "'");
    write_records_csv(records, {});
    records.flush();
  }

  std::atomic<std::size_t> next{0};
  std::mutex collector;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      const TrialSpec& t = grid[i];
      try {
        results[i] = run_trial(problems[t.problem], algos[t.algorithm], t.t0, t.batch, t.seed, t.problem, budget);
        if (records.is_open()) {
          std::lock_guard lock(collector);
          records << record_csv_line(results[i].record) << '\n';
          records.flush();
        }
      } catch (...) {
        std::lock_guard lock(collector);
        if (!failure) failure = std::current_exception();
        next = grid.size();
        return;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.parallelism, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  if (records.is_open()) {
    // Rewrite in grid order so the file does not depend on scheduling.
    records.close();
    std::vector<TrialRecord> ordered;
    ordered.reserve(results.size());
    for (const auto& r : results) ordered.push_back(r.record);
    write_records_csv(cfg.records_path, ordered);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Records CSV

const char* const kRecordColumns[12] = {"problem", "algorithm", "seed",      "t0",     "batch",  "fevals",
                                        "gevals",  "iters",     "final_f",   "converged", "reason", "wall_ms"};

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError(lineno, "unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::string record_csv_line(const TrialRecord& r) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
  std::ostringstream os;
  os << csv_field(r.problem) << ',' << csv_field(r.algorithm) << ',' << r.seed << ',' << fmt_double(r.t0) << ','
     << r.batch << ',' << r.fevals << ',' << r.gevals << ',' << r.iters << ',' << fmt_double(r.final_f) << ','
     << (r.converged ? "true" : "false") << ',' << csv_field(r.reason) << ',' << wall;
  return os.str();
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  for (int i = 0; i < 12; ++i) out << (i ? "," : "") << kRecordColumns[i];
  out << '\n';
  for (const auto& r : records) out << record_csv_line(r) << '\n';
}

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_records_csv(out, records);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto header = split_csv_line(line, 1);
  if (header.size() != 12) throw ParseError(1, "expected 12 columns");
  for (int i = 0; i < 12; ++i) {
    if (header[static_cast<std::size_t>(i)] != kRecordColumns[i]) {
      throw ParseError(1, std::string("column ") + std::to_string(i + 1) + " should be " + kRecordColumns[i]);
    }
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line, lineno);
    if (f.size() != 12) throw ParseError(lineno, "expected 12 fields");
    try {
      TrialRecord r;
      r.problem = f[0];
      r.algorithm = f[1];
      r.seed = parse_number<std::uint64_t>(f[2], "seed");
      r.t0 = parse_number<double>(f[3], "t0");
      r.batch = parse_number<std::size_t>(f[4], "batch");
      r.fevals = parse_number<std::uint64_t>(f[5], "fevals");
      r.gevals = parse_number<std::uint64_t>(f[6], "gevals");
      r.iters = parse_number<long>(f[7], "iters");
      r.final_f = f[8] == "inf" ? kInf : parse_number<double>(f[8], "final_f");
      if (f[9] != "true" && f[9] != "false") throw std::invalid_argument("converged must be true or false");
      r.converged = f[9] == "true";
      r.reason = f[10];
      r.wall_ms = parse_number<double>(f[11], "wall_ms");
      out.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file '" + path + "'");
  try {
    return read_records_csv(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Profiles

bool mw_convergence_test(double f_current, double f0, double f_L, double tau) {
  if (f0 < f_L) throw std::invalid_argument("mw_convergence_test: f0 must be >= f_L");
  if (!(tau > 0.0)) throw std::invalid_argument("mw_convergence_test: tau must be positive");
  return f_current <= f_L + tau * (f0 - f_L);
}

CostMetric parse_metric(const std::string& s) {
  if (s == "fevals") return CostMetric::fevals;
  if (s == "wall_ms") return CostMetric::wall_ms;
  throw std::invalid_argument("unknown cost metric '" + s + "' (expected fevals or wall_ms)");
}

double ProfileCurve::rho(double tau) const {
  double r = 0.0;
  for (const auto& [t, v] : breakpoints) {
    if (t <= tau) r = v;
  }
  return r;
}

std::vector<ProfileCurve> performance_profile(const std::vector<TrialRecord>& records, CostMetric metric,
                                              const std::vector<std::string>& t0_labels) {
  if (records.empty()) throw std::invalid_argument("performance_profile: no records");

  // T0 rank within each (problem, algorithm).
  std::map<std::pair<std::string, std::string>, std::set<double>> t0_sets;
  for (const auto& r : records) t0_sets[{r.problem, r.algorithm}].insert(r.t0);
  std::map<std::string, std::size_t> ranks_per_algo;
  for (const auto& [key, set] : t0_sets) {
    auto& n = ranks_per_algo[key.second];
    n = std::max(n, set.size());
  }
  // Label a rank by its T0 when that value is the same on every problem.
  std::map<std::pair<std::string, std::size_t>, std::set<double>> rank_values;
  auto rank_of = [&](const TrialRecord& r) {
    const auto& set = t0_sets[{r.problem, r.algorithm}];
    return static_cast<std::size_t>(std::distance(set.begin(), set.find(r.t0)));
  };
  for (const auto& r : records) rank_values[{r.algorithm, rank_of(r)}].insert(r.t0);

  auto unit_of = [&](const TrialRecord& r) {
    std::string label = r.algorithm;
    if (ranks_per_algo[r.algorithm] > 1) {
      const std::size_t k = rank_of(r);
      const auto& vals = rank_values[{r.algorithm, k}];
      if (k < t0_labels.size()) {
        label += "@" + t0_labels[k];
      } else if (vals.size() == 1) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", *vals.begin());
        label += std::string("@") + buf;
      } else {
        label += "@t0rank" + std::to_string(k + 1);
      }
    }
    if (r.batch != 0) label += "/b" + std::to_string(r.batch);
    return label;
  };

  std::set<std::string> problems;
  std::set<std::string> units;
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> cells;
  for (const auto& r : records) {
    const std::string u = unit_of(r);
    problems.insert(r.problem);
    units.insert(u);
    cells[{r.problem, u}].push_back(&r);
  }

  auto cell_cost = [&](const std::vector<const TrialRecord*>& recs) {
    std::vector<double> costs;
    for (const auto* r : recs) {
      if (r->converged) costs.push_back(metric == CostMetric::fevals ? static_cast<double>(r->fevals) : r->wall_ms);
    }
    const std::size_t failed = recs.size() - costs.size();
    if (costs.empty() || 2 * failed > recs.size()) return kInf;
    std::sort(costs.begin(), costs.end());
    const std::size_t m = costs.size();
    return m % 2 ? costs[m / 2] : 0.5 * (costs[m / 2 - 1] + costs[m / 2]);
  };

  std::map<std::string, std::vector<double>> ratios;
  for (const auto& p : problems) {
    std::map<std::string, double> cost;
    double best = kInf;
    for (const auto& u : units) {
      const auto it = cells.find({p, u});
      const double c = it == cells.end() ? kInf : cell_cost(it->second);
      cost[u] = c;
      best = std::min(best, c);
    }
    for (const auto& u : units) {
      const double c = cost[u];
      double r = kInf;
      if (std::isfinite(c)) r = best > 0.0 ? c / best : (c > 0.0 ? kInf : 1.0);
      ratios[u].push_back(r);
    }
  }

  const double np = static_cast<double>(problems.size());
  std::vector<ProfileCurve> curves;
  for (const auto& u : units) {
    auto rs = ratios[u];
    std::sort(rs.begin(), rs.end());
    ProfileCurve c;
    c.label = u;
    std::size_t i = 0;
    while (i < rs.size() && rs[i] <= 1.0) ++i;
    c.breakpoints.emplace_back(1.0, static_cast<double>(i) / np);
    while (i < rs.size() && std::isfinite(rs[i])) {
      const double tau = rs[i];
      while (i < rs.size() && rs[i] == tau) ++i;
      c.breakpoints.emplace_back(tau, static_cast<double>(i) / np);
    }
    c.solved_fraction = static_cast<double>(i) / np;
    curves.push_back(std::move(c));
  }
  return curves;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

}  // namespace

std::string profile_svg(const ProfileCurve& curve) {
  const double W = 640, H = 400, ml = 60, mr = 20, mt = 40, mb = 50;
  double max_log = 1.0;
  for (const auto& bp : curve.breakpoints) max_log = std::max(max_log, std::log2(bp.first));
  max_log = std::ceil(max_log * 1.05);
  auto X = [&](double tau) { return ml + (W - ml - mr) * std::log2(tau) / max_log; };
  auto Y = [&](double rho) { return H - mb - (H - mt - mb) * rho; };
  char buf[160];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(curve.label) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<path d=\"M%.2f %.2f L%.2f %.2f L%.2f %.2f\" fill=\"none\" stroke=\"black\"/>\n", ml,
                mt, ml, H - mb, W - mr, H - mb);
  os << buf;
  for (int k = 0; k <= static_cast<int>(max_log); ++k) {
    const double x = X(std::ldexp(1.0, k));
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                  x, H - mb + 16, std::ldexp(1.0, k));
    os << buf;
  }
  for (int k = 0; k <= 4; ++k) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%.2f</text>\n",
                  ml - 6, Y(k / 4.0) + 4, k / 4.0);
    os << buf;
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">performance ratio (log2)</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  double prev_rho = 0.0;
  bool first = true;
  for (const auto& [tau, rho] : curve.breakpoints) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f %.2f,%.2f", first ? "" : " ", X(tau), Y(first ? rho : prev_rho), X(tau),
                  Y(rho));
    os << buf;
    prev_rho = rho;
    first = false;
  }
  std::snprintf(buf, sizeof buf, " %.2f,%.2f", W - mr, Y(prev_rho));
  os << buf << "\"/>\n</svg>\n";
  return os.str();
}

std::vector<std::string> emit_outputs(const std::vector<TrialRecord>& records,
                                      const std::vector<ProfileCurve>& curves, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir + "': " + ec.message());
  std::vector<std::string> written;
  const std::string rec_path = (fs::path(out_dir) / "records.csv").string();
  write_records_csv(rec_path, records);
  written.push_back(rec_path);

  std::set<std::string> used;
  for (const auto& c : curves) {
    std::string stem = "profile_" + file_stem(c.label);
    for (int k = 2; used.count(stem); ++k) stem = "profile_" + file_stem(c.label) + "_" + std::to_string(k);
    used.insert(stem);
    const std::string csv = (fs::path(out_dir) / (stem + ".csv")).string();
    const std::string svg = (fs::path(out_dir) / (stem + ".svg")).string();
    {
      std::ofstream out(csv, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + csv + "'");
      out << "tau,rho\n";
      for (const auto& [tau, rho] : c.breakpoints) out << fmt_double(tau) << ',' << fmt_double(rho) << '\n';
      if (!out) throw std::runtime_error("write failed for '" + csv + "'");
    }
    {
      std::ofstream out(svg, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + svg + "'");
      out << profile_svg(c);
      if (!out) throw std::runtime_error("write failed for '" + svg + "'");
    }
    written.push_back(csv);
    written.push_back(svg);
  }
  return written;
}

}  // namespace aels
