#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aels/bench.hpp"
#include "aels/driver.hpp"
#include "aels/linesearch.hpp"
#include "aels/mgh.hpp"
#include "aels/objectives.hpp"
#include "aels/theory.hpp"

namespace py = pybind11;
using namespace aels;

namespace {

// Wraps a Python callable f(x) -> float (and optionally its gradient).
class PyObjective final : public Objective {
 public:
  PyObjective(py::function f, std::optional<py::function> grad, Vector x0)
      : f_(std::move(f)), grad_(std::move(grad)), x0_(std::move(x0)) {}

  Eigen::Index dim() const override { return x0_.size(); }
  double value(const Vector& x) const override {
    py::gil_scoped_acquire gil;
    return f_(x).cast<double>();
  }
  bool has_gradient() const override { return grad_.has_value(); }
  Vector gradient(const Vector& x) const override {
    if (!grad_) return Objective::gradient(x);
    py::gil_scoped_acquire gil;
    return (*grad_)(x).cast<Vector>();
  }
  Vector initial_point() const override { return x0_; }

 private:
  py::function f_;
  std::optional<py::function> grad_;
  Vector x0_;
};

py::dict ledger_dict(const EvaluationLedger& l) {
  py::dict d;
  d["fevals"] = l.fevals;
  d["gevals"] = l.gevals;
  d["dd_evals"] = l.dd_evals;
  return d;
}

py::dict outcome_dict(const LineSearchOutcome& o) {
  py::dict d;
  d["step"] = o.step;
  d["probes"] = o.probes;
  d["dd_probes"] = o.dd_probes;
  d["abandoned"] = o.abandoned;
  d["value"] = o.value;
  d["trace"] = o.trial_trace;
  return d;
}

py::dict trace_dict(const DescentTrace& t) {
  py::dict d;
  d["x"] = t.x;
  d["f"] = t.f;
  d["f0"] = t.f0;
  d["reason"] = t.reason;
  d["converged"] = t.converged;
  d["ledger"] = ledger_dict(t.ledger);
  py::list steps;
  for (const auto& it : t.iterations) {
    py::dict s;
    s["iter"] = it.iter;
    s["T"] = it.T;
    s["step"] = it.step;
    s["probes"] = it.probes;
    s["f"] = it.f;
    s["abandoned"] = it.abandoned;
    s["fevals"] = it.delta.fevals;
    steps.append(s);
  }
  d["iterations"] = steps;
  return d;
}

// Line searches on a scalar function h with h(0) evaluated up front (uncounted).
LineProbe scalar_probe(const py::function& h, const std::optional<py::function>& dh, EvaluationLedger& ledger) {
  auto value = [h](double t) { return h(t).cast<double>(); };
  std::function<double(double)> deriv;
  if (dh) deriv = [dh](double t) { return (*dh)(t).cast<double>(); };
  return LineProbe::from_function(value(0.0), value, deriv, ledger);
}

LineSearchConfig make_config(double beta, double c1, double c2, int patience) {
  LineSearchConfig c;
  c.beta = beta;
  c.c1 = c1;
  c.c2 = c2;
  c.patience = patience;
  return c;
}

TrialRecord record_from_dict(const py::dict& d) {
  TrialRecord r;
  r.problem = d["problem"].cast<std::string>();
  r.algorithm = d["algorithm"].cast<std::string>();
  r.seed = d.contains("seed") ? d["seed"].cast<std::uint64_t>() : 0;
  r.t0 = d.contains("t0") ? d["t0"].cast<double>() : 0.0;
  r.batch = d.contains("batch") ? d["batch"].cast<std::size_t>() : 0;
  r.fevals = d["fevals"].cast<std::uint64_t>();
  r.converged = d["converged"].cast<bool>();
  r.wall_ms = d.contains("wall_ms") ? d["wall_ms"].cast<double>() : 0.0;
  return r;
}

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["problem"] = r.problem;
  d["algorithm"] = r.algorithm;
  d["seed"] = r.seed;
  d["t0"] = r.t0;
  d["batch"] = r.batch;
  d["fevals"] = r.fevals;
  d["gevals"] = r.gevals;
  d["iters"] = r.iters;
  d["final_f"] = r.final_f;
  d["converged"] = r.converged;
  d["reason"] = r.reason;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_aels, m) {
  m.doc() = "Approximately exact line search";
  m.attr("INVERSE_GOLDEN") = kInverseGolden;

  m.def(
      "aels",
      [](py::function h, double T, double beta, int patience) {
        EvaluationLedger led;
        LineProbe p = scalar_probe(h, std::nullopt, led);
        return outcome_dict(aels::aels(p, T, make_config(beta, 1e-4, 0.9, patience)));
      },
      py::arg("h"), py::arg("T"), py::arg("beta") = kInverseGolden, py::arg("patience") = 20,
      "AELS on a scalar function h(t); h(0) is the base value.");
  m.def(
      "armijo_backtrack",
      [](py::function h, double slope, double T, double beta, double c1) {
        EvaluationLedger led;
        LineProbe p = scalar_probe(h, std::nullopt, led);
        return outcome_dict(armijo_backtrack(p, slope, T, make_config(beta, c1, 0.9, 20)));
      },
      py::arg("h"), py::arg("slope"), py::arg("T"), py::arg("beta") = kInverseGolden, py::arg("c1") = 1e-4);
  m.def(
      "wolfe_search",
      [](py::function h, py::function dh, double T, double beta, double c1, double c2) {
        EvaluationLedger led;
        LineProbe p = scalar_probe(h, dh, led);
        const double slope0 = dh(0.0).cast<double>();
        return outcome_dict(wolfe_search(p, slope0, T, make_config(beta, c1, c2, 20)));
      },
      py::arg("h"), py::arg("dh"), py::arg("T"), py::arg("beta") = kInverseGolden, py::arg("c1") = 1e-4,
      py::arg("c2") = 0.9);

  m.def(
      "minimize",
      [](py::function f, Vector x0, std::optional<py::function> grad, const std::string& direction,
         const std::string& search, double T0, std::uint64_t max_fevals, long max_iters, std::uint64_t seed) {
        PyObjective obj(std::move(f), std::move(grad), x0);
        DescentConfig cfg;
        if (direction == "nelder-mead") {
          py::gil_scoped_release release;
          DescentTrace t = nelder_mead(obj, StopRule::budget(max_fevals).with_iters(max_iters));
          py::gil_scoped_acquire gil;
          return trace_dict(t);
        }
        cfg.direction = parse_direction(direction);
        cfg.search = parse_search(search);
        cfg.T0 = T0;
        RngStream rng(seed);
        DescentTrace t;
        {
          py::gil_scoped_release release;
          t = run_descent(obj, cfg, StopRule::budget(max_fevals).with_iters(max_iters), rng);
        }
        return trace_dict(t);
      },
      py::arg("f"), py::arg("x0"), py::arg("grad") = std::nullopt, py::arg("direction") = "gd",
      py::arg("search") = "aels", py::arg("T0") = 1.0, py::arg("max_fevals") = 10000,
      py::arg("max_iters") = std::numeric_limits<long>::max(), py::arg("seed") = 0,
      "Descent on a Python objective; direction is gd, fd, random, bfgs or nelder-mead.");

  m.def("mgh_problems", [] {
    py::list out;
    for (const auto& p : mgh_catalogue()) {
      py::dict d;
      d["id"] = p.id;
      d["name"] = p.name;
      d["n"] = p.n;
      d["m"] = p.m;
      d["start"] = p.start;
      d["f_ref"] = p.f_ref;
      out.append(d);
    }
    return out;
  });
  m.def("mgh_value", [](const std::string& id, const Vector& x) { return mgh_eval(mgh_problem(id), x); });

  m.def(
      "exact_quadratic_step",
      [](const Matrix& A, const Vector& b, const Vector& x, const Vector& d) {
        return exact_quadratic_step(A, b, x, d);
      },
      py::arg("A"), py::arg("b"), py::arg("x"), py::arg("d"));

  m.def(
      "run_trial",
      [](const std::string& problem, const std::string& algorithm, double t0, std::size_t batch,
         std::uint64_t seed, std::uint64_t max_fevals, double eps, double tau) {
        ProblemOptions opts;
        opts.eps = eps;
        opts.tau = tau;
        const ProblemInstance inst = ProblemInstance::load(problem, opts);
        const AlgorithmSpec algo = AlgorithmSpec::parse(algorithm);
        TrialResult r;
        {
          py::gil_scoped_release release;
          r = run_trial(inst, algo, t0, batch, seed, 0, StopRule::budget(max_fevals));
        }
        py::dict d = record_dict(r.record);
        d["trace"] = trace_dict(r.trace);
        return d;
      },
      py::arg("problem"), py::arg("algorithm"), py::arg("t0") = 1.0, py::arg("batch") = 0, py::arg("seed") = 0,
      py::arg("max_fevals") = 100000, py::arg("eps") = 1e-4, py::arg("tau") = 1e-5,
      "One benchmark trial; problem and algorithm use the CLI spec syntax.");

  m.def(
      "performance_profile",
      [](const std::vector<py::dict>& records) {
        std::vector<TrialRecord> recs;
        for (const auto& d : records) recs.push_back(record_from_dict(d));
        py::dict out;
        for (const auto& c : performance_profile(recs, CostMetric::fevals)) out[py::str(c.label)] = c.breakpoints;
        return out;
      },
      "Fevals profile per algorithm from dicts with problem, algorithm, fevals and converged.");
  m.def("read_records", [](const std::string& path) {
    py::list out;
    for (const auto& r : read_records_csv(path)) out.append(record_dict(r));
    return out;
  });

  m.def(
      "check_theory",
      [](std::uint64_t seed, long instances) {
        std::vector<TheoryCheck> checks;
        {
          py::gil_scoped_release release;
          checks = theory_checks(seed, instances);
        }
        py::dict out;
        for (const auto& c : checks) out[py::str(c.name)] = py::make_tuple(c.trials, c.violations);
        return out;
      },
      py::arg("seed") = 1, py::arg("instances") = 50);
}
