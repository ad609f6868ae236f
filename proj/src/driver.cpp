#include "aels/driver.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aels {

StopRule StopRule::relative_error(double eps, double f_star) {
  StopRule r;
  r.kind = StopKind::relative_error;
  r.epsilon = eps;
  r.f_star = f_star;
  return r;
}

StopRule StopRule::mw_test(double tau, double f_L) {
  StopRule r;
  r.kind = StopKind::mw_test;
  r.tau = tau;
  r.f_star = f_L;
  return r;
}

StopRule StopRule::grad_norm(double eps) {
  StopRule r;
  r.kind = StopKind::grad_norm;
  r.epsilon = eps;
  return r;
}

StopRule StopRule::budget(std::uint64_t max_fevals) {
  StopRule r;
  r.max_fevals = max_fevals;
  return r;
}

void StopRule::validate() const {
  switch (kind) {
    case StopKind::relative_error:
      if (!f_star) throw std::invalid_argument("StopRule: relative_error needs f_star");
      if (!(epsilon > 0.0)) throw std::invalid_argument("StopRule: epsilon must be positive");
      break;
    case StopKind::mw_test:
      if (!f_star) throw std::invalid_argument("StopRule: mw_test needs f_L");
      if (!(tau > 0.0)) throw std::invalid_argument("StopRule: tau must be positive");
      break;
    case StopKind::grad_norm:
      if (!(epsilon > 0.0)) throw std::invalid_argument("StopRule: epsilon must be positive");
      break;
    case StopKind::budget_only:
      break;
  }
  if (max_iters < 0) throw std::invalid_argument("StopRule: max_iters must be non-negative");
}

StopDecision check_stop(const StopRule& rule, double current_f, const EvaluationLedger& ledger, long iter,
                        std::optional<double> grad_norm) {
  if (ledger.fevals >= rule.max_fevals || iter >= rule.max_iters) return {true, "budget"};
  bool hit = false;
  switch (rule.kind) {
    case StopKind::relative_error: {
      if (!rule.f0) throw std::invalid_argument("check_stop: f0 unset");
      const double fs = *rule.f_star;
      hit = current_f - fs <= rule.epsilon * (*rule.f0 - fs);
      break;
    }
    case StopKind::mw_test: {
      if (!rule.f0) throw std::invalid_argument("check_stop: f0 unset");
      const double fl = *rule.f_star;
      hit = current_f <= fl + rule.tau * (*rule.f0 - fl);
      break;
    }
    case StopKind::grad_norm:
      if (!grad_norm) throw std::invalid_argument("check_stop: grad_norm rule needs a gradient norm");
      hit = *grad_norm <= rule.epsilon;
      break;
    case StopKind::budget_only:
      break;
  }
  if (hit) return {true, "converged"};
  return {};
}

const char* to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::gradient: return "gd";
    case DirectionKind::fd_gradient: return "fd";
    case DirectionKind::random: return "random";
    case DirectionKind::bfgs: return "bfgs";
  }
  return "?";
}

const char* to_string(SearchKind k) {
  switch (k) {
    case SearchKind::aels: return "aels";
    case SearchKind::adaptive: return "adaptive";
    case SearchKind::traditional: return "traditional";
    case SearchKind::wolfe: return "wolfe";
    case SearchKind::constant: return "constant";
    case SearchKind::inverse: return "inverse";
  }
  return "?";
}

DirectionKind parse_direction(const std::string& s) {
  for (auto k : {DirectionKind::gradient, DirectionKind::fd_gradient, DirectionKind::random, DirectionKind::bfgs}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown direction strategy '" + s + "' (expected gd, fd, random or bfgs)");
}

SearchKind parse_search(const std::string& s) {
  for (auto k : {SearchKind::aels, SearchKind::adaptive, SearchKind::traditional, SearchKind::wolfe,
                 SearchKind::constant, SearchKind::inverse}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown line search '" + s +
                              "' (expected aels, adaptive, traditional, wolfe, constant or inverse)");
}

namespace {

struct Direction {
  Vector d;
  Vector g;  // empty for the random strategy
  double slope = 0.0;
};

}  // namespace

DescentTrace run_descent(const Objective& obj, const DescentConfig& cfg, const StopRule& stop, RngStream& rng,
                         std::optional<Vector> x0) {
  cfg.ls.validate();
  cfg.fd.validate();
  stop.validate();
  if (!(cfg.T0 > 0.0) || !std::isfinite(cfg.T0)) throw std::invalid_argument("run_descent: T0 must be positive");
  const Eigen::Index n = obj.dim();
  if (n < 1) throw std::invalid_argument("run_descent: zero-dimensional problem");
  if (cfg.direction == DirectionKind::gradient && !obj.has_gradient()) {
    throw std::invalid_argument("run_descent: gradient strategy needs an objective with a gradient");
  }
  if (stop.kind == StopKind::grad_norm && !obj.has_gradient()) {
    throw std::invalid_argument("run_descent: grad_norm stop needs an objective with a gradient");
  }

  DescentTrace tr;
  EvaluationLedger& ledger = tr.ledger;
  Vector x = x0 ? std::move(*x0) : obj.initial_point();
  obj.check_dim(x);

  double fx = sanitize(ObjectiveHandle(obj, ledger).value(x));
  double f_diag = fx;
  tr.f0 = fx;
  StopRule rule = stop;
  if (!rule.f0) rule.f0 = fx;

  const double beta = cfg.ls.beta;
  const bool fd_derivative = cfg.direction == DirectionKind::fd_gradient ||
                             cfg.direction == DirectionKind::random || !obj.has_gradient();
  auto diag_grad = [&]() -> std::optional<double> {
    if (rule.kind != StopKind::grad_norm) return std::nullopt;
    return obj.gradient(x).norm();
  };

  double t_prev = cfg.T0;
  BfgsState bfgs(n);
  std::optional<Vector> x_prev, g_prev;
  bool retrying = false;
  double retry_T = cfg.T0;
  Direction kept;
  long iter = 0;

  for (;;) {
    const StopDecision dec = check_stop(rule, f_diag, ledger, iter, diag_grad());
    if (dec.stop) {
      tr.reason = dec.reason;
      tr.converged = dec.reason == "converged";
      break;
    }
    const EvaluationLedger before = ledger;
    std::unique_ptr<Objective> batch = obj.sample_step(rng);
    const Objective& step_obj = batch ? *batch : obj;
    const ObjectiveHandle h(step_obj, ledger);
    const double fbase = batch ? sanitize(h.value(x)) : fx;

    Direction dir;
    if (retrying) {
      dir = kept;
    } else {
      auto gradient_at = [&]() {
        return (obj.has_gradient() && cfg.direction != DirectionKind::fd_gradient) ? h.gradient(x)
                                                                                  : fd_gradient(h, x, fbase, cfg.fd).g;
      };
      switch (cfg.direction) {
        case DirectionKind::gradient:
        case DirectionKind::fd_gradient:
          dir.g = gradient_at();
          dir.d = -dir.g;
          dir.slope = -dir.g.squaredNorm();
          break;
        case DirectionKind::random: {
          RandomDirection rd = random_direction(h, x, fbase, rng, cfg.fd);
          dir.d = std::move(rd.d);
          dir.slope = -rd.mu * rd.mu;
          break;
        }
        case DirectionKind::bfgs: {
          dir.g = gradient_at();
          if (x_prev && dir.g.allFinite()) bfgs_update(bfgs, x - *x_prev, dir.g - *g_prev);
          x_prev = x;
          g_prev = dir.g;
          BfgsDirection bd = dir.g.allFinite() ? bfgs_direction(bfgs, dir.g) : BfgsDirection{-dir.g, true};
          dir.d = std::move(bd.d);
          dir.slope = dir.d.dot(dir.g);
          break;
        }
      }
    }

    const bool warm = !retrying;
    double T = 0.0;
    switch (cfg.search) {
      case SearchKind::aels:
      case SearchKind::adaptive:
        T = warm ? t_prev / beta : retry_T;
        break;
      case SearchKind::traditional:
        T = cfg.T0;
        break;
      case SearchKind::wolfe:
        T = cfg.direction == DirectionKind::bfgs ? 1.0 : (warm ? t_prev / beta : cfg.T0);
        break;
      case SearchKind::constant:
        T = schedule_step(Schedule::constant, cfg.T0, iter + 1);
        break;
      case SearchKind::inverse:
        T = schedule_step(Schedule::inverse, cfg.T0, iter + 1);
        break;
    }

    IterationRecord rec{iter, T, 0.0, to_string(cfg.direction), {}, 0, f_diag, false};
    const bool usable = dir.d.allFinite() && !dir.d.isZero(0.0);
    bool abandoned = false;
    double smallest_probe = T;

    if (cfg.search == SearchKind::constant || cfg.search == SearchKind::inverse) {
      rec.step = T;
      if (usable) x = line_point(x, dir.d, T);
      if (!batch) fx = sanitize(h.value(x));
    } else if (!usable || (cfg.search != SearchKind::aels && !(dir.slope < 0.0))) {
      abandoned = true;
    } else {
      LineProbe probe =
          LineProbe::along(h, x, dir.d, fbase, fd_derivative ? std::optional<double>(cfg.fd.sigma) : std::nullopt);
      LineSearchOutcome out;
      switch (cfg.search) {
        case SearchKind::aels: out = aels(probe, T, cfg.ls); break;
        case SearchKind::wolfe: out = wolfe_search(probe, dir.slope, T, cfg.ls); break;
        default: out = armijo_backtrack(probe, dir.slope, T, cfg.ls); break;
      }
      rec.probes = out.probes;
      abandoned = out.abandoned;
      for (const auto& tv : out.trial_trace) smallest_probe = std::min(smallest_probe, tv.first);
      if (!abandoned) {
        rec.step = out.step;
        x = line_point(x, dir.d, out.step);
        if (!batch) fx = out.value;
        t_prev = out.step;
      }
    }

    bool stalled = false;
    if (abandoned) {
      if (batch || cfg.direction == DirectionKind::random) {
        retrying = false;
      } else if (retrying) {
        stalled = true;
      } else {
        retrying = true;
        kept = dir;
        retry_T = cfg.T0;
        if (cfg.direction == DirectionKind::bfgs) {
          // Carry on below the steps already tried rather than repeat them.
          retry_T = beta * smallest_probe;
          bfgs.reset();
          kept.d = -dir.g;
          kept.slope = -dir.g.squaredNorm();
        }
      }
    } else {
      retrying = false;
    }

    f_diag = batch ? sanitize(obj.value(x)) : fx;
    rec.f = f_diag;
    rec.abandoned = abandoned;
    rec.delta = ledger - before;
    tr.iterations.push_back(rec);
    ++iter;
    if (stalled) {
      tr.reason = "stalled";
      break;
    }
  }
  tr.x = std::move(x);
  tr.f = f_diag;
  return tr;
}

DescentTrace nelder_mead(const Objective& obj, const StopRule& stop, std::optional<Vector> x0) {
  const Eigen::Index n = obj.dim();
  if (n < 1) throw std::invalid_argument("nelder_mead: zero-dimensional problem");
  Vector start = x0 ? std::move(*x0) : obj.initial_point();
  obj.check_dim(start);
  std::vector<Vector> sim(static_cast<std::size_t>(n) + 1, start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector& v = sim[static_cast<std::size_t>(i) + 1];
    v[i] = v[i] != 0.0 ? 1.05 * v[i] : 0.00025;
  }
  return nelder_mead(obj, stop, std::move(sim));
}

DescentTrace nelder_mead(const Objective& obj, const StopRule& stop, std::vector<Vector> sim) {
  stop.validate();
  const Eigen::Index n = obj.dim();
  if (n < 1) throw std::invalid_argument("nelder_mead: zero-dimensional problem");
  if (sim.size() != static_cast<std::size_t>(n) + 1) throw std::invalid_argument("nelder_mead: need n + 1 vertices");
  for (const Vector& v : sim) obj.check_dim(v);
  DescentTrace tr;
  const ObjectiveHandle h(obj, tr.ledger);
  std::vector<double> fs(sim.size());
  for (std::size_t i = 0; i < sim.size(); ++i) fs[i] = sanitize(h.value(sim[i]));
  tr.f0 = fs[0];
  StopRule rule = stop;
  if (!rule.f0) rule.f0 = fs[0];

  std::vector<std::size_t> order(sim.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<Vector> s2;
    std::vector<double> f2;
    for (std::size_t i : order) {
      s2.push_back(std::move(sim[i]));
      f2.push_back(fs[i]);
    }
    sim = std::move(s2);
    fs = std::move(f2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < sim.size(); ++i) d = std::max(d, (sim[i] - sim[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  sort_simplex();
  long iter = 0;
  const std::size_t w = sim.size() - 1;
  for (;;) {
    const StopDecision dec = check_stop(rule, fs[0], tr.ledger, iter);
    if (dec.stop) {
      tr.reason = dec.reason;
      tr.converged = dec.reason == "converged";
      break;
    }
    if (diameter() < 1e-12) {
      tr.reason = "simplex";
      break;
    }
    const EvaluationLedger before = tr.ledger;
    Vector c = Vector::Zero(n);
    for (std::size_t i = 0; i < w; ++i) c += sim[i];
    c /= static_cast<double>(n);

    const Vector xr = c + (c - sim[w]);
    const double fr = sanitize(h.value(xr));
    bool shrink = false;
    if (fr < fs[0]) {
      const Vector xe = c + 2.0 * (c - sim[w]);
      const double fe = sanitize(h.value(xe));
      if (fe < fr) {
        sim[w] = xe;
        fs[w] = fe;
      } else {
        sim[w] = xr;
        fs[w] = fr;
      }
    } else if (fr < fs[w - 1]) {
      sim[w] = xr;
      fs[w] = fr;
    } else if (fr < fs[w]) {
      const Vector xc = c + 0.5 * (xr - c);
      const double fc = sanitize(h.value(xc));
      if (fc <= fr) {
        sim[w] = xc;
        fs[w] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Vector xcc = c - 0.5 * (c - sim[w]);
      const double fcc = sanitize(h.value(xcc));
      if (fcc < fs[w]) {
        sim[w] = xcc;
        fs[w] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i < sim.size(); ++i) {
        sim[i] = sim[0] + 0.5 * (sim[i] - sim[0]);
        fs[i] = sanitize(h.value(sim[i]));
      }
    }
    sort_simplex();
    tr.iterations.push_back({iter, 0.0, 0.0, "nelder-mead", tr.ledger - before, 0, fs[0], false});
    ++iter;
  }
  tr.x = sim[0];
  tr.f = fs[0];
  return tr;
}

}  // namespace aels
