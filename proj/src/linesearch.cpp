#include "aels/linesearch.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace aels {

void LineSearchConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("line search: beta must lie in (0, 1)");
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
    throw std::invalid_argument("line search: need 0 < c1 < c2 < 1");
  }
  if (patience < 3) throw std::invalid_argument("line search: patience must be >= 3");
  if (max_extend < 1 || max_zoom < 1) throw std::invalid_argument("line search: caps must be positive");
}

LineProbe LineProbe::along(const ObjectiveHandle& obj, Vector x, Vector d, double fx,
                           std::optional<double> fd_sigma) {
  auto line = std::make_shared<std::pair<Vector, Vector>>(std::move(x), std::move(d));
  Fn value = [obj, line](double t) { return obj.value(line_point(line->first, line->second, t)); };
  LineProbe probe(fx, value);
  if (obj.has_gradient() && !fd_sigma) {
    probe.derivative_ = [obj, line](double t) {
      ++obj.ledger().dd_evals;
      return line->second.dot(obj.gradient(line_point(line->first, line->second, t)));
    };
  } else {
    const double sigma = fd_sigma.value_or(1.5e-8);
    probe.fd_derivative_ = [obj, value, sigma](double t, double h_t) {
      ++obj.ledger().dd_evals;
      const double s = sigma * std::max(1.0, std::abs(t));
      return (value(t + s) - h_t) / s;
    };
  }
  return probe;
}

LineProbe LineProbe::from_function(double base_value, std::function<double(double)> h,
                                   std::function<double(double)> dh, EvaluationLedger& ledger) {
  EvaluationLedger* led = &ledger;
  Fn value = [h = std::move(h), led](double t) {
    ++led->fevals;
    return h(t);
  };
  Fn deriv;
  if (dh) {
    deriv = [dh = std::move(dh), led](double t) {
      ++led->gevals;
      ++led->dd_evals;
      return dh(t);
    };
  }
  return LineProbe(base_value, std::move(value), std::move(deriv));
}

double LineProbe::operator()(double t) {
  if (t == 0.0) return base_;
  ++probes_;
  return value_(t);
}

double LineProbe::derivative(double t, double h_at_t) {
  if (!has_derivative()) throw std::logic_error("line probe has no derivative query");
  ++dd_probes_;
  if (fd_derivative_) return fd_derivative_(t, h_at_t);
  return derivative_(t);
}

namespace {

// Evaluates the probe, records the trace, and maps non-finite values to +inf.
struct Recorder {
  LineProbe& probe;
  LineSearchOutcome& out;

  double operator()(double t) {
    const double h = sanitize(probe(t));
    out.trial_trace.emplace_back(t, h);
    return h;
  }

  void finish() {
    out.probes = probe.probes();
    out.dd_probes = probe.dd_probes();
  }

  void accept(double t, double h) {
    out.step = t;
    out.value = h;
    out.abandoned = false;
  }

  void abandon() {
    out.step = 0.0;
    out.value = probe.base_value();
    out.abandoned = true;
  }

  // Best strictly-improving probe seen so far, if any.
  bool accept_best() {
    const double f0 = probe.base_value();
    const std::pair<double, double>* best = nullptr;
    for (const auto& tv : out.trial_trace) {
      if (tv.second < f0 && (!best || tv.second < best->second)) best = &tv;
    }
    if (!best) return false;
    accept(best->first, best->second);
    return true;
  }
};

void check_step(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("line search: initial step must be positive");
}

}  // namespace

LineSearchOutcome aels(LineProbe& probe, double T, const LineSearchConfig& cfg) {
  cfg.validate();
  check_step(T);
  LineSearchOutcome out;
  Recorder eval{probe, out};
  const double beta = cfg.beta;
  const double f0 = sanitize(probe.base_value());

  double t = T;
  double f_old = f0;
  double f_new = eval(t);
  double alpha = f_new <= f_old ? 1.0 / beta : beta;
  const bool forward = alpha > 1.0;

  // Both values infinite means we are still inside an overflow region while
  // backtracking; keep shrinking.
  auto rising = [](double fn, double fo) { return fn >= fo && !(std::isinf(fn) && std::isinf(fo)); };

  bool cut = false;
  int loop = 0;
  do {
    const double next = alpha * t;
    if (loop >= cfg.patience || next < cfg.min_step) {
      cut = true;
      break;
    }
    t = next;
    f_old = f_new;
    f_new = eval(t);
    ++loop;
  } while (!rising(f_new, f_old));

  if (!cut && forward && loop == 1) {
    // Forward-tracking rose immediately: restart from T and backtrack.
    t = T;
    alpha = beta;
    std::swap(f_new, f_old);
    int back = 0;
    do {
      const double next = alpha * t;
      if (back >= cfg.patience || next < cfg.min_step) {
        cut = true;
        break;
      }
      t = next;
      f_old = f_new;
      f_new = eval(t);
      ++back;
    } while (!(f_new > f_old));
  }

  if (cut) {
    if (!eval.accept_best()) eval.abandon();
    eval.finish();
    return out;
  }

  const auto& trace = out.trial_trace;
  if (alpha < 1.0) {
    eval.accept(t, f_new);
  } else {
    // beta^2 t is the probe two forward moves back; reuse it exactly.
    const auto& back2 = trace[trace.size() - 3];
    eval.accept(back2.first, back2.second);
  }
  // Only reachable when h is not unimodal. Keep backtracking from the
  // smallest probe until something beats h(0), then take the best probe.
  if (!(out.value < f0)) {
    double smallest = T;
    for (const auto& tv : trace) smallest = std::min(smallest, tv.first);
    t = smallest;
    for (int k = 0; k < cfg.patience && !eval.accept_best(); ++k) {
      t *= beta;
      if (t < cfg.min_step) break;
      eval(t);
    }
    if (!(out.value < f0)) eval.abandon();
  }
  eval.finish();
  return out;
}

LineSearchOutcome armijo_backtrack(LineProbe& probe, double slope, double T, const LineSearchConfig& cfg) {
  cfg.validate();
  check_step(T);
  if (!(slope < 0.0)) throw std::invalid_argument("armijo_backtrack: slope must be negative (descent direction)");
  LineSearchOutcome out;
  Recorder eval{probe, out};
  const double f0 = probe.base_value();
  double t = T;
  for (int k = 0; k < cfg.patience && t >= cfg.min_step; ++k) {
    const double h = eval(t);
    if (h <= f0 + cfg.c1 * t * slope) {
      eval.accept(t, h);
      eval.finish();
      return out;
    }
    t *= cfg.beta;
  }
  eval.abandon();
  eval.finish();
  return out;
}

namespace {

LineSearchOutcome zoom_impl(LineProbe& probe, Recorder& eval, LineSearchOutcome& out, double slope0,
                            double lo, double h_lo, double hi, const LineSearchConfig& cfg) {
  const double f0 = probe.base_value();
  const double curvature = -cfg.c2 * slope0;
  for (int j = 0; j < cfg.max_zoom; ++j) {
    const double a = 0.5 * (lo + hi);
    const double h = eval(a);
    if (h > f0 + cfg.c1 * a * slope0 || h >= h_lo) {
      hi = a;
      continue;
    }
    const double d = probe.derivative(a, h);
    if (!std::isfinite(d)) {
      hi = a;
      continue;
    }
    if (std::abs(d) <= curvature) {
      eval.accept(a, h);
      eval.finish();
      return out;
    }
    if (d * (hi - lo) >= 0.0) hi = lo;
    lo = a;
    h_lo = h;
  }
  if (lo > 0.0) {
    out.step = lo;
    out.value = h_lo;
    out.abandoned = true;
  } else {
    eval.abandon();
  }
  eval.finish();
  return out;
}

}  // namespace

LineSearchOutcome wolfe_search(LineProbe& probe, double slope0, double T, const LineSearchConfig& cfg) {
  cfg.validate();
  check_step(T);
  if (!(slope0 < 0.0)) throw std::invalid_argument("wolfe_search: slope0 must be negative (descent direction)");
  if (!probe.has_derivative()) throw std::invalid_argument("wolfe_search: probe needs a derivative query");
  LineSearchOutcome out;
  Recorder eval{probe, out};
  const double f0 = probe.base_value();
  const double curvature = -cfg.c2 * slope0;

  double a_prev = 0.0;
  double h_prev = f0;
  double a = T;
  for (int i = 1; i <= cfg.max_extend; ++i) {
    const double h = eval(a);
    if (h > f0 + cfg.c1 * a * slope0 || (i > 1 && h >= h_prev)) {
      return zoom_impl(probe, eval, out, slope0, a_prev, h_prev, a, cfg);
    }
    const double d = probe.derivative(a, h);
    if (!std::isfinite(d)) return zoom_impl(probe, eval, out, slope0, a_prev, h_prev, a, cfg);
    if (std::abs(d) <= curvature) {
      eval.accept(a, h);
      eval.finish();
      return out;
    }
    if (d >= 0.0) return zoom_impl(probe, eval, out, slope0, a, h, a_prev, cfg);
    a_prev = a;
    h_prev = h;
    a = a / cfg.beta;
  }
  out.step = a_prev;
  out.value = h_prev;
  out.abandoned = true;
  eval.finish();
  return out;
}

LineSearchOutcome zoom(LineProbe& probe, double slope0, double lo, double hi, const LineSearchConfig& cfg) {
  cfg.validate();
  if (lo == hi) throw std::invalid_argument("zoom: interval endpoints must differ");
  if (!(slope0 < 0.0)) throw std::invalid_argument("zoom: slope0 must be negative");
  if (!probe.has_derivative()) throw std::invalid_argument("zoom: probe needs a derivative query");
  LineSearchOutcome out;
  Recorder eval{probe, out};
  const double h_lo = lo == 0.0 ? probe.base_value() : eval(lo);
  return zoom_impl(probe, eval, out, slope0, lo, h_lo, hi, cfg);
}

double schedule_step(Schedule kind, double T0, long i) {
  if (!(T0 > 0.0)) throw std::invalid_argument("schedule_step: T0 must be positive");
  if (i < 1) throw std::invalid_argument("schedule_step: step index starts at 1");
  return kind == Schedule::constant ? T0 : T0 / static_cast<double>(i);
}

}  // namespace aels
