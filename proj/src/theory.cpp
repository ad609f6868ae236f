#include "aels/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aels/directions.hpp"
#include "aels/driver.hpp"

namespace aels {

void TheoryParams::validate() const {
  if (!(m > 0.0 && m <= L)) throw std::invalid_argument("TheoryParams: need 0 < m <= L");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("TheoryParams: need 0 < beta < 1");
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) throw std::invalid_argument("TheoryParams: need 0 < c1 < c2 < 1");
  if (!(gamma_min > 0.0 && gamma_min <= gamma_max)) {
    throw std::invalid_argument("TheoryParams: need 0 < gamma_min <= gamma_max");
  }
  if (sigma_tilde < 0.0 || sigma_tilde >= 1.0) throw std::invalid_argument("TheoryParams: sigma_tilde in [0, 1)");
  if (n < 1) throw std::invalid_argument("TheoryParams: n must be >= 1");
  if (!(T0 > 0.0)) throw std::invalid_argument("TheoryParams: T0 must be positive");
}

double TheoryParams::s() const { return std::sqrt(1.0 - m / L); }

namespace {

double log_inv_beta(double x, double beta) { return std::log(x) / std::log(1.0 / beta); }

}  // namespace

double exact_quadratic_step(const Matrix& A, const Vector& b, const Vector& x, const Vector& d) {
  const double curv = d.dot(A * d);
  if (!(curv > 0.0)) throw std::invalid_argument("exact_quadratic_step: need d'Ad > 0");
  return -d.dot(A * x + b) / curv;
}

double exact_quadratic_step(const QuadraticProblem& p, const Vector& x, const Vector& d) {
  return exact_quadratic_step(p.curvature(), p.linear(), x, d);
}

double oracle_line_minimizer(const std::function<double(double)>& h, double a, double b, double tol) {
  if (!(b > a)) throw std::invalid_argument("oracle_line_minimizer: need a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("oracle_line_minimizer: tol must be positive");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = h(x1);
  double f2 = h(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = h(x2);
    }
    // Interior points stop moving once the bracket hits double resolution.
    if (!(x1 > a && x2 < b)) break;
  }
  return 0.5 * (a + b);
}

double armijo_equality_step(const std::function<double(double)>& h, double slope, double c1, double tol) {
  if (!(slope < 0.0)) throw std::invalid_argument("armijo_equality_step: slope must be negative");
  const double h0 = h(0.0);
  auto g = [&](double t) { return h(t) - h0 - c1 * t * slope; };
  double lo = 0.0;
  double hi = 1.0;
  if (g(hi) < 0.0) {
    lo = hi;
    for (int i = 0; i < 2100 && g(hi) < 0.0; ++i) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    double t = hi;
    for (int i = 0; i < 2100; ++i) {
      t *= 0.5;
      if (g(t) < 0.0) {
        lo = t;
        break;
      }
      hi = t;
    }
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

StepIntervals step_size_intervals(const TheoryParams& p, double gamma) {
  p.validate();
  const double s = p.s();
  return {
      {gamma / p.L, gamma / p.m},
      {gamma / p.m * (1.0 - s), gamma / p.m * (1.0 + s)},
      {gamma * (1.0 - p.c2) / p.L, gamma / p.m},
  };
}

double wolfe_fevals_bound(const TheoryParams& p, double gamma, double T) {
  p.validate();
  return 2.0 + 2.0 * std::log2(p.L / (p.m * p.c2)) +
         std::max(2.0 + 2.0 * log_inv_beta(gamma / (p.m * T), p.beta), std::log2(T * p.L / gamma));
}

ComplexityBounds complexity_bounds(const TheoryParams& p) {
  p.validate();
  const double s = p.s();
  const double b = p.beta;
  ComplexityBounds out;
  out.aels_contraction = 1.0 - b * b * (1.0 - s);
  out.aels_fevals_per_step = 4.0 + std::ceil(log_inv_beta(p.gamma_max * (1.0 + s) / (p.gamma_min * (1.0 - s)), b));
  out.aels_first_step_extra = std::ceil(log_inv_beta(
      std::max(b * b * p.gamma_min * (1.0 - s) / (p.m * p.T0), p.m * p.T0 / (b * p.gamma_max * (1.0 + s))), b));
  out.wolfe_fevals_per_search = wolfe_fevals_bound(p, p.gamma_max, p.T0);
  return out;
}

double aels_total_fevals_bound(const TheoryParams& p, long k) {
  const ComplexityBounds cb = complexity_bounds(p);
  return static_cast<double>(k) * cb.aels_fevals_per_step + cb.aels_first_step_extra;
}

double rate_envelope(const TheoryParams& p, RateMode mode, long k, double f0_gap) {
  p.validate();
  if (k < 0) throw std::invalid_argument("rate_envelope: k must be >= 0");
  if (f0_gap < 0.0) throw std::invalid_argument("rate_envelope: f0_gap must be >= 0");
  const double s = p.s();
  const double b2 = p.beta * p.beta;
  const double kk = static_cast<double>(k);
  const double n = static_cast<double>(p.n);
  auto pw = [kk](double r) { return std::pow(r, kk); };
  switch (mode) {
    case RateMode::gradient:
      return f0_gap * pw(1.0 - b2 * (1.0 - s));
    case RateMode::random:
      return f0_gap * pw(1.0 - b2 / n * (1.0 - s));
    case RateMode::fd_gradient: {
      const double st = p.sigma_tilde;
      const double q = (1.0 - st) / ((1.0 + st) * (1.0 + st));
      const double den = (1.0 - st) * (1.0 - st) * b2 * (1.0 - s);
      const double a = f0_gap * pw(1.0 - b2 * (1.0 - s) * q) +
                       st * (1.0 + st) * (1.0 + st) * p.Delta * p.L * p.x0_dist / den;
      const double c = f0_gap * pw(1.0 - 0.5 * b2 * (1.0 - s) * q) +
                       st * st * p.m * (1.0 + st) * (1.0 + st) * p.Delta * p.Delta / den;
      return std::min(a, c);
    }
    default:
      break;
  }
  if (!(p.t_min > 0.0 && p.t_max >= p.t_min)) {
    throw std::invalid_argument("rate_envelope: Armijo modes need 0 < t_min <= t_max");
  }
  const double mt = p.m * p.t_min;
  const double L2 = p.L * p.L;
  switch (mode) {
    case RateMode::armijo_gradient:
      return f0_gap * pw(1.0 - mt);
    case RateMode::armijo_fd_gradient:
      return std::min(f0_gap * pw(1.0 - mt) + L2 * p.sigma * std::sqrt(n) * p.t_max * p.x0_dist / (2.0 * mt),
                      f0_gap * pw(1.0 - 0.5 * mt) + L2 * p.sigma * p.sigma * n * p.t_max / (4.0 * mt));
    case RateMode::armijo_random:
      return std::min(f0_gap * pw(1.0 - mt / n) + L2 * p.sigma * n * p.t_max * p.x0_dist / (2.0 * mt),
                      f0_gap * pw(1.0 - mt / (2.0 * n)) + L2 * p.sigma * p.sigma * n * p.t_max / (4.0 * mt));
    default:
      throw std::invalid_argument("rate_envelope: unknown mode");
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSlack = 1e-9;

struct Instance {
  QuadraticProblem q;
  Vector x;
};

Instance draw_instance(RngStream& rng, bool with_linear, double x_scale = 1.0) {
  const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_below(9));
  const double m = 0.1 + 0.9 * rng.uniform();
  const double L = std::pow(10.0, 2.0 * rng.uniform());
  QuadraticProblem q = random_quadratic(rng, n, m, L, with_linear);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = x_scale * rng.normal();
  return {std::move(q), std::move(x)};
}

TheoryParams params_for(const QuadraticProblem& q, double T0 = 1.0) {
  TheoryParams p;
  p.m = q.m();
  p.L = q.L();
  p.n = static_cast<long>(q.dim());
  p.T0 = T0;
  return p;
}

std::string summary(long trials, long violations) {
  std::ostringstream os;
  os << violations << " violations in " << trials << " checks";
  return os.str();
}

LineProbe quadratic_slice(const QuadraticProblem& q, const Vector& x, const Vector& d, EvaluationLedger& ledger,
                          bool with_derivative) {
  const double f0 = quadratic_eval(q, x, false).value;
  auto h = [&q, x, d](double t) { return quadratic_eval(q, line_point(x, d, t), false).value; };
  std::function<double(double)> dh;
  if (with_derivative) {
    dh = [&q, x, d](double t) { return d.dot(*quadratic_eval(q, line_point(x, d, t), true).gradient); };
  }
  return LineProbe::from_function(f0, h, dh, ledger);
}

TheoryCheck check_bracket(RngStream& rng, long instances) {
  TheoryCheck c{"aels-bracket", 0, 0, {}};
  const double b2 = kInverseGolden * kInverseGolden;
  for (long i = 0; i < instances; ++i) {
    Instance in = draw_instance(rng, true);
    const Vector d = -*quadratic_eval(in.q, in.x, true).gradient;
    if (d.norm() == 0.0) continue;
    const double ts = exact_quadratic_step(in.q, in.x, d);
    const double T = ts * std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    EvaluationLedger led;
    LineProbe probe = quadratic_slice(in.q, in.x, d, led, false);
    const LineSearchOutcome out = aels(probe, T);
    ++c.trials;
    if (out.abandoned || !StepInterval{b2 * ts, ts}.contains(out.step, kSlack)) ++c.violations;
  }
  c.detail = summary(c.trials, c.violations);
  return c;
}

TheoryCheck check_oracle(RngStream& rng, long instances) {
  TheoryCheck c{"aels-vs-oracle", 0, 0, {}};
  const double b2 = kInverseGolden * kInverseGolden;
  for (long i = 0; i < instances; ++i) {
    const double a = std::pow(10.0, -1.0 + 2.0 * rng.uniform());
    const double ctr = 0.5 + 4.5 * rng.uniform();
    const double r = -1.0 + 2.0 * rng.uniform();
    const double w = rng.uniform() * a * ctr;
    auto h = [=](double t) { return a * (t - ctr) * (t - ctr) + w * std::exp(r * t); };
    const double hat = oracle_line_minimizer(h, 0.0, ctr + 1.0 + w / a, 1e-12);
    EvaluationLedger led;
    LineProbe probe = LineProbe::from_function(h(0.0), h, nullptr, led);
    const LineSearchOutcome out = aels(probe, hat * std::pow(10.0, -2.0 + 4.0 * rng.uniform()));
    ++c.trials;
    if (out.abandoned || !StepInterval{b2 * hat, hat}.contains(out.step, kSlack)) ++c.violations;
  }
  c.detail = summary(c.trials, c.violations);
  return c;
}

TheoryCheck check_intervals(RngStream& rng, long instances) {
  TheoryCheck c{"step-intervals", 0, 0, {}};
  for (long i = 0; i < instances; ++i) {
    Instance in = draw_instance(rng, true);
    const Vector g = *quadratic_eval(in.q, in.x, true).gradient;
    const Vector d = -g;
    if (d.norm() == 0.0) continue;
    const double gamma = -d.dot(g) / d.squaredNorm();
    TheoryParams p = params_for(in.q);
    const StepIntervals iv = step_size_intervals(p, gamma);
    EvaluationLedger led;
    LineProbe probe = quadratic_slice(in.q, in.x, d, led, true);
    auto h = [&in, &d](double t) { return quadratic_eval(in.q, line_point(in.x, d, t), false).value; };
    const double ta = armijo_equality_step(h, d.dot(g), p.c1);
    const double ts = exact_quadratic_step(in.q, in.x, d);
    LineSearchConfig cfg;
    cfg.c1 = p.c1;
    cfg.c2 = p.c2;
    const LineSearchOutcome w = wolfe_search(probe, d.dot(g), std::pow(10.0, -2.0 + 4.0 * rng.uniform()), cfg);
    c.trials += 3;
    if (!iv.armijo.contains(ta, kSlack)) ++c.violations;
    if (!iv.exact.contains(ts, kSlack)) ++c.violations;
    if (w.abandoned || !iv.wolfe.contains(w.step, kSlack)) ++c.violations;
  }
  c.detail = summary(c.trials, c.violations);
  return c;
}

void check_descent(RngStream& rng, long instances, TheoryCheck& rate, TheoryCheck& cap) {
  for (long i = 0; i < instances; ++i) {
    Instance in = draw_instance(rng, false);
    const TheoryParams p = params_for(in.q, std::pow(10.0, -2.0 + 4.0 * rng.uniform()));
    const ComplexityBounds cb = complexity_bounds(p);
    QuadraticObjective obj(in.q, in.x);
    DescentConfig cfg;
    cfg.T0 = p.T0;
    RngStream unused(0);
    const DescentTrace tr = run_descent(obj, cfg, StopRule::budget(~0ULL).with_iters(100), unused);
    double prev = tr.f0;
    double total = 1.0;
    long k = 0;
    for (const IterationRecord& it : tr.iterations) {
      if (it.abandoned) break;
      ++k;
      total += it.probes;
      ++rate.trials;
      if (prev > 0.0 && it.f / prev > cb.aels_contraction * (1.0 + kSlack)) ++rate.violations;
      prev = it.f;
      ++cap.trials;
      if (k > 1 && it.probes > cb.aels_fevals_per_step) ++cap.violations;
      if (total > aels_total_fevals_bound(p, k) * (1.0 + kSlack)) ++cap.violations;
      if (it.f == 0.0) break;
    }
  }
  rate.detail = summary(rate.trials, rate.violations);
  cap.detail = summary(cap.trials, cap.violations);
}

TheoryCheck check_wolfe_fevals(RngStream& rng, long instances) {
  TheoryCheck c{"wolfe-feval-cap", 0, 0, {}};
  for (long i = 0; i < instances; ++i) {
    Instance in = draw_instance(rng, true);
    const Vector g = *quadratic_eval(in.q, in.x, true).gradient;
    const Vector d = -g;
    if (d.norm() == 0.0) continue;
    const double gamma = -d.dot(g) / d.squaredNorm();
    const double T = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    EvaluationLedger led;
    LineProbe probe = quadratic_slice(in.q, in.x, d, led, true);
    const LineSearchOutcome out = wolfe_search(probe, d.dot(g), T);
    ++c.trials;
    const double used = out.probes + out.dd_probes;
    if (out.abandoned || used > wolfe_fevals_bound(params_for(in.q), gamma, T) * (1.0 + kSlack)) ++c.violations;
  }
  c.detail = summary(c.trials, c.violations);
  return c;
}

TheoryCheck check_fd(RngStream& rng, long instances) {
  TheoryCheck c{"fd-error", 0, 0, {}};
  for (long i = 0; i < instances; ++i) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_below(9));
    const double m = 0.1 + 0.9 * rng.uniform();
    const double L = std::pow(10.0, 2.0 * rng.uniform());
    QuadraticObjective obj(random_quadratic(rng, n, m, std::max(m, L), false));
    const double Lq = obj.problem().L();
    Vector x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = 1e-2 * rng.normal();
    const double sigma = std::pow(10.0, -8.0 + static_cast<double>(rng.uniform_below(5)));
    EvaluationLedger led;
    ObjectiveHandle h(obj, led);
    const double fx = obj.value(x);
    const Vector grad = obj.gradient(x);
    const FdGradient fg = fd_gradient(h, x, fx, {sigma});
    const Vector v = random_unit_vector(rng, n);
    const double mu = fd_directional(h, x, fx, v, {sigma});
    c.trials += 2;
    if ((fg.g - grad).norm() > Lq * sigma * std::sqrt(static_cast<double>(n)) / 2.0 * (1.0 + kSlack)) ++c.violations;
    if (std::abs(mu - v.dot(grad)) > Lq * sigma / 2.0 * (1.0 + kSlack)) ++c.violations;
  }
  c.detail = summary(c.trials, c.violations);
  return c;
}

}  // namespace

std::vector<TheoryCheck> theory_checks(std::uint64_t seed, long instances) {
  RngStream rng(seed);
  std::vector<TheoryCheck> out;
  out.push_back(check_bracket(rng, instances));
  out.push_back(check_oracle(rng, instances));
  out.push_back(check_intervals(rng, instances));
  TheoryCheck rate{"aels-rate", 0, 0, {}};
  TheoryCheck cap{"aels-feval-cap", 0, 0, {}};
  check_descent(rng, std::max(1L, instances / 10), rate, cap);
  out.push_back(rate);
  out.push_back(cap);
  out.push_back(check_wolfe_fevals(rng, instances));
  out.push_back(check_fd(rng, instances));
  return out;
}

}  // namespace aels
