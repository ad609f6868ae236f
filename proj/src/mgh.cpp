#include "aels/mgh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aels {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

constexpr double kBardY[15] = {0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
                               0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39};
constexpr double kGaussY[15] = {0.0009, 0.0044, 0.0175, 0.0540, 0.1295, 0.2420, 0.3521, 0.3989,
                                0.3521, 0.2420, 0.1295, 0.0540, 0.0175, 0.0044, 0.0009};
constexpr double kKowY[11] = {0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                              0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
constexpr double kKowU[11] = {4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625};
constexpr double kOsb1Y[33] = {0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881, 0.850, 0.818,
                               0.784, 0.751, 0.718, 0.685, 0.658, 0.628, 0.603, 0.580, 0.558,
                               0.538, 0.522, 0.506, 0.490, 0.478, 0.467, 0.457, 0.448, 0.438,
                               0.431, 0.424, 0.420, 0.414, 0.411, 0.406};

std::vector<MghProblem> build() {
  std::vector<MghProblem> c;

  c.push_back({1, "rosenbrock", 2, 2,
               [](const Vector& x, Vector& r) {
                 r[0] = 10.0 * (x[1] - x[0] * x[0]);
                 r[1] = 1.0 - x[0];
               },
               vec({-1.2, 1.0}), 0.0, vec({1.0, 1.0})});

  c.push_back({2, "freudenstein_roth", 2, 2,
               [](const Vector& x, Vector& r) {
                 r[0] = -13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1];
                 r[1] = -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1];
               },
               vec({0.5, -2.0}), 48.98425367924, vec({5.0, 4.0})});

  c.push_back({3, "powell_badly_scaled", 2, 2,
               [](const Vector& x, Vector& r) {
                 r[0] = 1e4 * x[0] * x[1] - 1.0;
                 r[1] = std::exp(-x[0]) + std::exp(-x[1]) - 1.0001;
               },
               vec({0.0, 1.0}), 0.0, std::nullopt});

  c.push_back({4, "brown_badly_scaled", 2, 3,
               [](const Vector& x, Vector& r) {
                 r[0] = x[0] - 1e6;
                 r[1] = x[1] - 2e-6;
                 r[2] = x[0] * x[1] - 2.0;
               },
               vec({1.0, 1.0}), 0.0, vec({1e6, 2e-6})});

  c.push_back({5, "beale", 2, 3,
               [](const Vector& x, Vector& r) {
                 r[0] = 1.5 - x[0] * (1.0 - x[1]);
                 r[1] = 2.25 - x[0] * (1.0 - x[1] * x[1]);
                 r[2] = 2.625 - x[0] * (1.0 - x[1] * x[1] * x[1]);
               },
               vec({1.0, 1.0}), 0.0, vec({3.0, 0.5})});

  c.push_back({6, "jennrich_sampson", 2, 10,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 10; ++i) {
                   r[i - 1] = 2.0 + 2.0 * i - (std::exp(i * x[0]) + std::exp(i * x[1]));
                 }
               },
               vec({0.3, 0.4}), 124.362182355, std::nullopt});

  c.push_back({7, "helical_valley", 3, 3,
               [](const Vector& x, Vector& r) {
                 double theta;
                 if (x[0] > 0.0) {
                   theta = std::atan(x[1] / x[0]) / (2.0 * std::numbers::pi);
                 } else if (x[0] < 0.0) {
                   theta = std::atan(x[1] / x[0]) / (2.0 * std::numbers::pi) + 0.5;
                 } else {
                   theta = x[1] >= 0.0 ? 0.25 : -0.25;
                 }
                 r[0] = 10.0 * (x[2] - 10.0 * theta);
                 r[1] = 10.0 * (std::sqrt(x[0] * x[0] + x[1] * x[1]) - 1.0);
                 r[2] = x[2];
               },
               vec({-1.0, 0.0, 0.0}), 0.0, vec({1.0, 0.0, 0.0})});

  c.push_back({8, "bard", 3, 15,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 15; ++i) {
                   const double u = i;
                   const double v = 16 - i;
                   const double w = std::min(u, v);
                   r[i - 1] = kBardY[i - 1] - (x[0] + u / (v * x[1] + w * x[2]));
                 }
               },
               vec({1.0, 1.0, 1.0}), 8.21487730657e-3, std::nullopt});

  c.push_back({9, "gaussian", 3, 15,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 15; ++i) {
                   const double t = (8.0 - i) / 2.0;
                   const double dt = t - x[2];
                   r[i - 1] = x[0] * std::exp(-x[1] * dt * dt / 2.0) - kGaussY[i - 1];
                 }
               },
               vec({0.4, 1.0, 0.0}), 1.12793276961e-8, std::nullopt});

  c.push_back({12, "box_3d", 3, 10,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 10; ++i) {
                   const double t = 0.1 * i;
                   r[i - 1] = std::exp(-t * x[0]) - std::exp(-t * x[1]) -
                              x[2] * (std::exp(-t) - std::exp(-10.0 * t));
                 }
               },
               vec({0.0, 10.0, 20.0}), 0.0, vec({1.0, 10.0, 1.0})});

  c.push_back({13, "powell_singular", 4, 4,
               [](const Vector& x, Vector& r) {
                 r[0] = x[0] + 10.0 * x[1];
                 r[1] = std::sqrt(5.0) * (x[2] - x[3]);
                 r[2] = (x[1] - 2.0 * x[2]) * (x[1] - 2.0 * x[2]);
                 r[3] = std::sqrt(10.0) * (x[0] - x[3]) * (x[0] - x[3]);
               },
               vec({3.0, -1.0, 0.0, 1.0}), 0.0, vec({0.0, 0.0, 0.0, 0.0})});

  c.push_back({14, "wood", 4, 6,
               [](const Vector& x, Vector& r) {
                 r[0] = 10.0 * (x[1] - x[0] * x[0]);
                 r[1] = 1.0 - x[0];
                 r[2] = std::sqrt(90.0) * (x[3] - x[2] * x[2]);
                 r[3] = 1.0 - x[2];
                 r[4] = std::sqrt(10.0) * (x[1] + x[3] - 2.0);
                 r[5] = (x[1] - x[3]) / std::sqrt(10.0);
               },
               vec({-3.0, -1.0, -3.0, -1.0}), 0.0, vec({1.0, 1.0, 1.0, 1.0})});

  c.push_back({15, "kowalik_osborne", 4, 11,
               [](const Vector& x, Vector& r) {
                 for (int i = 0; i < 11; ++i) {
                   const double u = kKowU[i];
                   r[i] = kKowY[i] - x[0] * (u * u + u * x[1]) / (u * u + u * x[2] + x[3]);
                 }
               },
               vec({0.25, 0.39, 0.415, 0.39}), 3.07505603849e-4, std::nullopt});

  c.push_back({16, "brown_dennis", 4, 20,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 20; ++i) {
                   const double t = i / 5.0;
                   const double a = x[0] + t * x[1] - std::exp(t);
                   const double b = x[2] + x[3] * std::sin(t) - std::cos(t);
                   r[i - 1] = a * a + b * b;
                 }
               },
               vec({25.0, 5.0, -5.0, -1.0}), 85822.2016263563, std::nullopt});

  c.push_back({17, "osborne1", 5, 33,
               [](const Vector& x, Vector& r) {
                 for (int i = 0; i < 33; ++i) {
                   const double t = 10.0 * i;
                   r[i] = kOsb1Y[i] - (x[0] + x[1] * std::exp(-t * x[3]) + x[2] * std::exp(-t * x[4]));
                 }
               },
               vec({0.5, 1.5, -1.0, 0.01, 0.02}), 5.46489469748e-5, std::nullopt});

  c.push_back({18, "biggs_exp6", 6, 13,
               [](const Vector& x, Vector& r) {
                 for (int i = 1; i <= 13; ++i) {
                   const double t = 0.1 * i;
                   const double y = std::exp(-t) - 5.0 * std::exp(-10.0 * t) + 3.0 * std::exp(-4.0 * t);
                   r[i - 1] = x[2] * std::exp(-t * x[0]) - x[3] * std::exp(-t * x[1]) +
                              x[5] * std::exp(-t * x[4]) - y;
                 }
               },
               vec({1.0, 2.0, 1.0, 1.0, 1.0, 1.0}), 0.0, vec({1.0, 10.0, 1.0, 5.0, 4.0, 3.0})});

  {
    const Eigen::Index n = 8;
    Vector start(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] = (i % 2 == 0) ? -1.2 : 1.0;
    c.push_back({21, "extended_rosenbrock", n, n,
                 [n](const Vector& x, Vector& r) {
                   for (Eigen::Index i = 0; i < n; i += 2) {
                     r[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
                     r[i + 1] = 1.0 - x[i];
                   }
                 },
                 start, 0.0, Vector(Vector::Ones(n))});
  }

  {
    const Eigen::Index n = 8;
    Vector start(n);
    for (Eigen::Index i = 0; i < n; i += 4) {
      start[i] = 3.0;
      start[i + 1] = -1.0;
      start[i + 2] = 0.0;
      start[i + 3] = 1.0;
    }
    c.push_back({22, "extended_powell", n, n,
                 [n](const Vector& x, Vector& r) {
                   for (Eigen::Index i = 0; i < n; i += 4) {
                     r[i] = x[i] + 10.0 * x[i + 1];
                     r[i + 1] = std::sqrt(5.0) * (x[i + 2] - x[i + 3]);
                     r[i + 2] = (x[i + 1] - 2.0 * x[i + 2]) * (x[i + 1] - 2.0 * x[i + 2]);
                     r[i + 3] = std::sqrt(10.0) * (x[i] - x[i + 3]) * (x[i] - x[i + 3]);
                   }
                 },
                 start, 0.0, Vector(Vector::Zero(n))});
  }

  {
    const Eigen::Index n = 4;
    Vector start(n);
    for (Eigen::Index j = 0; j < n; ++j) start[j] = static_cast<double>(j + 1);
    c.push_back({23, "penalty1", n, n + 1,
                 [n](const Vector& x, Vector& r) {
                   const double a = std::sqrt(1e-5);
                   for (Eigen::Index i = 0; i < n; ++i) r[i] = a * (x[i] - 1.0);
                   r[n] = x.squaredNorm() - 0.25;
                 },
                 start, 2.2499775009e-5, std::nullopt});
  }

  {
    const Eigen::Index n = 8;
    Vector start(n);
    for (Eigen::Index j = 0; j < n; ++j) start[j] = 1.0 - static_cast<double>(j + 1) / n;
    c.push_back({25, "variably_dimensioned", n, n + 2,
                 [n](const Vector& x, Vector& r) {
                   double s = 0.0;
                   for (Eigen::Index j = 0; j < n; ++j) {
                     r[j] = x[j] - 1.0;
                     s += static_cast<double>(j + 1) * (x[j] - 1.0);
                   }
                   r[n] = s;
                   r[n + 1] = s * s;
                 },
                 start, 0.0, Vector(Vector::Ones(n))});
  }

  {
    const Eigen::Index n = 8;
    c.push_back({26, "trigonometric", n, n,
                 [n](const Vector& x, Vector& r) {
                   double cs = 0.0;
                   for (Eigen::Index j = 0; j < n; ++j) cs += std::cos(x[j]);
                   for (Eigen::Index i = 0; i < n; ++i) {
                     r[i] = static_cast<double>(n) - cs + static_cast<double>(i + 1) * (1.0 - std::cos(x[i])) -
                            std::sin(x[i]);
                   }
                 },
                 // Local minimum reached from the standard start.
                 Vector(Vector::Constant(n, 1.0 / n)), 1.1060989240e-05, std::nullopt});
  }

  {
    const Eigen::Index n = 10;
    c.push_back({27, "brown_almost_linear", n, n,
                 [n](const Vector& x, Vector& r) {
                   const double s = x.sum();
                   for (Eigen::Index i = 0; i + 1 < n; ++i) r[i] = x[i] + s - static_cast<double>(n + 1);
                   r[n - 1] = x.prod() - 1.0;
                 },
                 Vector(Vector::Constant(n, 0.5)), 0.0, Vector(Vector::Ones(n))});
  }

  {
    const Eigen::Index n = 8;
    const double h = 1.0 / (n + 1);
    Vector start(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double t = (j + 1) * h;
      start[j] = t * (t - 1.0);
    }
    c.push_back({28, "discrete_boundary_value", n, n,
                 [n, h](const Vector& x, Vector& r) {
                   for (Eigen::Index i = 0; i < n; ++i) {
                     const double t = (i + 1) * h;
                     const double prev = i > 0 ? x[i - 1] : 0.0;
                     const double next = i + 1 < n ? x[i + 1] : 0.0;
                     const double u = x[i] + t + 1.0;
                     r[i] = 2.0 * x[i] - prev - next + h * h * u * u * u / 2.0;
                   }
                 },
                 start, 0.0, std::nullopt});
  }

  {
    const Eigen::Index n = 8;
    c.push_back({30, "broyden_tridiagonal", n, n,
                 [n](const Vector& x, Vector& r) {
                   for (Eigen::Index i = 0; i < n; ++i) {
                     const double prev = i > 0 ? x[i - 1] : 0.0;
                     const double next = i + 1 < n ? x[i + 1] : 0.0;
                     r[i] = (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0;
                   }
                 },
                 Vector(Vector::Constant(n, -1.0)), 0.0, std::nullopt});
  }

  {
    const Eigen::Index n = 9;
    const Eigen::Index m = 45;
    c.push_back({32, "linear_full_rank", n, m,
                 [n, m](const Vector& x, Vector& r) {
                   const double s = 2.0 * x.sum() / static_cast<double>(m);
                   for (Eigen::Index i = 0; i < m; ++i) r[i] = (i < n ? x[i] : 0.0) - s - 1.0;
                 },
                 Vector(Vector::Ones(n)), static_cast<double>(m - n), std::nullopt});
  }

  {
    const Eigen::Index n = 8;
    Vector start(n);
    for (Eigen::Index j = 0; j < n; ++j) start[j] = static_cast<double>(j + 1) / (n + 1);
    c.push_back({35, "chebyquad", n, n,
                 [n](const Vector& x, Vector& r) {
                   r.setZero();
                   for (Eigen::Index j = 0; j < n; ++j) {
                     const double y = 2.0 * x[j] - 1.0;
                     double t_prev = 1.0;
                     double t_cur = y;
                     for (Eigen::Index i = 0; i < n; ++i) {
                       r[i] += t_cur;
                       const double t_next = 2.0 * y * t_cur - t_prev;
                       t_prev = t_cur;
                       t_cur = t_next;
                     }
                   }
                   for (Eigen::Index i = 0; i < n; ++i) {
                     r[i] /= static_cast<double>(n);
                     const auto k = static_cast<double>(i + 1);
                     if ((i + 1) % 2 == 0) r[i] += 1.0 / (k * k - 1.0);
                   }
                 },
                 start, 3.51687372568e-3, std::nullopt});
  }

  return c;
}

}  // namespace

const std::vector<MghProblem>& mgh_catalogue() {
  static const std::vector<MghProblem> catalogue = build();
  return catalogue;
}

const MghProblem& mgh_problem(const std::string& id) {
  for (const auto& p : mgh_catalogue()) {
    if (p.name == id || std::to_string(p.id) == id) return p;
  }
  throw std::invalid_argument("unknown MGH problem '" + id + "'");
}

double mgh_eval(const MghProblem& p, const Vector& x) {
  if (x.size() != p.n) throw std::invalid_argument("mgh_eval: dimension mismatch for " + p.name);
  Vector r(p.m);
  p.residuals(x, r);
  return r.squaredNorm();
}

}  // namespace aels
