#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "aels/objectives.hpp"

namespace aels {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticProblem::LogisticProblem(const SparseDataset& d, std::optional<double> lam) : data(&d) {
  if (d.rows() == 0) throw std::invalid_argument("LogisticProblem: empty dataset");
  lambda = lam.value_or(1.0 / static_cast<double>(d.rows()));
  if (!(lambda > 0.0)) throw std::invalid_argument("LogisticProblem: lambda must be positive");
}

MinibatchView full_batch(const SparseDataset& data) {
  MinibatchView v{&data, {}};
  v.indices.resize(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) v.indices[i] = i;
  return v;
}

MinibatchView sample_minibatch(const SparseDataset& data, std::size_t batch, RngStream& rng) {
  const std::size_t n = data.rows();
  if (batch == 0 || batch > n) {
    throw std::invalid_argument("sample_minibatch: batch size must lie in [1, N]");
  }
  // Floyd's algorithm: B distinct draws in O(B) regardless of N.
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(batch * 2);
  MinibatchView v{&data, {}};
  v.indices.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_below(j + 1));
    const std::size_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    v.indices.push_back(pick);
  }
  std::sort(v.indices.begin(), v.indices.end());
  return v;
}

ValueAndGradient logistic_eval(const LogisticProblem& p, const MinibatchView& view, const Vector& x,
                               bool want_gradient) {
  const SparseDataset& d = *p.data;
  if (x.size() != static_cast<Eigen::Index>(d.dim)) throw std::invalid_argument("logistic_eval: dimension mismatch");
  if (view.size() == 0) throw std::invalid_argument("logistic_eval: empty minibatch");
  const double inv_b = 1.0 / static_cast<double>(view.size());

  double loss = 0.0;
  std::optional<Vector> grad;
  if (want_gradient) grad = Vector::Zero(x.size());
  for (std::size_t i : view.indices) {
    const double margin = -d.labels[i] * d.dot_row(i, x);
    loss += softplus(margin);
    if (want_gradient) d.axpy_row(i, -d.labels[i] * sigmoid(margin) * inv_b, *grad);
  }
  ValueAndGradient out{0.5 * p.lambda * x.squaredNorm() + loss * inv_b, std::nullopt};
  if (want_gradient) {
    *grad += p.lambda * x;
    out.gradient = std::move(grad);
  }
  return out;
}

namespace {

class LogisticBatchObjective final : public Objective {
 public:
  LogisticBatchObjective(const LogisticProblem& p, MinibatchView view) : p_(p), view_(std::move(view)) {}
  Eigen::Index dim() const override { return static_cast<Eigen::Index>(p_.data->dim); }
  double value(const Vector& x) const override { return logistic_eval(p_, view_, x, false).value; }
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override { return *logistic_eval(p_, view_, x, true).gradient; }

 private:
  LogisticProblem p_;
  MinibatchView view_;
};

}  // namespace

LogisticObjective::LogisticObjective(const SparseDataset& data, std::optional<double> lambda,
                                     std::size_t batch_size)
    : problem_(data, lambda), full_(full_batch(data)), batch_(batch_size) {
  if (batch_ > data.rows()) throw std::invalid_argument("LogisticObjective: batch size exceeds N");
  if (batch_ == data.rows()) batch_ = 0;
}

double LogisticObjective::value(const Vector& x) const { return logistic_eval(problem_, full_, x, false).value; }

Vector LogisticObjective::gradient(const Vector& x) const {
  return *logistic_eval(problem_, full_, x, true).gradient;
}

std::unique_ptr<Objective> LogisticObjective::sample_step(RngStream& rng) const {
  if (batch_ == 0) return nullptr;
  return std::make_unique<LogisticBatchObjective>(problem_, sample_minibatch(*problem_.data, batch_, rng));
}

ReferenceMinimum logistic_reference_minimum(const LogisticProblem& p, double grad_tol) {
  const SparseDataset& d = *p.data;
  const auto n = static_cast<Eigen::Index>(d.dim);
  const MinibatchView all = full_batch(d);
  const double inv_n = 1.0 / static_cast<double>(d.rows());

  Vector x = Vector::Zero(n);
  auto eval = logistic_eval(p, all, x, true);
  for (int iter = 0; iter < 100; ++iter) {
    if (eval.gradient->norm() <= grad_tol) break;
    Matrix H = p.lambda * Matrix::Identity(n, n);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      const Vector z = d.dense_row(i);
      const double s = sigmoid(d.labels[i] * z.dot(x));
      H.selfadjointView<Eigen::Lower>().rankUpdate(z, s * (1.0 - s) * inv_n);
    }
    H = H.selfadjointView<Eigen::Lower>();
    const Vector step = H.ldlt().solve(-*eval.gradient);
    double t = 1.0;
    const double slope = step.dot(*eval.gradient);
    for (int k = 0; k < 60; ++k) {
      auto trial = logistic_eval(p, all, x + t * step, true);
      if (trial.value <= eval.value + 1e-4 * t * slope || k == 59) {
        x += t * step;
        eval = std::move(trial);
        break;
      }
      t *= 0.5;
    }
  }
  return {x, eval.value, eval.gradient->norm()};
}

BbStep bb_initial_step(const ObjectiveHandle& obj, const Vector& x0, const std::optional<Vector>& g0) {
  const Vector g = g0 ? *g0 : obj.gradient(x0);
  const double gnorm = g.norm();
  if (!(gnorm > 0.0) || !std::isfinite(gnorm)) return {1.0, true};
  const double eps = 1e-4 * std::max(1.0, x0.norm());
  const Vector s = (-eps / gnorm) * g;
  const Vector y = obj.gradient(x0 + s) - g;
  const double sy = s.dot(y);
  if (!(sy > 0.0)) return {1.0, true};
  return {s.squaredNorm() / sy, false};
}

}  // namespace aels
