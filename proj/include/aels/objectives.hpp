#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aels/core.hpp"

namespace aels {

// ---------------------------------------------------------------------------
// Quadratics: f(x) = 1/2 x'Ax + b'x

/// Symmetric positive-definite quadratic with its extreme eigenvalues.
class QuadraticProblem {
 public:
  QuadraticProblem(Matrix A, Vector b);
  static QuadraticProblem diagonal(const Vector& diag);
  static QuadraticProblem diagonal(const Vector& diag, const Vector& b);

  const Matrix& curvature() const { return A_; }
  const Vector& linear() const { return b_; }
  double m() const { return m_; }
  double L() const { return L_; }
  Eigen::Index dim() const { return A_.rows(); }

  Vector minimizer() const;
  double min_value() const;

 private:
  Matrix A_;
  Vector b_;
  double m_;
  double L_;
};

struct ValueAndGradient {
  double value;
  std::optional<Vector> gradient;
};

/// Q diag(lambda) Q' with Q Haar-random, lambda_1 = m, lambda_n = L and the
/// rest uniform in [m, L] (n = 1 needs m == L). b ~ N(0, I) when
/// `with_linear`, else zero.
QuadraticProblem random_quadratic(RngStream& rng, Eigen::Index n, double m, double L, bool with_linear);

ValueAndGradient quadratic_eval(const QuadraticProblem& p, const Vector& x, bool want_gradient);

class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(QuadraticProblem p, std::optional<Vector> start = std::nullopt);

  Eigen::Index dim() const override { return p_.dim(); }
  double value(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  Vector initial_point() const override;

  const QuadraticProblem& problem() const { return p_; }

 private:
  QuadraticProblem p_;
  std::optional<Vector> start_;
};

// ---------------------------------------------------------------------------
// Sparse binary-classification data in LIBSVM text format.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// CSR rows with labels in {-1, +1}. When built by the parser the last
/// coordinate of every row is the appended bias 1.
struct SparseDataset {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;
  std::vector<double> labels;
  std::size_t dim = 0;
  bool has_bias = false;

  std::size_t rows() const { return labels.size(); }

  void add_row(std::span<const std::size_t> indices, std::span<const double> values, double label);
  double dot_row(std::size_t i, const Vector& x) const;
  /// out += scale * z_i
  void axpy_row(std::size_t i, double scale, Vector& out) const;
  Vector dense_row(std::size_t i) const;

  bool operator==(const SparseDataset&) const = default;
};

/// Labels 0/1 are remapped to -1/+1; a bias coordinate is appended. dim is the
/// largest feature index (or expected_dim when given) plus one for the bias.
SparseDataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim = std::nullopt);
SparseDataset parse_libsvm_file(const std::string& path,
                                std::optional<std::size_t> expected_dim = std::nullopt);
/// Inverse of parse_libsvm for parser-built datasets (the bias is not written).
std::string serialize_libsvm(const SparseDataset& data);

/// Dense Gaussian covariates with labels drawn from a logistic model.
SparseDataset make_synthetic_logistic(std::size_t rows, std::size_t features, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Regularised logistic regression.

struct LogisticProblem {
  const SparseDataset* data;
  double lambda;

  /// lambda defaults to 1/N.
  explicit LogisticProblem(const SparseDataset& d, std::optional<double> lam = std::nullopt);
};

/// Distinct row indices, sorted, drawn uniformly without replacement.
struct MinibatchView {
  const SparseDataset* parent = nullptr;
  std::vector<std::size_t> indices;
  std::size_t size() const { return indices.size(); }
};

MinibatchView full_batch(const SparseDataset& data);
MinibatchView sample_minibatch(const SparseDataset& data, std::size_t batch, RngStream& rng);

double softplus(double z);
double sigmoid(double z);

ValueAndGradient logistic_eval(const LogisticProblem& p, const MinibatchView& view, const Vector& x,
                               bool want_gradient);

/// Full-data logistic objective. With batch_size in [1, N) each descent step
/// samples a minibatch through sample_step().
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(const SparseDataset& data, std::optional<double> lambda = std::nullopt,
                    std::size_t batch_size = 0);

  Eigen::Index dim() const override { return static_cast<Eigen::Index>(problem_.data->dim); }
  double value(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  std::unique_ptr<Objective> sample_step(RngStream& rng) const override;

  const LogisticProblem& problem() const { return problem_; }
  std::size_t batch_size() const { return batch_; }

 private:
  LogisticProblem problem_;
  MinibatchView full_;
  std::size_t batch_;
};

/// Newton's method to near machine precision; used for f* in relative-error stops.
struct ReferenceMinimum {
  Vector x;
  double value;
  double grad_norm;
};
ReferenceMinimum logistic_reference_minimum(const LogisticProblem& p, double grad_tol = 1e-12);

// ---------------------------------------------------------------------------

struct BbStep {
  double step;
  bool fallback;
};

/// BB1 step s's/s'y from a normalised probe s = -eps g/||g||,
/// eps = 1e-4 max(1, ||x0||). Falls back to 1.0 when s'y <= 0 or g = 0.
/// Gradients are counted in the handle's ledger (two gevals).
BbStep bb_initial_step(const ObjectiveHandle& obj, const Vector& x0,
                       const std::optional<Vector>& g0 = std::nullopt);

}  // namespace aels
