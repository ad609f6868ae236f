#include "aels/objectives.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace aels {

QuadraticProblem::QuadraticProblem(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() == 0 || A_.rows() != A_.cols()) {
    throw std::invalid_argument("QuadraticProblem: curvature must be square and non-empty");
  }
  if (b_.size() != A_.rows()) throw std::invalid_argument("QuadraticProblem: b has wrong dimension");
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("QuadraticProblem: curvature must be symmetric");
  }
  if (A_.isDiagonal(0.0)) {
    m_ = A_.diagonal().minCoeff();
    L_ = A_.diagonal().maxCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A_, Eigen::EigenvaluesOnly);
    m_ = es.eigenvalues().minCoeff();
    L_ = es.eigenvalues().maxCoeff();
  }
  if (!(m_ > 0.0)) throw std::invalid_argument("QuadraticProblem: curvature must be positive definite");
}

QuadraticProblem QuadraticProblem::diagonal(const Vector& diag) {
  return diagonal(diag, Vector::Zero(diag.size()));
}

QuadraticProblem QuadraticProblem::diagonal(const Vector& diag, const Vector& b) {
  return QuadraticProblem(Matrix(diag.asDiagonal()), b);
}

QuadraticProblem random_quadratic(RngStream& rng, Eigen::Index n, double m, double L, bool with_linear) {
  if (n < 1) throw std::invalid_argument("random_quadratic: dimension must be >= 1");
  if (!(m > 0.0 && m <= L)) throw std::invalid_argument("random_quadratic: need 0 < m <= L");
  if (n == 1 && m != L) throw std::invalid_argument("random_quadratic: n = 1 needs m == L");
  Matrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  // Sign fix so Q is Haar distributed.
  for (Eigen::Index j = 0; j < n; ++j)
    if (qr.matrixQR()(j, j) < 0.0) Q.col(j) *= -1.0;
  Vector lambda(n);
  lambda[0] = m;
  for (Eigen::Index i = 1; i < n; ++i) lambda[i] = m + (L - m) * rng.uniform();
  if (n > 1) lambda[n - 1] = L;
  Matrix A = Q * lambda.asDiagonal() * Q.transpose();
  A = (0.5 * (A + A.transpose())).eval();
  Vector b = Vector::Zero(n);
  if (with_linear)
    for (Eigen::Index i = 0; i < n; ++i) b[i] = rng.normal();
  return QuadraticProblem(std::move(A), std::move(b));
}

Vector QuadraticProblem::minimizer() const { return A_.ldlt().solve(-b_); }

double QuadraticProblem::min_value() const { return 0.5 * b_.dot(minimizer()); }

ValueAndGradient quadratic_eval(const QuadraticProblem& p, const Vector& x, bool want_gradient) {
  if (x.size() != p.dim()) throw std::invalid_argument("quadratic_eval: dimension mismatch");
  const Vector Ax = p.curvature() * x;
  ValueAndGradient out{0.5 * x.dot(Ax) + p.linear().dot(x), std::nullopt};
  if (want_gradient) out.gradient = Ax + p.linear();
  return out;
}

QuadraticObjective::QuadraticObjective(QuadraticProblem p, std::optional<Vector> start)
    : p_(std::move(p)), start_(std::move(start)) {
  if (start_) check_dim(*start_);
}

double QuadraticObjective::value(const Vector& x) const { return quadratic_eval(p_, x, false).value; }

Vector QuadraticObjective::gradient(const Vector& x) const {
  return *quadratic_eval(p_, x, true).gradient;
}

Vector QuadraticObjective::initial_point() const {
  return start_ ? *start_ : Vector(Vector::Ones(dim()));
}

}  // namespace aels
