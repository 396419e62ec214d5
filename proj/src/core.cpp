#include "eeg/core.hpp"

#include <cmath>
#include <random>
#include <string>

namespace eeg {

Vector soft_threshold(const Vector& x, double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("soft_threshold: threshold must be nonnegative");
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (std::abs(v) <= a) {
      out[i] = 0.0;
    } else {
      out[i] = v > 0.0 ? v - a : v + a;
    }
  }
  return out;
}

Vector prox_l1(const Vector& x, double t, double lambda) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_l1: step t must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("prox_l1: lambda must be nonnegative");
  return soft_threshold(x, t * lambda);
}

double lipschitz_estimate(const Matrix& A, const PowerIterationOptions& opts) {
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("lipschitz_estimate: matrix is zero");
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = unif(rng);
  v.normalize();

  Vector Av(A.rows());
  Vector Mv(A.cols());
  double mu = 0.0;
  double best = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Av.noalias() = A * v;
    Mv.noalias() = A.transpose() * Av;
    mu = v.dot(Mv);  // Rayleigh quotient, never above sigma_max^2
    best = std::max(best, mu);
    const double residual = (Mv - mu * v).norm();
    if (residual <= opts.tolerance * mu) return best;
    const double nrm = Mv.norm();
    if (nrm == 0.0) {
      // start vector in the null space; restart from a fresh direction
      for (Index i = 0; i < v.size(); ++i) v[i] = unif(rng);
      v.normalize();
      continue;
    }
    v = Mv / nrm;
  }
  throw PowerIterationError("lipschitz_estimate: power iteration did not converge in " +
                                std::to_string(opts.max_iters) + " iterations",
                            best);
}

double LeastSquaresTerm::value(const Vector& x) const {
  if (x.size() != A_.cols()) throw DimensionError("least squares: x has wrong dimension");
  return 0.5 * (A_ * x - b_).squaredNorm();
}

Vector LeastSquaresTerm::gradient(const Vector& x) const {
  if (x.size() != A_.cols()) throw DimensionError("least squares: x has wrong dimension");
  const Vector r = A_ * x - b_;
  return A_.transpose() * r;
}

double LeastSquaresTerm::value_and_gradient(const Vector& x, Vector& grad) const {
  if (x.size() != A_.cols()) throw DimensionError("least squares: x has wrong dimension");
  const Vector r = A_ * x - b_;
  grad.noalias() = A_.transpose() * r;
  return 0.5 * r.squaredNorm();
}

L1Norm::L1Norm(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("L1Norm: lambda must be nonnegative");
}

Vector L1Norm::prox(const Vector& x, double t) const { return prox_l1(x, t, lambda_); }

L1LeastSquares::L1LeastSquares(Matrix A, Vector b, double lambda, double lipschitz)
    : A_(std::move(A)),
      b_(std::move(b)),
      lambda_(lambda),
      L_(lipschitz > 0.0 ? lipschitz : lipschitz_estimate(A_)),
      f_(A_, b_, L_),
      g_(lambda) {
  if (A_.rows() != b_.size()) {
    throw DimensionError("L1LeastSquares: b must have one entry per row of A");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("L1LeastSquares: lambda must be positive");
}

double L1LeastSquares::objective(const Vector& x) const { return f_.value(x) + g_.value(x); }

Vector prox_grad_map(const L1LeastSquares& problem, const Vector& x, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("prox_grad_map: step must be positive");
  if (x.size() != problem.n()) throw DimensionError("prox_grad_map: x has wrong dimension");
  return soft_threshold(x - s * problem.gradient(x), s * problem.lambda());
}

double dual_lower_bound(const L1LeastSquares& problem, const Vector& x) {
  if (x.size() != problem.n()) throw DimensionError("dual_lower_bound: x has wrong dimension");
  Vector u = problem.A() * x - problem.b();
  const double dual_norm = (problem.A().transpose() * u).lpNorm<Eigen::Infinity>();
  if (dual_norm > problem.lambda()) u *= problem.lambda() / dual_norm;
  return -0.5 * u.squaredNorm() - u.dot(problem.b());
}

void check_dim(const CompositeProblem& problem, const Vector& x) {
  if (x.size() != problem.dim()) {
    throw DimensionError("dimension mismatch: expected " + std::to_string(problem.dim()) +
                         ", got " + std::to_string(x.size()));
  }
}

}  // namespace eeg
