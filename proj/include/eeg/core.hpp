#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eeg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Smooth part f of F = f + g. The gradient must be Lipschitz with constant
/// lipschitz().
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  /// Value and gradient in one pass. Override when the two share work.
  virtual double value_and_gradient(const Vector& x, Vector& grad) const {
    grad = gradient(x);
    return value(x);
  }
  virtual double lipschitz() const = 0;

  /// Cost of one call in matrix-vector products, used for the
  /// platform-independent work counter. Defaults to one unit per call.
  virtual double value_cost() const { return 1.0; }
  virtual double gradient_cost() const { return 1.0; }
  virtual double value_and_gradient_cost() const { return 1.0; }
};

/// Convex, prox-capable part g. value() may return +infinity outside dom g.
class ProxOracle {
 public:
  virtual ~ProxOracle() = default;

  virtual double value(const Vector& x) const = 0;
  /// argmin_y { g(y) + |y - x|^2 / (2t) }, t > 0.
  virtual Vector prox(const Vector& x, double t) const = 0;
};

/// F = f + g. Non-owning view; the oracles must outlive it.
struct CompositeProblem {
  const SmoothOracle& f;
  const ProxOracle& g;

  double value(const Vector& x) const { return f.value(x) + g.value(x); }
  double lipschitz() const { return f.lipschitz(); }
  Index dim() const { return f.dim(); }
};

// Soft-thresholding: 0 where |x_i| <= a, else x_i - a*sign(x_i).
Vector soft_threshold(const Vector& x, double a);

/// Prox of t*lambda*|.|_1. Requires t > 0 and lambda >= 0.
Vector prox_l1(const Vector& x, double t, double lambda);

/// Largest eigenvalue of A^T A (sigma_max(A)^2) by power iteration.
struct PowerIterationOptions {
  double tolerance = 1e-9;       // relative eigen-residual |Mv - mu v| / mu
  int max_iters = 200000;
  std::uint64_t seed = 0x5eed;
};

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

double lipschitz_estimate(const Matrix& A, const PowerIterationOptions& opts = {});

/// f(x) = 1/2 |Ax - b|^2.
class LeastSquaresTerm final : public SmoothOracle {
 public:
  LeastSquaresTerm(const Matrix& A, const Vector& b, double lipschitz)
      : A_(A), b_(b), L_(lipschitz) {}

  Index dim() const override { return A_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;
  double lipschitz() const override { return L_; }

  double value_cost() const override { return 1.0; }
  double gradient_cost() const override { return 2.0; }
  double value_and_gradient_cost() const override { return 2.0; }

 private:
  const Matrix& A_;
  const Vector& b_;
  double L_;
};

/// g(x) = lambda |x|_1.
class L1Norm final : public ProxOracle {
 public:
  explicit L1Norm(double lambda);
  double value(const Vector& x) const override { return lambda_ * x.lpNorm<1>(); }
  Vector prox(const Vector& x, double t) const override;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

/// min_x 1/2 |Ax - b|^2 + lambda |x|_1 with A of size p x n.
///
/// Owns its data; the oracles returned by smooth()/nonsmooth()/composite()
/// refer back into this object, so it is neither copyable nor movable once
/// constructed. Share it through std::shared_ptr when needed.
class L1LeastSquares {
 public:
  /// Computes L by power iteration when lipschitz <= 0.
  L1LeastSquares(Matrix A, Vector b, double lambda, double lipschitz = 0.0);

  L1LeastSquares(const L1LeastSquares&) = delete;
  L1LeastSquares& operator=(const L1LeastSquares&) = delete;

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double lambda() const { return lambda_; }
  double lipschitz() const { return L_; }
  Index n() const { return A_.cols(); }
  Index p() const { return A_.rows(); }

  const LeastSquaresTerm& smooth() const { return f_; }
  const L1Norm& nonsmooth() const { return g_; }
  CompositeProblem composite() const { return {f_, g_}; }

  double objective(const Vector& x) const;
  Vector gradient(const Vector& x) const { return f_.gradient(x); }

 private:
  Matrix A_;
  Vector b_;
  double lambda_;
  double L_;
  LeastSquaresTerm f_;
  L1Norm g_;
};

/// p(x, s) = S_{s lambda}(x - s grad f(x)).
Vector prox_grad_map(const L1LeastSquares& problem, const Vector& x, double s);

/// Lower bound on min F from weak duality: the dual objective -|u|^2/2 - <u, b> at
/// u = t (Ax - b), with t <= 1 the largest scaling that keeps |A^T u|_inf <= lambda.
/// Equals F* at a minimizer.
double dual_lower_bound(const L1LeastSquares& problem, const Vector& x);

/// Throws DimensionError when x does not match problem dimension.
void check_dim(const CompositeProblem& problem, const Vector& x);

}  // namespace eeg
