#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <random>

#include "eeg/core.hpp"
#include "test_util.hpp"

using namespace eeg;
using eeg::testing::grid_prox_abs;
using eeg::testing::random_lasso;
using eeg::testing::random_matrix;
using eeg::testing::random_vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(SoftThreshold, DefinitionCases) {
  EXPECT_EQ(soft_threshold(vec({2.0, -0.5, 1.0}), 1.0), vec({1.0, 0.0, 0.0}));
  EXPECT_EQ(soft_threshold(vec({-4.0, 0.25}), 0.5), vec({-3.5, 0.0}));
}

TEST(SoftThreshold, ZeroThresholdIsIdentity) {
  std::mt19937_64 rng(3);
  const Vector x = random_vector(rng, 7);
  EXPECT_EQ(soft_threshold(x, 0.0), x);
}

TEST(SoftThreshold, MatchesGridOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ua(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = ux(rng), a = ua(rng);
    const double got = soft_threshold(vec({x}), a)[0];
    EXPECT_NEAR(got, grid_prox_abs(x, a), 1e-5) << "x=" << x << " a=" << a;
  }
}

TEST(ProxL1, DefinitionAndIdentity) {
  EXPECT_EQ(prox_l1(vec({3.0, -3.0}), 1.0, 1.0), vec({2.0, -2.0}));
  const Vector x = vec({0.3, -7.0, 0.0});
  EXPECT_EQ(prox_l1(x, 2.5, 0.0), x);
}

TEST(ProxL1, RejectsBadParameters) {
  const Vector x = vec({1.0});
  EXPECT_THROW(prox_l1(x, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(prox_l1(x, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(prox_l1(x, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(L1Norm(-1.0), std::invalid_argument);
}

TEST(ProxL1, RandomVectorMatchesGridOracle) {
  std::mt19937_64 rng(5);
  const Vector x = random_vector(rng, 5, 2.0);
  const double t = 0.7, lambda = 0.9;
  const Vector got = prox_l1(x, t, lambda);
  for (Index i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], grid_prox_abs(x[i], t * lambda), 1e-5);
}

TEST(ProxL1, NonexpansiveAndThreePoint) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(0.01, 3.0), ul(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = ut(rng), lambda = ul(rng);
    const L1Norm g(lambda);
    const Vector u = random_vector(rng, 6, 2.0);
    const Vector w = random_vector(rng, 6, 2.0);
    const Vector pu = g.prox(u, t), pw = g.prox(w, t);
    EXPECT_LE((pu - pw).norm(), (u - w).norm() + 1e-14);
    // g(w) - g(v) >= (|u - v|^2 + |w - v|^2 - |u - w|^2) / (2t), v = prox(u)
    const double lhs = g.value(w) - g.value(pu);
    const double rhs =
        ((u - pu).squaredNorm() + (w - pu).squaredNorm() - (u - w).squaredNorm()) / (2.0 * t);
    EXPECT_GE(lhs - rhs, -1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST(ProxGradMap, OneDimensional) {
  L1LeastSquares P(Matrix::Ones(1, 1), Vector::Ones(1), 0.1);
  EXPECT_NEAR(prox_grad_map(P, Vector::Zero(1), 1.0)[0], 0.9, 1e-15);
}

TEST(ProxGradMap, CriticalPointIsFixed) {
  L1LeastSquares P(Matrix::Ones(1, 1), Vector::Ones(1), 0.1);
  const Vector xs = vec({0.9});
  for (double s : {0.1, 0.5, 1.0, 3.0}) EXPECT_NEAR(prox_grad_map(P, xs, s)[0], 0.9, 1e-15);
}

TEST(ProxGradMap, MatchesComposition) {
  std::mt19937_64 rng(8);
  auto P = random_lasso(rng, 6, 9, 0.3, 0.2);
  const Vector x = random_vector(rng, 9);
  const double s = 0.37 / P->lipschitz();
  const Vector expected =
      prox_l1(x - s * (P->A().transpose() * (P->A() * x - P->b())), s, P->lambda());
  EXPECT_LE((prox_grad_map(*P, x, s) - expected).norm(), 1e-13);
  EXPECT_THROW(prox_grad_map(*P, Vector::Zero(3), s), DimensionError);
}

TEST(ProxGradMap, DescentForShortSteps) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto P = random_lasso(rng, 8, 12, 0.5, 0.1);
    const Vector x = random_vector(rng, 12);
    for (double frac : {0.1, 0.5, 1.0}) {
      const double s = frac / P->lipschitz();
      EXPECT_LE(P->objective(prox_grad_map(*P, x, s)), P->objective(x) + 1e-12);
    }
  }
}

TEST(Lipschitz, SimpleMatrices) {
  EXPECT_NEAR(lipschitz_estimate(Matrix::Identity(3, 3)), 1.0, 1e-12);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 1.0;
  EXPECT_NEAR(lipschitz_estimate(D), 4.0, 1e-9);
}

TEST(Lipschitz, MatchesSvdOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix A = random_matrix(rng, 10, 20);
    const double smax = Eigen::JacobiSVD<Matrix>(A).singularValues()[0];
    const double L = lipschitz_estimate(A);
    EXPECT_NEAR(L / (smax * smax), 1.0, 1e-8);
    EXPECT_LE(L, smax * smax * (1.0 + 1e-6));
  }
}

TEST(Lipschitz, Errors) {
  EXPECT_THROW(lipschitz_estimate(Matrix::Zero(3, 4)), std::invalid_argument);
  std::mt19937_64 rng(4);
  PowerIterationOptions opts;
  opts.max_iters = 1;
  try {
    lipschitz_estimate(random_matrix(rng, 30, 30), opts);
    FAIL() << "expected PowerIterationError";
  } catch (const PowerIterationError& e) {
    EXPECT_GT(e.best_estimate(), 0.0);
  }
}

TEST(L1LeastSquares, ValueGradientAndFiniteDifferences) {
  std::mt19937_64 rng(9);
  auto P = random_lasso(rng, 7, 10, 0.0, 0.3);
  const Vector x = random_vector(rng, 10);
  const Vector r = P->A() * x - P->b();
  EXPECT_NEAR(P->smooth().value(x), 0.5 * r.squaredNorm(), 1e-12);
  EXPECT_NEAR(P->nonsmooth().value(x), 0.3 * x.lpNorm<1>(), 1e-12);
  EXPECT_NEAR(P->objective(x), 0.5 * r.squaredNorm() + 0.3 * x.lpNorm<1>(), 1e-12);
  const Vector g = P->gradient(x);
  EXPECT_LE((g - P->A().transpose() * r).norm(), 1e-12);
  Vector g2;
  EXPECT_NEAR(P->smooth().value_and_gradient(x, g2), 0.5 * r.squaredNorm(), 1e-12);
  EXPECT_LE((g2 - g).norm(), 1e-12);

  const double h = 1e-6;
  for (Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (P->smooth().value(xp) - P->smooth().value(xm)) / (2.0 * h);
    EXPECT_NEAR(fd, g[i], 1e-6 * std::max(1.0, std::abs(g[i])));
  }
}

TEST(L1LeastSquares, RejectsInvalidData) {
  EXPECT_THROW(L1LeastSquares(Matrix::Ones(2, 3), Vector::Ones(3), 0.1), DimensionError);
  EXPECT_THROW(L1LeastSquares(Matrix::Ones(2, 3), Vector::Ones(2), 0.0), std::invalid_argument);
  L1LeastSquares P(Matrix::Ones(2, 3), Vector::Ones(2), 0.1);
  EXPECT_EQ(P.n(), 3);
  EXPECT_EQ(P.p(), 2);
  EXPECT_NEAR(P.lipschitz(), 6.0, 1e-9);
  EXPECT_THROW(check_dim(P.composite(), Vector::Zero(2)), DimensionError);
}

TEST(DualBound, WeakDualityAndTightness) {
  L1LeastSquares one(Matrix::Ones(1, 1), Vector::Ones(1), 0.1);
  EXPECT_NEAR(dual_lower_bound(one, Vector::Constant(1, 0.9)), 0.095, 1e-15);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto P = random_lasso(rng, 6, 10, 0.3, 0.2);
    const Vector x = random_vector(rng, 10);
    const Vector y = random_vector(rng, 10);
    EXPECT_LE(dual_lower_bound(*P, x), P->objective(y) + 1e-12);
  }
}
