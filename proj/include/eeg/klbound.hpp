#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <iosfwd>
#include <vector>

#include "eeg/schedule.hpp"

namespace eeg {

// Small-prox complexity bound for the extragradient method under C3 with a
// convex smooth part and a Kurdyka-Lojasiewicz objective.
//
// psi is the inverse of the desingularizing function phi restricted to
// [0, r0]; beta_{k+1} = prox_{zeta psi}(beta_k) dominates F(x_k) - F* via
// psi(beta_k).

struct KLParams {
  double theta = 0.5;  // Lojasiewicz exponent, power family only
  double c = 1.0;      // phi(s) = c s^(1 - theta)
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  double ell = 0.0;    // Lipschitz constant of psi' on [0, beta0]
  double beta0 = 0.0;  // phi(r0)

  /// phi(s) = c s^(1-theta), psi(u) = (u/c)^(1/(1-theta)), beta0 = c r0^(1-theta).
  /// Rejects theta outside [1/2, 1), c <= 0, r0 <= 0.
  static KLParams power(double theta, double c, double r0);

  /// Caller-supplied psi. Checks psi(0) = 0, psi'(0) = 0 and, by sampling
  /// [0, beta0], that psi is increasing and convex and psi' is ell-Lipschitz.
  static KLParams custom(std::function<double(double)> psi, std::function<double(double)> dpsi,
                         double ell, double beta0);

  bool is_power_family() const { return !custom_; }

 private:
  bool custom_ = false;
};

struct BoundConstants {
  double C = 0.0;  // L^3 s_-^2 (1 + L s_-) / (2 (2 - L^2 s_-^2)^2 (1 - L s_-))
  double B = 0.0;  // 3 / alpha_-
};

/// Throws std::invalid_argument if the schedule is not valid under C3.
BoundConstants constants(const StepSchedule& schedule, double L);

/// (sqrt(1 + 2 ell C / B^2) - 1) / ell. All inputs must be positive.
double zeta(double ell, double C, double B);

class ScalarSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// argmin_{u >= 0} psi(u) + (u - beta)^2 / (2 zeta).
double prox_step(const KLParams& params, double zeta, double beta);

/// beta_0 .. beta_{k_max}.
std::vector<double> beta_sequence(const KLParams& params, double zeta, std::size_t k_max);

struct SmallProxBound {
  double C = 0.0;
  double B = 0.0;
  double zeta = 0.0;
  std::vector<double> betas;
  std::vector<double> objective_bounds;  // psi(beta_k)
  std::vector<double> distance_bounds;   // (B/C) beta_k + sqrt(psi(beta_{k-1})/C), NaN at k = 0
};

SmallProxBound bounds(const KLParams& params, double C, double B, double zeta,
                      const std::vector<double>& betas);

/// k,beta,obj_bound,dist_bound
void write_bound_csv(std::ostream& out, const SmallProxBound& bound);

}  // namespace eeg
