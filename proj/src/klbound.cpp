#include "eeg/klbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "eeg/solvers.hpp"

namespace eeg {

KLParams KLParams::power(double theta, double c, double r0) {
  if (!(theta >= 0.5 && theta < 1.0)) {
    throw std::invalid_argument("KLParams::power: theta must lie in [1/2, 1)");
  }
  if (!(c > 0.0)) throw std::invalid_argument("KLParams::power: c must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("KLParams::power: r0 must be positive");
  KLParams kp;
  kp.theta = theta;
  kp.c = c;
  const double m = 1.0 / (1.0 - theta);
  kp.psi = [c, m](double u) { return std::pow(u / c, m); };
  kp.dpsi = [c, m](double u) { return (m / c) * std::pow(u / c, m - 1.0); };
  kp.beta0 = c * std::pow(r0, 1.0 - theta);
  // psi'' = m (m-1)/c^2 (u/c)^(m-2) is nondecreasing for m >= 2
  if (m == 2.0) {
    kp.ell = 2.0 / (c * c);
  } else {
    kp.ell = m * (m - 1.0) / (c * c) * std::pow(kp.beta0 / c, m - 2.0);
  }
  return kp;
}

KLParams KLParams::custom(std::function<double(double)> psi, std::function<double(double)> dpsi,
                          double ell, double beta0) {
  if (!psi || !dpsi) throw std::invalid_argument("KLParams::custom: psi and psi' are required");
  if (!(ell > 0.0)) throw std::invalid_argument("KLParams::custom: ell must be positive");
  if (!(beta0 > 0.0)) throw std::invalid_argument("KLParams::custom: beta0 must be positive");
  if (std::abs(psi(0.0)) > 1e-14) throw std::invalid_argument("KLParams::custom: psi(0) != 0");
  if (std::abs(dpsi(0.0)) > 1e-14) throw std::invalid_argument("KLParams::custom: psi'(0) != 0");

  constexpr int kSamples = 1000;
  double prev_u = 0.0;
  double prev_psi = psi(0.0);
  double prev_dpsi = dpsi(0.0);
  for (int j = 1; j <= kSamples; ++j) {
    const double u = beta0 * j / kSamples;
    const double pv = psi(u);
    const double dv = dpsi(u);
    if (!(pv > prev_psi)) throw std::invalid_argument("KLParams::custom: psi is not increasing");
    if (dv < prev_dpsi - 1e-12 * (1.0 + std::abs(prev_dpsi))) {
      throw std::invalid_argument("KLParams::custom: psi is not convex");
    }
    if (dv - prev_dpsi > ell * (u - prev_u) * (1.0 + 1e-9) + 1e-14) {
      throw std::invalid_argument("KLParams::custom: psi' is not ell-Lipschitz");
    }
    prev_u = u;
    prev_psi = pv;
    prev_dpsi = dv;
  }
  KLParams kp;
  kp.psi = std::move(psi);
  kp.dpsi = std::move(dpsi);
  kp.ell = ell;
  kp.beta0 = beta0;
  kp.custom_ = true;
  return kp;
}

BoundConstants constants(const StepSchedule& schedule, double L) {
  const ScheduleReport report = validate_schedule(schedule, L, Regime::kC3);
  if (!report.valid) {
    throw std::invalid_argument("constants: schedule violates C3 (" + *report.first_violation + ")");
  }
  const double s = schedule.s_min();
  const double Ls = L * s;
  const double denom = 2.0 * (2.0 - Ls * Ls) * (2.0 - Ls * Ls) * (1.0 - Ls);
  BoundConstants out;
  out.C = L * L * L * s * s * (1.0 + Ls) / denom;
  out.B = 3.0 / schedule.alpha_min();
  return out;
}

double zeta(double ell, double C, double B) {
  if (!(ell > 0.0 && C > 0.0 && B > 0.0)) {
    throw std::invalid_argument("zeta: ell, C and B must be positive");
  }
  const double x = 2.0 * ell * C / (B * B);
  // sqrt(1 + x) - 1 without cancellation
  return x / (std::sqrt(1.0 + x) + 1.0) / ell;
}

double prox_step(const KLParams& params, double zeta, double beta) {
  if (!(zeta > 0.0)) throw std::invalid_argument("prox_step: zeta must be positive");
  if (beta <= 0.0) return 0.0;
  if (params.is_power_family() && params.theta == 0.5) {
    return beta / (1.0 + 2.0 * zeta / (params.c * params.c));
  }
  // h(u) = psi'(u) + (u - beta)/zeta is increasing with h(0) < 0 <= h(beta).
  auto h = [&](double u) { return params.dpsi(u) + (u - beta) / zeta; };
  double lo = 0.0;
  double hi = beta;
  if (h(hi) <= 0.0) return hi;
  double u = 0.5 * (lo + hi);
  constexpr int kMaxIters = 500;
  for (int it = 0; it < kMaxIters; ++it) {
    const double hu = h(u);
    if (hu == 0.0) return u;
    if (hu < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    if (hi - lo <= 1e-15 * beta || hi - lo <= std::numeric_limits<double>::min()) {
      return 0.5 * (lo + hi);
    }
    // Newton step on h with slope psi'' + 1/zeta >= 1/zeta; secant estimate of psi''
    const double eps = std::max(1e-8 * u, 1e-300);
    const double slope = (params.dpsi(u + eps) - params.dpsi(u)) / eps + 1.0 / zeta;
    double next = u - hu / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 * beta) return next;
    u = next;
  }
  throw ScalarSolveError("prox_step: no convergence (beta=" + std::to_string(beta) +
                         ", bracket=[" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

std::vector<double> beta_sequence(const KLParams& params, double zeta, std::size_t k_max) {
  if (!(params.beta0 > 0.0)) throw std::invalid_argument("beta_sequence: beta0 must be positive");
  std::vector<double> betas;
  betas.reserve(k_max + 1);
  betas.push_back(params.beta0);
  for (std::size_t k = 0; k < k_max; ++k) betas.push_back(prox_step(params, zeta, betas.back()));
  return betas;
}

SmallProxBound bounds(const KLParams& params, double C, double B, double zeta,
                      const std::vector<double>& betas) {
  SmallProxBound out;
  out.C = C;
  out.B = B;
  out.zeta = zeta;
  out.betas = betas;
  out.objective_bounds.reserve(betas.size());
  out.distance_bounds.reserve(betas.size());
  for (std::size_t k = 0; k < betas.size(); ++k) {
    out.objective_bounds.push_back(betas[k] > 0.0 ? params.psi(betas[k]) : 0.0);
    if (k == 0) {
      out.distance_bounds.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      out.distance_bounds.push_back((B / C) * betas[k] +
                                    std::sqrt(out.objective_bounds[k - 1] / C));
    }
  }
  return out;
}

void write_bound_csv(std::ostream& out, const SmallProxBound& bound) {
  out << "k,beta,obj_bound,dist_bound\n";
  for (std::size_t k = 0; k < bound.betas.size(); ++k) {
    out << k << ',' << format_double(bound.betas[k]) << ','
        << format_double(bound.objective_bounds[k]) << ','
        << format_double(bound.distance_bounds[k]) << '\n';
  }
}

}  // namespace eeg
