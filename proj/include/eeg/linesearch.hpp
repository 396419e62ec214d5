#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eeg/core.hpp"

namespace eeg {

// Exact line search along the prox-gradient path of an l1 least-squares
// problem,
//
//   q(alpha) = F(p(alpha)),   p(alpha) = S_{alpha lambda}(x - alpha g),
//
// where g is grad f(x) unless another gradient is supplied. p is piecewise
// affine in alpha and q piecewise quadratic; both change form only where a
// coordinate of p enters or leaves zero.

enum class BreakpointEvent { kActivate, kDeactivate };

struct Breakpoint {
  double alpha = 0.0;
  Index coord = 0;
  BreakpointEvent event = BreakpointEvent::kActivate;
};

/// Nonnegative values of x_i/(g_i - lambda) and x_i/(g_i + lambda), sorted
/// nondecreasingly, ties kept. At most 2n entries. Entries at alpha = 0 come
/// from zero coordinates; those that never leave zero are tagged kDeactivate.
using BreakpointList = std::vector<Breakpoint>;

BreakpointList breakpoints(const L1LeastSquares& problem, const Vector& x);
BreakpointList breakpoints(const Vector& x, const Vector& grad, double lambda);

/// q(alpha) = q0 + q1 (alpha - alpha_lo) + q2 (alpha - alpha_lo)^2 on
/// [alpha_lo, alpha_hi]. The last segment has alpha_hi = +inf.
struct QuadraticSegment {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  Vector d;  // dp/dalpha on the segment; empty unless requested

  double operator()(double alpha) const {
    const double t = alpha - alpha_lo;
    return q0 + t * (q1 + t * q2);
  }
};

struct LineSearchStats {
  std::uint64_t flops = 0;  // scalar multiply-adds, excluding the breakpoint sort
  std::size_t events = 0;
  std::size_t segments = 0;
};

struct SweepOptions {
  bool record_directions = false;
  LineSearchStats* stats = nullptr;
};

/// Segments tiling [0, inf). Adjacent zero-width pieces from tied breakpoints
/// are merged, so there are at most 2n + 1 segments.
std::vector<QuadraticSegment> sweep(const L1LeastSquares& problem, const Vector& x,
                                    const SweepOptions& options = {});
std::vector<QuadraticSegment> sweep(const L1LeastSquares& problem, const Vector& x,
                                    const Vector& grad, const SweepOptions& options = {});

struct LineSearchResult {
  double alpha = 0.0;     // global minimizer of q on [0, inf), smallest on ties
  Vector p;               // p(alpha)
  double objective = 0.0; // q(alpha)
  LineSearchStats stats;
};

LineSearchResult exact_line_search(const L1LeastSquares& problem, const Vector& x);
LineSearchResult exact_line_search(const L1LeastSquares& problem, const Vector& x,
                                   const Vector& grad);

/// S_{alpha lambda}(x - alpha grad).
Vector prox_path_point(const Vector& x, const Vector& grad, double alpha, double lambda);

/// alpha_lo,alpha_hi,q0,q1,q2
void write_segments_csv(std::ostream& out, const std::vector<QuadraticSegment>& segments);

}  // namespace eeg
