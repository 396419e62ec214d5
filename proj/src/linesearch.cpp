#include "eeg/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "eeg/solvers.hpp"

namespace eeg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Branch of coordinate i of p(alpha): +1 on x_i - alpha(g_i + lambda) > 0,
// -1 on x_i - alpha(g_i - lambda) < 0, 0 when thresholded away.
struct CoordState {
  int sign = 0;
  double slope = 0.0;
};

CoordState branch(int sign, double g, double lambda) {
  if (sign > 0) return {1, -(g + lambda)};
  if (sign < 0) return {-1, -(g - lambda)};
  return {0, 0.0};
}

struct Event {
  double alpha;
  Index coord;
  int order;  // position within the coordinate's own event sequence
  int new_sign;
};

// Initial branch of every coordinate for small alpha > 0 and the later
// transitions, from the closed-form zero crossings.
void build_events(const Vector& x, const Vector& g, double lambda, std::vector<int>& sign0,
                  std::vector<Event>& events) {
  const Index n = x.size();
  sign0.assign(static_cast<std::size_t>(n), 0);
  events.clear();
  events.reserve(static_cast<std::size_t>(2 * n));
  for (Index i = 0; i < n; ++i) {
    const double xi = x[i];
    const double a_pos = g[i] + lambda;
    const double a_neg = g[i] - lambda;
    if (xi > 0.0) {
      sign0[i] = 1;
      if (a_pos > 0.0) {
        events.push_back({xi / a_pos, i, 0, 0});
        if (a_neg > 0.0) events.push_back({xi / a_neg, i, 1, -1});
      }
    } else if (xi < 0.0) {
      sign0[i] = -1;
      if (a_neg < 0.0) {
        events.push_back({xi / a_neg, i, 0, 0});
        if (a_pos < 0.0) events.push_back({xi / a_pos, i, 1, 1});
      }
    } else {
      if (a_pos < 0.0) {
        sign0[i] = 1;
      } else if (a_neg > 0.0) {
        sign0[i] = -1;
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.coord != b.coord) return a.coord < b.coord;
    return a.order < b.order;
  });
}

struct SweepOutput {
  std::vector<QuadraticSegment> segments;
  std::vector<double> offsets;  // q(alpha_lo) - q(0), accumulated from segment increments
};

SweepOutput sweep_impl(const L1LeastSquares& problem, const Vector& x, const Vector& g,
                       const SweepOptions& options, std::uint64_t initial_flops) {
  const Index n = problem.n();
  const Index p = problem.p();
  if (x.size() != n || g.size() != n) throw DimensionError("sweep: vector has wrong dimension");
  const double lambda = problem.lambda();
  const Matrix& A = problem.A();
  const auto np = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(p);

  LineSearchStats stats;
  stats.flops = initial_flops;

  std::vector<int> sign0;
  std::vector<Event> events;
  build_events(x, g, lambda, sign0, events);
  stats.events = events.size();

  std::vector<CoordState> state(static_cast<std::size_t>(n));
  Vector d(n);
  double l1 = 0.0;      // |p(alpha_lo)|_1
  double sign_dot = 0.0;  // <sign pattern, d>, sign taken from d for coordinates at zero
  for (Index i = 0; i < n; ++i) {
    state[i] = branch(sign0[i], g[i], lambda);
    d[i] = state[i].slope;
    l1 += std::abs(x[i]);
    sign_dot += state[i].sign * state[i].slope;
  }

  Vector r = A * x - problem.b();
  Vector Ad = A * d;
  stats.flops += 2 * np;

  SweepOutput out;
  out.segments.reserve(events.size() + 1);
  out.offsets.reserve(events.size() + 1);
  double alpha_lo = 0.0;
  double offset = 0.0;

  auto emit = [&](double alpha_hi) {
    QuadraticSegment seg;
    seg.alpha_lo = alpha_lo;
    seg.alpha_hi = alpha_hi;
    seg.q0 = 0.5 * r.squaredNorm() + lambda * l1;
    seg.q1 = Ad.dot(r) + lambda * sign_dot;
    seg.q2 = 0.5 * Ad.squaredNorm();
    if (options.record_directions) seg.d = d;
    stats.flops += 3 * static_cast<std::uint64_t>(p);
    out.segments.push_back(std::move(seg));
    out.offsets.push_back(offset);
  };

  for (const Event& ev : events) {
    if (ev.alpha > alpha_lo) {
      emit(ev.alpha);
      const QuadraticSegment& seg = out.segments.back();
      const double t = ev.alpha - alpha_lo;
      offset += t * (seg.q1 + t * seg.q2);
      r.noalias() += t * Ad;
      l1 += t * sign_dot;
      stats.flops += static_cast<std::uint64_t>(p);
      alpha_lo = ev.alpha;
    }
    CoordState& cs = state[ev.coord];
    const CoordState next = branch(ev.new_sign, g[ev.coord], lambda);
    const double delta = next.slope - cs.slope;
    if (delta != 0.0) {
      Ad.noalias() += delta * A.col(ev.coord);
      stats.flops += static_cast<std::uint64_t>(p);
    }
    sign_dot += next.sign * next.slope - cs.sign * cs.slope;
    d[ev.coord] = next.slope;
    cs = next;
  }
  emit(kInf);

  stats.segments = out.segments.size();
  if (options.stats) *options.stats = stats;
  return out;
}

}  // namespace

BreakpointList breakpoints(const Vector& x, const Vector& grad, double lambda) {
  if (x.size() != grad.size()) throw DimensionError("breakpoints: x and grad differ in size");
  BreakpointList list;
  list.reserve(static_cast<std::size_t>(2 * x.size()));
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double a_pos = grad[i] + lambda;
    const double a_neg = grad[i] - lambda;
    if (xi == 0.0) {
      // both candidates are 0; only a branch that actually opens activates
      if (a_neg != 0.0) {
        list.push_back({0.0, i, a_neg > 0.0 ? BreakpointEvent::kActivate
                                            : BreakpointEvent::kDeactivate});
      }
      if (a_pos != 0.0) {
        list.push_back({0.0, i, a_pos < 0.0 ? BreakpointEvent::kActivate
                                            : BreakpointEvent::kDeactivate});
      }
      continue;
    }
    if (a_neg != 0.0) {
      const double v = xi / a_neg;
      if (v >= 0.0) {
        list.push_back({v, i, xi > 0.0 ? BreakpointEvent::kActivate : BreakpointEvent::kDeactivate});
      }
    }
    if (a_pos != 0.0) {
      const double v = xi / a_pos;
      if (v >= 0.0) {
        list.push_back({v, i, xi > 0.0 ? BreakpointEvent::kDeactivate : BreakpointEvent::kActivate});
      }
    }
  }
  std::stable_sort(list.begin(), list.end(), [](const Breakpoint& a, const Breakpoint& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.coord < b.coord;
  });
  return list;
}

BreakpointList breakpoints(const L1LeastSquares& problem, const Vector& x) {
  if (x.size() != problem.n()) throw DimensionError("breakpoints: x has wrong dimension");
  return breakpoints(x, problem.gradient(x), problem.lambda());
}

std::vector<QuadraticSegment> sweep(const L1LeastSquares& problem, const Vector& x,
                                    const SweepOptions& options) {
  if (x.size() != problem.n()) throw DimensionError("sweep: x has wrong dimension");
  const auto np = static_cast<std::uint64_t>(problem.n()) * static_cast<std::uint64_t>(problem.p());
  return sweep_impl(problem, x, problem.gradient(x), options, 2 * np).segments;
}

std::vector<QuadraticSegment> sweep(const L1LeastSquares& problem, const Vector& x,
                                    const Vector& grad, const SweepOptions& options) {
  return sweep_impl(problem, x, grad, options, 0).segments;
}

Vector prox_path_point(const Vector& x, const Vector& grad, double alpha, double lambda) {
  return soft_threshold(x - alpha * grad, alpha * lambda);
}

namespace {

LineSearchResult minimize_segments(const L1LeastSquares& problem, const Vector& x,
                                   const Vector& g, std::uint64_t initial_flops) {
  LineSearchResult result;
  SweepOptions opts;
  opts.stats = &result.stats;
  const SweepOutput sw = sweep_impl(problem, x, g, opts, initial_flops);

  // Candidates are compared through q(alpha) - q(0) accumulated from segment
  // increments; absolute values lose the small decreases near a minimizer.
  double best_alpha = 0.0;
  double best_delta = 0.0;
  for (std::size_t j = 0; j < sw.segments.size(); ++j) {
    const QuadraticSegment& seg = sw.segments[j];
    const double width = seg.alpha_hi - seg.alpha_lo;
    double t = 0.0;
    if (seg.q2 > 0.0) {
      t = std::clamp(-seg.q1 / (2.0 * seg.q2), 0.0, width);
    } else if (seg.q1 < 0.0) {
      if (std::isinf(width)) {
        throw std::runtime_error("exact_line_search: objective unbounded below along the path");
      }
      t = width;
    }
    const double delta = sw.offsets[j] + t * (seg.q1 + t * seg.q2);
    if (delta < best_delta) {
      best_delta = delta;
      best_alpha = seg.alpha_lo + t;
    }
  }
  result.alpha = best_alpha;
  result.p = best_alpha > 0.0 ? prox_path_point(x, g, best_alpha, problem.lambda()) : x;
  result.objective = sw.segments.front().q0 + best_delta;
  return result;
}

}  // namespace

LineSearchResult exact_line_search(const L1LeastSquares& problem, const Vector& x) {
  if (x.size() != problem.n()) throw DimensionError("exact_line_search: x has wrong dimension");
  const auto np = static_cast<std::uint64_t>(problem.n()) * static_cast<std::uint64_t>(problem.p());
  return minimize_segments(problem, x, problem.gradient(x), 2 * np);
}

LineSearchResult exact_line_search(const L1LeastSquares& problem, const Vector& x,
                                   const Vector& grad) {
  return minimize_segments(problem, x, grad, 0);
}

void write_segments_csv(std::ostream& out, const std::vector<QuadraticSegment>& segments) {
  out << "alpha_lo,alpha_hi,q0,q1,q2\n";
  for (const QuadraticSegment& s : segments) {
    out << format_double(s.alpha_lo) << ',' << format_double(s.alpha_hi) << ','
        << format_double(s.q0) << ',' << format_double(s.q1) << ',' << format_double(s.q2) << '\n';
  }
}

}  // namespace eeg
