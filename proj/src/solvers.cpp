#include "eeg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <charconv>
#include <stdexcept>

namespace eeg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tallies oracle calls in matvec-equivalents for one run.
class CountingSmooth final : public SmoothOracle {
 public:
  explicit CountingSmooth(const SmoothOracle& inner) : inner_(inner) {}

  Index dim() const override { return inner_.dim(); }
  double value(const Vector& x) const override {
    work_ += inner_.value_cost();
    return inner_.value(x);
  }
  Vector gradient(const Vector& x) const override {
    work_ += inner_.gradient_cost();
    return inner_.gradient(x);
  }
  double value_and_gradient(const Vector& x, Vector& grad) const override {
    work_ += inner_.value_and_gradient_cost();
    return inner_.value_and_gradient(x, grad);
  }
  double lipschitz() const override { return inner_.lipschitz(); }
  double value_cost() const override { return inner_.value_cost(); }
  double gradient_cost() const override { return inner_.gradient_cost(); }
  double value_and_gradient_cost() const override { return inner_.value_and_gradient_cost(); }

  double work() const { return work_; }

 private:
  const SmoothOracle& inner_;
  mutable double work_ = 0.0;
};

void require_scout_below_inverse_L(double s, double L, const char* who) {
  if (!(s < 1.0 / L)) {
    throw std::invalid_argument(std::string(who) + ": requires s_k < 1/L");
  }
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::kEeg: return "EEG";
    case Method::kForwardBackward: return "FB";
    case Method::kFista: return "FISTA";
  }
  return "?";
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxIterations: return "max-iterations";
    case RunStatus::kError: return "error";
  }
  return "?";
}

EegStep eeg_step(const CompositeProblem& problem, const Vector& x, double s, double alpha) {
  check_dim(problem, x);
  EegStep out;
  out.y = problem.g.prox(x - s * problem.f.gradient(x), s);
  out.x_next = problem.g.prox(x - alpha * problem.f.gradient(out.y), alpha);
  return out;
}

Vector fb_step(const CompositeProblem& problem, const Vector& x, double alpha) {
  check_dim(problem, x);
  return problem.g.prox(x - alpha * problem.f.gradient(x), alpha);
}

FistaStep fista_step(const CompositeProblem& problem, const Vector& x, const Vector& x_prev,
                     double t, double alpha) {
  check_dim(problem, x);
  check_dim(problem, x_prev);
  if (!(t >= 1.0)) throw std::invalid_argument("fista_step: momentum t must be >= 1");
  FistaStep out;
  out.t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
  const Vector z = x + ((t - 1.0) / out.t_next) * (x - x_prev);
  out.x_next = problem.g.prox(z - alpha * problem.f.gradient(z), alpha);
  return out;
}

double descent_certificate(double F_k, double F_k1, const Vector& x_k, const Vector& x_k1,
                           double alpha) {
  return F_k - F_k1 - (x_k - x_k1).squaredNorm() / (2.0 * alpha);
}

double coupling_certificate(const Vector& x_k, const Vector& x_k1, const Vector& y_k, double s,
                            double alpha, double L) {
  require_scout_below_inverse_L(s, L, "coupling_certificate");
  const double factor = 1.0 / (1.0 - L * s) - s / alpha;
  return factor * (x_k - x_k1).norm() - (x_k1 - y_k).norm();
}

double subgrad_bound_constant(double s, double alpha, double L) {
  require_scout_below_inverse_L(s, L, "subgrad_bound_constant");
  const double q = 1.0 - L * s;
  return (L * alpha + q * q) / (alpha * q);
}

double descent_constant(double s, double alpha, double L) {
  require_scout_below_inverse_L(s, L, "descent_constant");
  const double factor = 1.0 / (1.0 - L * s) - s / alpha;
  return 1.0 / alpha - 0.5 * L * factor * factor;
}

double subgrad_residual(const Vector& u, const Vector& x_next, double alpha,
                        const Vector& grad_next, const Vector& grad_v) {
  return ((u - x_next) / alpha + grad_next - grad_v).norm();
}

SubgradCertificate subgrad_certificate(const CompositeProblem& problem, const Vector& x_k,
                                       const Vector& x_k1, const Vector& y_k, double s,
                                       double alpha) {
  check_dim(problem, x_k);
  check_dim(problem, x_k1);
  check_dim(problem, y_k);
  const double L = problem.lipschitz();
  SubgradCertificate cert;
  cert.b_k = subgrad_bound_constant(s, alpha, L);
  cert.residual_norm =
      subgrad_residual(x_k, x_k1, alpha, problem.f.gradient(x_k1), problem.f.gradient(y_k));
  cert.slack = cert.b_k * (x_k - x_k1).norm() - cert.residual_norm;
  return cert;
}

StepResult ScheduleController::step(const StepRequest& request) {
  StepResult out;
  out.alpha = schedule_.alpha_at(request.k);
  out.x_next = request.problem.g.prox(request.base - out.alpha * request.grad, out.alpha);
  return out;
}

RunRecord run(Method method, const CompositeProblem& problem, const StepSchedule& schedule,
              const Vector& x0, const StopCriteria& stop, const RunOptions& options) {
  ScheduleController steps(schedule);
  return run(method, problem, steps, x0, stop, options);
}

RunRecord run(Method method, const CompositeProblem& problem, StepController& steps,
              const Vector& x0, const StopCriteria& stop, const RunOptions& options) {
  check_dim(problem, x0);
  const double L = problem.lipschitz();
  if (options.validate_schedule) {
    if (const StepSchedule* schedule = steps.schedule()) {
      const ScheduleReport report = validate_schedule(*schedule, L);
      if (!report.valid) {
        throw std::invalid_argument("invalid step schedule for regime " +
                                    std::string(to_string(schedule->regime)) + ": violates " +
                                    *report.first_violation);
      }
    }
  }

  using Clock = std::chrono::steady_clock;
  CountingSmooth counted(problem.f);
  const CompositeProblem P{counted, problem.g};

  RunRecord record;
  record.method = method;
  record.step_rule = steps.label();

  double extra_work = 0.0;
  double elapsed = 0.0;
  auto tic = Clock::now();

  Vector x = x0;
  Vector grad_x;
  double F_x = counted.value_and_gradient(x, grad_x) + P.g.value(x);
  Vector x_prev = x;
  Vector grad_next;
  double t = 1.0;

  {
    const Vector p = P.g.prox(x - grad_x / L, 1.0 / L);
    RunRow row;
    row.k = 0;
    row.objective = F_x;
    row.subopt = options.f_star ? F_x - *options.f_star : kNaN;
    row.s = row.alpha = row.descent_margin = row.coupling_slack = kNaN;
    row.subgrad_slack = row.b_k = row.c_k = row.step_norm = row.scout_gap = kNaN;
    row.residual = L * (x - p).norm();
    elapsed += std::chrono::duration<double>(Clock::now() - tic).count();
    row.time_s = elapsed;
    row.matvecs = counted.work();
    record.rows.push_back(row);
    if (options.keep_iterates) record.iterates.push_back(x);
    if (!std::isfinite(F_x)) {
      record.status = RunStatus::kError;
      record.message = "objective is not finite at x0";
      record.x_final = x;
      return record;
    }
    if (row.residual <= stop.tolerance) {
      record.status = RunStatus::kConverged;
      record.x_final = x;
      return record;
    }
  }

  record.status = RunStatus::kMaxIterations;
  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    tic = Clock::now();
    RunRow row;
    row.k = k + 1;
    row.s = kNaN;
    row.coupling_slack = row.b_k = row.c_k = row.subgrad_slack = row.scout_gap = kNaN;

    Vector x_next;
    double alpha = 0.0;
    double residual = 0.0;
    double F_next = 0.0;

    switch (method) {
      case Method::kEeg: {
        const double s = steps.scout_step(k);
        const Vector y = P.g.prox(x - s * grad_x, s);
        const Vector grad_y = counted.gradient(y);
        StepResult st = steps.step(StepRequest{P, k, x, y, grad_y, grad_x});
        extra_work += st.work;
        alpha = st.alpha;
        x_next = std::move(st.x_next);
        F_next = counted.value_and_gradient(x_next, grad_next) + P.g.value(x_next);
        row.s = s;
        if (st.used_base_gradient) {
          residual = subgrad_residual(x, x_next, alpha, grad_next, grad_x);
          break;
        }
        residual = subgrad_residual(x, x_next, alpha, grad_next, grad_y);
        row.scout_gap = (x_next - y).norm();
        if (s < 1.0 / L) {
          const double dx = (x - x_next).norm();
          row.coupling_slack = coupling_certificate(x, x_next, y, s, alpha, L);
          row.b_k = subgrad_bound_constant(s, alpha, L);
          row.c_k = descent_constant(s, alpha, L);
          row.subgrad_slack = row.b_k * dx - residual;
        }
        break;
      }
      case Method::kForwardBackward: {
        StepResult st = steps.step(StepRequest{P, k, x, x, grad_x, grad_x});
        extra_work += st.work;
        alpha = st.alpha;
        x_next = std::move(st.x_next);
        F_next = counted.value_and_gradient(x_next, grad_next) + P.g.value(x_next);
        residual = subgrad_residual(x, x_next, alpha, grad_next, grad_x);
        // forward-backward is the s = 0 extragradient step (y_k = x_k)
        const double dx = (x - x_next).norm();
        row.coupling_slack = 0.0;
        row.b_k = subgrad_bound_constant(0.0, alpha, L);
        row.c_k = descent_constant(0.0, alpha, L);
        row.subgrad_slack = row.b_k * dx - residual;
        break;
      }
      case Method::kFista: {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double w = (t - 1.0) / t_next;
        Vector z;
        Vector grad_z;
        if (w == 0.0 || x == x_prev) {
          z = x;
          grad_z = grad_x;
        } else {
          z = x + w * (x - x_prev);
          grad_z = counted.gradient(z);
        }
        StepResult st = steps.step(StepRequest{P, k, z, z, grad_z, grad_z});
        extra_work += st.work;
        alpha = st.alpha;
        x_next = std::move(st.x_next);
        F_next = counted.value_and_gradient(x_next, grad_next) + P.g.value(x_next);
        residual = subgrad_residual(z, x_next, alpha, grad_next, grad_z);
        t = t_next;
        break;
      }
    }

    row.alpha = alpha;
    row.objective = F_next;
    row.subopt = options.f_star ? F_next - *options.f_star : kNaN;
    row.descent_margin = descent_certificate(F_x, F_next, x, x_next, alpha);
    row.step_norm = (x - x_next).norm();
    row.residual = residual;

    x_prev = std::move(x);
    x = std::move(x_next);
    grad_x.swap(grad_next);
    F_x = F_next;

    elapsed += std::chrono::duration<double>(Clock::now() - tic).count();
    row.time_s = elapsed;
    row.matvecs = counted.work() + extra_work;
    record.rows.push_back(row);
    if (options.keep_iterates) record.iterates.push_back(x);

    if (!std::isfinite(F_x) || !std::isfinite(residual)) {
      record.status = RunStatus::kError;
      record.message = "iteration diverged (non-finite objective or residual)";
      break;
    }
    if (residual <= stop.tolerance) {
      record.status = RunStatus::kConverged;
      break;
    }
  }
  record.x_final = x;
  return record;
}

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const RunRecord& record, const CsvOptions& options) {
  if (options.header) {
    out << "algo,step_rule,k,time_s,objective,subopt,s_k,alpha_k,descent_margin,"
           "coupling_slack,residual,b_k";
    if (options.matvecs) out << ",matvecs";
    for (const auto& [name, value] : options.constants) out << ',' << name;
    out << '\n';
  }
  for (const RunRow& r : record.rows) {
    out << to_string(record.method) << ',' << record.step_rule << ',' << r.k << ','
        << format_double(r.time_s) << ',' << format_double(r.objective) << ','
        << format_double(r.subopt) << ',' << format_double(r.s) << ','
        << format_double(r.alpha) << ',' << format_double(r.descent_margin) << ','
        << format_double(r.coupling_slack) << ',' << format_double(r.residual) << ','
        << format_double(r.b_k);
    if (options.matvecs) out << ',' << format_double(r.matvecs);
    for (const auto& [name, value] : options.constants) out << ',' << value;
    out << '\n';
  }
}

}  // namespace eeg
