#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eeg/core.hpp"
#include "eeg/schedule.hpp"

namespace eeg {

enum class Method { kEeg, kForwardBackward, kFista };

const char* to_string(Method method);

// ---------------------------------------------------------------------------
// Single steps

struct EegStep {
  Vector y;       // scout point prox_{s g}(x - s grad f(x))
  Vector x_next;  // prox_{alpha g}(x - alpha grad f(y))
};

EegStep eeg_step(const CompositeProblem& problem, const Vector& x, double s, double alpha);

Vector fb_step(const CompositeProblem& problem, const Vector& x, double alpha);

struct FistaStep {
  Vector x_next;
  double t_next = 1.0;
};

/// One FISTA step: t_next = (1 + sqrt(1 + 4t^2))/2,
/// z = x + ((t - 1)/t_next)(x - x_prev), x_next = prox_{alpha g}(z - alpha grad f(z)).
FistaStep fista_step(const CompositeProblem& problem, const Vector& x, const Vector& x_prev,
                     double t, double alpha);

// ---------------------------------------------------------------------------
// Per-iteration certificates

/// F(x_k) - F(x_{k+1}) - |x_k - x_{k+1}|^2 / (2 alpha_k). Nonnegative under C1.
double descent_certificate(double F_k, double F_k1, const Vector& x_k, const Vector& x_k1,
                           double alpha);

/// (1/(1 - L s) - s/alpha)|x_k - x_{k+1}| - |x_{k+1} - y_k|. Nonnegative under C.
/// Throws std::invalid_argument when s >= 1/L.
double coupling_certificate(const Vector& x_k, const Vector& x_k1, const Vector& y_k, double s,
                            double alpha, double L);

/// b_k = (L alpha + (1 - L s)^2) / (alpha (1 - L s)). Requires s < 1/L.
double subgrad_bound_constant(double s, double alpha, double L);

/// c_k = 1/alpha - (L/2)(1/(1 - L s) - s/alpha)^2. Requires s < 1/L.
double descent_constant(double s, double alpha, double L);

struct SubgradCertificate {
  double residual_norm = 0.0;  // |omega_{k+1}|
  double b_k = 0.0;
  double slack = 0.0;          // b_k |x_k - x_{k+1}| - |omega_{k+1}|
};

/// omega_{k+1} = (x_k - x_{k+1})/alpha + grad f(x_{k+1}) - grad f(y_k), an
/// element of dF(x_{k+1}). Throws std::invalid_argument when s >= 1/L.
SubgradCertificate subgrad_certificate(const CompositeProblem& problem, const Vector& x_k,
                                       const Vector& x_k1, const Vector& y_k, double s,
                                       double alpha);

/// |(u - x_next)/alpha + grad_next - grad_v| for x_next = prox_{alpha g}(u - alpha grad f(v)).
double subgrad_residual(const Vector& u, const Vector& x_next, double alpha,
                        const Vector& grad_next, const Vector& grad_v);

// ---------------------------------------------------------------------------
// Step-size control

struct StepRequest {
  const CompositeProblem& problem;
  std::size_t k;
  const Vector& base;        // point the step starts from
  const Vector& grad_point;  // point whose gradient drives the step
  const Vector& grad;        // grad f(grad_point)
  const Vector& base_grad;   // grad f(base)
};

struct StepResult {
  double alpha = 0.0;
  Vector x_next;
  double work = 0.0;  // matvec-equivalents not already visible through problem.f
  bool used_base_gradient = false;  // x_next = prox_{alpha g}(base - alpha grad f(base))
};

/// Chooses alpha_k (and s_k for the extragradient scout step). Instances carry
/// per-run state, e.g. a backtracking estimate of L.
class StepController {
 public:
  virtual ~StepController() = default;
  virtual std::string label() const = 0;
  virtual double scout_step(std::size_t k) const = 0;
  virtual StepResult step(const StepRequest& request) = 0;
  virtual const StepSchedule* schedule() const { return nullptr; }
};

class ScheduleController final : public StepController {
 public:
  explicit ScheduleController(StepSchedule schedule) : schedule_(std::move(schedule)) {}
  std::string label() const override { return to_string(schedule_.regime); }
  double scout_step(std::size_t k) const override { return schedule_.s_at(k); }
  StepResult step(const StepRequest& request) override;
  const StepSchedule* schedule() const override { return &schedule_; }

 private:
  StepSchedule schedule_;
};

// ---------------------------------------------------------------------------
// Runs

struct StopCriteria {
  std::size_t max_iters = 50000;
  double tolerance = 1e-10;  // on the subgradient residual norm
};

struct RunOptions {
  std::optional<double> f_star;   // fills the subopt column
  bool keep_iterates = false;
  bool validate_schedule = true;  // reject schedules violating their declared regime
};

enum class RunStatus { kConverged, kMaxIterations, kError };

const char* to_string(RunStatus status);

/// Row k describes x_k and the step that produced it (NaN where undefined,
/// e.g. all step columns on row 0).
struct RunRow {
  std::size_t k = 0;
  double time_s = 0.0;
  double objective = 0.0;
  double subopt = 0.0;
  double s = 0.0;
  double alpha = 0.0;
  double descent_margin = 0.0;
  double coupling_slack = 0.0;
  double residual = 0.0;
  double subgrad_slack = 0.0;
  double b_k = 0.0;
  double c_k = 0.0;
  double step_norm = 0.0;  // |x_{k-1} - x_k|
  double scout_gap = 0.0;  // |x_k - y_{k-1}|, extragradient only
  double matvecs = 0.0;
};

struct RunRecord {
  Method method = Method::kEeg;
  std::string step_rule;
  std::vector<RunRow> rows;
  RunStatus status = RunStatus::kMaxIterations;
  std::string message;
  Vector x_final;
  std::vector<Vector> iterates;  // only with RunOptions::keep_iterates
};

/// Iterates from x0 until the subgradient residual is <= tolerance or
/// max_iters steps were taken. Row 0 reports the gradient-mapping norm
/// L|x0 - prox_{g/L}(x0 - grad f(x0)/L)| as its residual.
RunRecord run(Method method, const CompositeProblem& problem, StepController& steps,
              const Vector& x0, const StopCriteria& stop, const RunOptions& options = {});

RunRecord run(Method method, const CompositeProblem& problem, const StepSchedule& schedule,
              const Vector& x0, const StopCriteria& stop, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  bool header = true;
  bool matvecs = false;
  std::vector<std::pair<std::string, std::string>> constants;  // appended columns
};

/// algo,step_rule,k,time_s,objective,subopt,s_k,alpha_k,descent_margin,
/// coupling_slack,residual,b_k[,matvecs][,constants...]. NaN prints empty.
void write_csv(std::ostream& out, const RunRecord& record, const CsvOptions& options = {});

std::string format_double(double value);

}  // namespace eeg
