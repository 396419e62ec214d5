#include "eeg/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace eeg {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::kBase: return "C";
    case Regime::kC1: return "C1";
    case Regime::kC2: return "C2";
    case Regime::kC3: return "C3";
    case Regime::kCustom: return "custom";
  }
  return "?";
}

double StepSchedule::s_min() const { return *std::min_element(s.begin(), s.end()); }
double StepSchedule::s_max() const { return *std::max_element(s.begin(), s.end()); }
double StepSchedule::alpha_min() const { return *std::min_element(alpha.begin(), alpha.end()); }
double StepSchedule::alpha_max() const { return *std::max_element(alpha.begin(), alpha.end()); }

StepSchedule StepSchedule::constant(Regime regime, double s, double alpha) {
  return StepSchedule{regime, {s}, {alpha}};
}

double c3_alpha_cap(double s, double L) { return 2.0 / L - 2.0 * s - (1.0 - L * s) * L * s * s; }

StepSchedule default_c1_schedule(double L) {
  return StepSchedule::constant(Regime::kC1, 0.99 / (2.0 * L), 0.99 / L);
}

StepSchedule default_c2_schedule(double L) {
  const double s = 0.99 / (2.0 * L);
  return StepSchedule::constant(Regime::kC2, s, 0.99 * (1.0 / L - s));
}

StepSchedule default_c3_schedule(double L) {
  const double s = 0.99 * (std::sqrt(5.0) - 1.0) / (2.0 * L);
  return StepSchedule::constant(Regime::kC3, s, 0.99 * c3_alpha_cap(s, L));
}

namespace {

using PerK = std::function<bool(double s, double alpha)>;

class ReportBuilder {
 public:
  explicit ReportBuilder(const StepSchedule& schedule) : schedule_(schedule) {}

  void scalar(std::string name, bool ok) { add(InequalityCheck{std::move(name), ok, std::nullopt}); }

  void per_k(std::string name, const PerK& pred) {
    const std::size_t horizon = std::max(schedule_.s.size(), schedule_.alpha.size());
    InequalityCheck check{std::move(name), true, std::nullopt};
    for (std::size_t k = 0; k < horizon; ++k) {
      if (!pred(schedule_.s_at(k), schedule_.alpha_at(k))) {
        check.passed = false;
        check.first_failing_k = k;
        break;
      }
    }
    add(std::move(check));
  }

  ScheduleReport finish() { return std::move(report_); }

 private:
  void add(InequalityCheck check) {
    if (!check.passed) {
      report_.valid = false;
      if (!report_.first_violation) report_.first_violation = check.name;
    }
    report_.checks.push_back(std::move(check));
  }

  const StepSchedule& schedule_;
  ScheduleReport report_;
};

}  // namespace

ScheduleReport validate_schedule(const StepSchedule& schedule, double L) {
  return validate_schedule(schedule, L, schedule.regime);
}

ScheduleReport validate_schedule(const StepSchedule& schedule, double L, Regime regime) {
  if (!(L > 0.0)) throw std::invalid_argument("validate_schedule: L must be positive");
  if (schedule.s.empty() || schedule.alpha.empty()) {
    throw std::invalid_argument("validate_schedule: empty step sequence");
  }
  ReportBuilder rb(schedule);
  if (regime == Regime::kCustom) return rb.finish();

  rb.scalar("C: s_- > 0", schedule.s_min() > 0.0);
  rb.scalar("C: alpha_- > 0", schedule.alpha_min() > 0.0);
  rb.scalar("C: s^+ < 1/L", schedule.s_max() < 1.0 / L);
  rb.per_k("C: 0 < s_k <= alpha_k", [](double s, double a) { return 0.0 < s && s <= a; });

  switch (regime) {
    case Regime::kC1:
      rb.per_k("C1: alpha_k <= 1/L", [L](double, double a) { return a <= 1.0 / L; });
      break;
    case Regime::kC2:
      rb.per_k("C2: s_k <= 1/(2L)", [L](double s, double) { return s <= 1.0 / (2.0 * L); });
      rb.per_k("C2: alpha_k <= 1/L - s_k", [L](double s, double a) { return a <= 1.0 / L - s; });
      break;
    case Regime::kC3:
      rb.per_k("C3: s_k <= (sqrt(5)-1)/(2L)",
               [L](double s, double) { return s <= (std::sqrt(5.0) - 1.0) / (2.0 * L); });
      rb.per_k("C3: alpha_k <= 2/L - 2 s_k - (1 - L s_k) L s_k^2",
               [L](double s, double a) { return a <= c3_alpha_cap(s, L); });
      break;
    default:
      break;
  }
  return rb.finish();
}

}  // namespace eeg
