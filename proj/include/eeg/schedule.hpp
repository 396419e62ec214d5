#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eeg {

/// Step-size regimes for the extragradient pair (s_k, alpha_k).
///
///   C  : 0 < s_-, 0 < alpha_-, s^+ < 1/L, s_k <= alpha_k
///   C1 : C and alpha_k <= 1/L                           (descent)
///   C2 : C and s_k <= 1/(2L), alpha_k <= 1/L - s_k      (sublinear rate, convex f)
///   C3 : C and s_k <= (sqrt5 - 1)/(2L),
///        alpha_k <= 2/L - 2 s_k - (1 - L s_k) L s_k^2   (uniform constant C)
///
/// kBase checks C alone; kCustom schedules run unvalidated.
enum class Regime { kBase, kC1, kC2, kC3, kCustom };

const char* to_string(Regime regime);

/// Step sequences over a finite horizon. Entry k applies to iteration k; past
/// the end, the last entry repeats. A constant schedule has one entry each.
struct StepSchedule {
  Regime regime = Regime::kCustom;
  std::vector<double> s;
  std::vector<double> alpha;

  double s_at(std::size_t k) const { return s[k < s.size() ? k : s.size() - 1]; }
  double alpha_at(std::size_t k) const { return alpha[k < alpha.size() ? k : alpha.size() - 1]; }

  double s_min() const;
  double s_max() const;
  double alpha_min() const;
  double alpha_max() const;

  static StepSchedule constant(Regime regime, double s, double alpha);
};

/// Upper cap on alpha_k in regime C3 for a given s_k.
double c3_alpha_cap(double s, double L);

/// Default schedules: 0.99 of each regime's caps.
StepSchedule default_c1_schedule(double L);
StepSchedule default_c2_schedule(double L);
StepSchedule default_c3_schedule(double L);

struct InequalityCheck {
  std::string name;
  bool passed = true;
  std::optional<std::size_t> first_failing_k;  // set for per-k inequalities
};

struct ScheduleReport {
  bool valid = true;
  std::vector<InequalityCheck> checks;
  std::optional<std::string> first_violation;
};

/// Checks every inequality of the schedule's declared regime (C is always
/// included, except for kCustom which reports nothing). Requires L > 0.
ScheduleReport validate_schedule(const StepSchedule& schedule, double L);

/// Same as validate_schedule with an explicit regime.
ScheduleReport validate_schedule(const StepSchedule& schedule, double L, Regime regime);

}  // namespace eeg
