#include <gtest/gtest.h>

#include <cmath>

#include "eeg/schedule.hpp"

using namespace eeg;

TEST(Schedule, ValidC1) {
  const auto r = validate_schedule(StepSchedule::constant(Regime::kC1, 0.5, 0.9), 1.0);
  EXPECT_TRUE(r.valid);
  EXPECT_FALSE(r.first_violation.has_value());
}

TEST(Schedule, ScoutLongerThanStepViolatesBaseCondition) {
  const auto r = validate_schedule(StepSchedule::constant(Regime::kC1, 0.6, 0.5), 1.0);
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(*r.first_violation, "C: 0 < s_k <= alpha_k");
}

TEST(Schedule, C2StepCap) {
  const auto r = validate_schedule(StepSchedule::constant(Regime::kC2, 0.4, 0.7), 1.0);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(*r.first_violation, "C2: alpha_k <= 1/L - s_k");
  EXPECT_TRUE(validate_schedule(StepSchedule::constant(Regime::kC2, 0.4, 0.6), 1.0).valid);
}

TEST(Schedule, C3Caps) {
  const double L = 2.0;
  const double s = 0.3 / L;
  const double cap = 2.0 / L - 2.0 * s - (1.0 - L * s) * L * s * s;
  EXPECT_DOUBLE_EQ(c3_alpha_cap(s, L), cap);
  EXPECT_TRUE(validate_schedule(StepSchedule::constant(Regime::kC3, s, cap), L).valid);
  const auto bad = validate_schedule(StepSchedule::constant(Regime::kC3, s, cap * 1.001), L);
  EXPECT_EQ(*bad.first_violation, "C3: alpha_k <= 2/L - 2 s_k - (1 - L s_k) L s_k^2");
  const auto bad_s = validate_schedule(StepSchedule::constant(Regime::kC3, 0.7 / L, 0.75 / L), L);
  EXPECT_EQ(*bad_s.first_violation, "C3: s_k <= (sqrt(5)-1)/(2L)");
}

TEST(Schedule, ScoutBelowInverseL) {
  const auto r = validate_schedule(StepSchedule::constant(Regime::kBase, 1.0, 1.5), 1.0);
  EXPECT_EQ(*r.first_violation, "C: s^+ < 1/L");
}

TEST(Schedule, PerIterationViolationReportsIndex) {
  StepSchedule sch;
  sch.regime = Regime::kC1;
  sch.s = {0.2, 0.2, 0.2, 0.2};
  sch.alpha = {0.5, 0.9, 1.2, 0.5};
  const auto r = validate_schedule(sch, 1.0);
  EXPECT_FALSE(r.valid);
  bool found = false;
  for (const auto& c : r.checks) {
    if (c.name == "C1: alpha_k <= 1/L") {
      found = true;
      EXPECT_FALSE(c.passed);
      ASSERT_TRUE(c.first_failing_k.has_value());
      EXPECT_EQ(*c.first_failing_k, 2u);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_DOUBLE_EQ(sch.alpha_at(10), 0.5);
  EXPECT_DOUBLE_EQ(sch.alpha_min(), 0.5);
  EXPECT_DOUBLE_EQ(sch.alpha_max(), 1.2);
}

TEST(Schedule, DefaultsAreValidWithMargin) {
  for (double L : {0.5, 1.0, 7.0, 1234.5}) {
    EXPECT_TRUE(validate_schedule(default_c1_schedule(L), L).valid);
    EXPECT_TRUE(validate_schedule(default_c2_schedule(L), L).valid);
    EXPECT_TRUE(validate_schedule(default_c3_schedule(L), L).valid);
    EXPECT_NEAR(default_c1_schedule(L).alpha_at(0), 0.99 / L, 1e-15 / L);
    EXPECT_NEAR(default_c3_schedule(L).s_at(0), 0.99 * (std::sqrt(5.0) - 1.0) / (2.0 * L),
                1e-15 / L);
  }
}

TEST(Schedule, ExplicitRegimeAndErrors) {
  const auto sch = StepSchedule::constant(Regime::kC1, 0.4, 0.7);
  EXPECT_FALSE(validate_schedule(sch, 1.0, Regime::kC2).valid);
  EXPECT_TRUE(validate_schedule(StepSchedule::constant(Regime::kCustom, 5.0, 1.0), 1.0).valid);
  EXPECT_THROW(validate_schedule(sch, 0.0), std::invalid_argument);
  EXPECT_STREQ(to_string(Regime::kC3), "C3");
}
