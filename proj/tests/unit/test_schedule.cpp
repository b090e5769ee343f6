#include <gtest/gtest.h>

#include <cmath>

#include "pdslide/error.hpp"
#include "pdslide/schedule.hpp"

using namespace pdslide;

namespace {

ScheduleInputs det(double L, double mu, double norm_a, double R) {
  ScheduleInputs in;
  in.lipschitz = L;
  in.mu = mu;
  in.op_norm = norm_a;
  in.R = R;
  return in;
}

}  // namespace

TEST(Schedule, NonStronglyConvexValuesAtK3) {
  const auto s = build_deterministic(det(1.0, 0.0, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(s.tau(3), 1.0);
  EXPECT_DOUBLE_EQ(s.lambda(3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.beta(3), 3.0);
  EXPECT_DOUBLE_EQ(s.p(3), 2.0 / 3.0);
  EXPECT_EQ(s.inner_iterations(3), 3);
  EXPECT_FALSE(s.switch_point().has_value());
}

TEST(Schedule, StronglyConvexSwitchPoint) {
  const auto s = build_deterministic(det(8.0, 1.0, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(s.tau_limit(), 4.0);
  EXPECT_EQ(*s.switch_point(), 9);
  EXPECT_NEAR(s.beta(10), 9.0 * 1.25, 1e-12);
  EXPECT_NEAR(s.p(10), 8.0 / 5.0, 1e-15);
  EXPECT_NEAR(s.lambda(10), 0.8, 1e-15);
  // Before the switch the mu = 0 rules apply.
  EXPECT_DOUBLE_EQ(s.beta(9), 9.0);
  EXPECT_DOUBLE_EQ(s.p(9), 16.0 / 9.0);
}

TEST(Schedule, ClosedFormsAgainstDirectEvaluation) {
  const double L = 3.0, mu = 0.05, na = 2.5, R = 0.7;
  const auto s = build_deterministic(det(L, mu, na, R));
  const double tau = std::sqrt(2 * L / mu), lam = tau / (1 + tau);
  const auto delta = static_cast<std::int64_t>(std::ceil(2 * tau + 1));
  ASSERT_EQ(*s.switch_point(), delta);
  for (std::int64_t k = 1; k <= delta + 40; ++k) {
    double beta, p, T;
    if (k <= delta) {
      beta = k;
      p = 2 * L / k;
      T = std::ceil(k * R * na / L);
    } else {
      beta = delta * std::pow(lam, -static_cast<double>(k - delta));
      p = L / (1 + tau);
      T = std::ceil(2 * (1 + tau) * R * na / (L * std::pow(lam, (k - delta) / 2.0)));
    }
    EXPECT_NEAR(s.beta(k), beta, 1e-10 * beta) << k;
    EXPECT_NEAR(s.p(k), p, 1e-14 * p) << k;
    EXPECT_EQ(s.T(k), std::max(1.0, T)) << k;
    for (std::int64_t t : {std::int64_t{1}, std::int64_t{2}, s.inner_iterations(k)}) {
      const double eta = (p + mu) * (t - 1) + p * s.T(k);
      const double q = L * s.T(k) / (2 * beta * R * R);
      EXPECT_NEAR(s.eta(k, t), eta, 1e-12 * eta) << k << "," << t;
      EXPECT_NEAR(s.q(k, t), q, 1e-10 * q) << k << "," << t;
    }
  }
}

TEST(Schedule, StochasticBatchSizes) {
  ScheduleInputs in = det(1.0, 0.0, 1.0, 1.0);
  in.mode = ScheduleMode::stochastic;
  in.c = 1.0;
  in.N = 10;
  const auto s = build_stochastic(in);
  EXPECT_DOUBLE_EQ(s.p(2), 2.0);
  EXPECT_EQ(s.batch_size(2), 10);
  // c_k = ceil(min{N, Delta} beta_k c / (p_k L)) with Delta = inf.
  for (std::int64_t k = 1; k <= 10; ++k) EXPECT_EQ(s.batch_size(k), static_cast<std::int64_t>(std::ceil(10.0 * k * k / 4.0)));
}

TEST(Schedule, StochasticNeedsPlannedN) {
  ScheduleInputs in = det(1.0, 0.0, 1.0, 1.0);
  in.c = 1.0;
  EXPECT_THROW(build_stochastic(in), ConfigError);
}

TEST(Schedule, RejectsInvalidInputs) {
  EXPECT_THROW(build_deterministic(det(0.0, 0.0, 1.0, 1.0)), ConfigError);
  EXPECT_THROW(build_deterministic(det(1.0, -1.0, 1.0, 1.0)), ConfigError);
  EXPECT_THROW(build_deterministic(det(1.0, 0.0, -1.0, 1.0)), ConfigError);
  EXPECT_THROW(build_deterministic(det(1.0, 0.0, 1.0, 0.0)), ConfigError);
}

TEST(Schedule, InnerIterationsAtLeastOne) {
  const auto s = build_deterministic(det(100.0, 0.0, 1e-3, 1.0));
  EXPECT_EQ(s.inner_iterations(1), 1);
}

TEST(Schedule, ConditionsHoldOnSweep) {
  for (double mu : {0.0, 1e-3, 0.5}) {
    for (double na : {0.1, 4.0, 40.0}) {
      ScheduleInputs in = det(2.0, mu, na, 1.3);
      const auto r = verify_conditions(build_deterministic(in), ScheduleMode::deterministic, 300);
      EXPECT_TRUE(r.all_passed()) << "mu " << mu << " norm " << na;
      in.mode = ScheduleMode::stochastic;
      in.c = 0.5;
      in.N = 300;
      EXPECT_TRUE(verify_conditions(build_stochastic(in), ScheduleMode::stochastic, 300).all_passed());
    }
  }
}

TEST(Schedule, GeometricPhaseDoesNotOverflowValidation) {
  const auto s = build_deterministic(det(1.0, 1.0, 1.0, 1.0));
  const auto r = verify_conditions(s, ScheduleMode::deterministic, 10000);
  EXPECT_TRUE(r.all_passed());
  EXPECT_TRUE(std::isinf(s.beta(10000)));
  EXPECT_TRUE(std::isfinite(s.log_beta(10000)));
}

TEST(Schedule, UndersizedConstantStepsAreReported) {
  const auto s = build_constant(1.0, 2.0, ConstantSteps{1.0, 1.0});
  EXPECT_FALSE(verify_conditions(s, ScheduleMode::deterministic, 5).all_passed());
}

TEST(Schedule, ModeNames) {
  EXPECT_EQ(parse_schedule_mode("stochastic"), ScheduleMode::stochastic);
  EXPECT_THROW(parse_schedule_mode("random"), ConfigError);
}
