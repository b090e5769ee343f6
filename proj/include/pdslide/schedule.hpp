#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdslide/json_fwd.hpp"

namespace pdslide {

enum class ScheduleMode { deterministic, stochastic };

ScheduleMode parse_schedule_mode(std::string_view name);
std::string_view to_string(ScheduleMode mode);

/// Global constants feeding the parameter schedules.
struct ScheduleInputs {
  double lipschitz = 1.0;  // L~
  double mu = 0.0;
  double sigma = 0.0;
  double op_norm = 0.0;  // ||A||
  double R = 1.0;
  double c = 0.0;                     // stochastic batch constant
  std::optional<std::int64_t> N;      // required in stochastic mode
  ScheduleMode mode = ScheduleMode::deterministic;

  void validate() const;
};

/// Fixed steps for the non-sliding reference method (T_k = 1, one gradient per round).
struct ConstantSteps {
  double eta = 1.0;
  double q = 1.0;
};

/// Every per-iteration scalar of the sliding schedules, evaluated lazily from
/// closed forms. Quantities that grow geometrically once k passes the switch
/// point (beta_k, T_k, c_k) are also available as logarithms so that
/// validation never overflows; the linear accessors return +inf past double
/// range.
class ParamSchedule {
 public:
  enum class Kind { deterministic, stochastic, constant };

  Kind kind() const { return kind_; }
  const ScheduleInputs& inputs() const { return in_; }

  /// Delta; nullopt stands for +infinity (mu = 0, or the constant schedule).
  std::optional<std::int64_t> switch_point() const { return delta_; }
  /// Limiting tau and lambda for mu > 0 (0 otherwise).
  double tau_limit() const { return tau_; }
  double lambda_limit() const { return lambda_; }

  double tau(std::int64_t k) const;
  double lambda(std::int64_t k) const;
  double beta(std::int64_t k) const;
  double log_beta(std::int64_t k) const;
  double p(std::int64_t k) const;
  /// T_k as a double (integer valued while finite).
  double T(std::int64_t k) const;
  double log_T(std::int64_t k) const;
  /// T_k as an integer; throws SolverError if it does not fit.
  std::int64_t inner_iterations(std::int64_t k) const;
  double eta(std::int64_t k, std::int64_t t) const;
  double log_eta(std::int64_t k, std::int64_t t) const;
  double q(std::int64_t k, std::int64_t t) const;
  double log_q(std::int64_t k, std::int64_t t) const;
  double alpha(std::int64_t k, std::int64_t t) const;
  double log_alpha(std::int64_t k, std::int64_t t) const;
  /// Mini-batch size c_k (stochastic schedules; 1 otherwise).
  double batch(std::int64_t k) const;
  double log_batch(std::int64_t k) const;
  std::int64_t batch_size(std::int64_t k) const;

  /// Per-k table for k = 1..N, for debugging dumps.
  nlohmann::json table(std::int64_t N) const;

  friend ParamSchedule build_deterministic(const ScheduleInputs& in);
  friend ParamSchedule build_stochastic(const ScheduleInputs& in);
  friend ParamSchedule build_constant(double lipschitz, double op_norm, const ConstantSteps& steps);

 private:
  ParamSchedule() = default;
  bool before_switch(std::int64_t k) const { return !delta_ || k <= *delta_; }
  double log_T_raw(std::int64_t k) const;
  double log_batch_raw(std::int64_t k) const;

  Kind kind_ = Kind::deterministic;
  ScheduleInputs in_;
  std::optional<std::int64_t> delta_;
  double tau_ = 0.0;
  double lambda_ = 0.0;
  ConstantSteps steps_;
};

/// Parameters guaranteeing the deterministic convergence conditions.
ParamSchedule build_deterministic(const ScheduleInputs& in);
/// Stochastic variant with growing mini-batches; needs in.N.
ParamSchedule build_stochastic(const ScheduleInputs& in);
/// Non-sliding schedule: tau = lambda = p = 0, beta = T = alpha = 1, constant eta and q.
ParamSchedule build_constant(double lipschitz, double op_norm, const ConstantSteps& steps);

struct ConditionOutcome {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t failures = 0;
  double worst_slack = 0.0;  // relative slack; negative means violated
  std::int64_t worst_k = 0;
  std::int64_t worst_t = 0;
  std::int64_t first_failure_k = 0;
};

struct ConditionReport {
  ScheduleMode mode = ScheduleMode::deterministic;
  std::int64_t N = 0;
  std::vector<ConditionOutcome> conditions;

  bool all_passed() const;
  std::int64_t failures() const;
  double worst_slack() const;
  const ConditionOutcome* find(std::string_view name) const;
};

/// Relative tolerance for equality conditions and for the rounding floor of
/// inequalities that hold with equality in exact arithmetic.
inline constexpr double kConditionTolerance = 1e-12;

/// Evaluates every convergence condition for k = 2..N (and t = 2, T_k per k),
/// plus the first/last-iteration conditions. Failures are report entries.
ConditionReport verify_conditions(const ParamSchedule& s, ScheduleMode mode, std::int64_t N);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const ScheduleInputs& in);

}  // namespace pdslide
