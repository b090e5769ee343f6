#include "pdslide/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdslide/error.hpp"

namespace pdslide {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this log-magnitude the linear closed form is evaluated directly, so
// ceilings see the exact formula rather than exp(log(.)).
constexpr double kLinearLogLimit = 50.0;
constexpr double kOverflowLog = 700.0;

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

double log_sum_exp(std::initializer_list<double> terms) {
  double hi = -kInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

/// log(exp(log_v) - a) for exp(log_v) >= a >= 0.
double log_minus(double log_v, double a) {
  if (a == 0.0) return log_v;
  if (log_v < kLinearLogLimit) return safe_log(std::exp(log_v) - a);
  return log_v + std::log1p(-a * std::exp(-log_v));
}

}  // namespace

ScheduleMode parse_schedule_mode(std::string_view name) {
  if (name == "deterministic") return ScheduleMode::deterministic;
  if (name == "stochastic") return ScheduleMode::stochastic;
  throw ConfigError("unknown schedule mode '" + std::string(name) + "'");
}

std::string_view to_string(ScheduleMode mode) {
  return mode == ScheduleMode::deterministic ? "deterministic" : "stochastic";
}

void ScheduleInputs::validate() const {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw ConfigError("schedule: L must be positive and finite");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("schedule: mu must be >= 0");
  if (!(sigma >= 0.0)) throw ConfigError("schedule: sigma must be >= 0");
  if (!(op_norm >= 0.0) || !std::isfinite(op_norm)) throw ConfigError("schedule: ||A|| must be >= 0");
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("schedule: R must be positive");
  if (mode == ScheduleMode::stochastic) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("schedule: c must be positive in stochastic mode");
    if (!N) throw ConfigError("schedule: stochastic mode needs the planned outer iteration count N");
  }
  if (N && *N < 1) throw ConfigError("schedule: N must be >= 1");
}

// ---- builders ------------------------------------------------------------

ParamSchedule build_deterministic(const ScheduleInputs& in) {
  ScheduleInputs checked = in;
  checked.mode = ScheduleMode::deterministic;
  checked.validate();
  ParamSchedule s;
  s.kind_ = ParamSchedule::Kind::deterministic;
  s.in_ = checked;
  if (checked.mu > 0.0) {
    s.tau_ = std::sqrt(2.0 * checked.lipschitz / checked.mu);
    s.lambda_ = s.tau_ / (1.0 + s.tau_);
    s.delta_ = static_cast<std::int64_t>(std::ceil(2.0 * s.tau_ + 1.0));
  }
  return s;
}

ParamSchedule build_stochastic(const ScheduleInputs& in) {
  ScheduleInputs checked = in;
  checked.mode = ScheduleMode::stochastic;
  checked.validate();
  ParamSchedule s;
  s.kind_ = ParamSchedule::Kind::stochastic;
  s.in_ = checked;
  if (checked.mu > 0.0) {
    s.tau_ = 2.0 * std::sqrt(checked.lipschitz / checked.mu);
    s.lambda_ = s.tau_ / (1.0 + s.tau_);
    s.delta_ = static_cast<std::int64_t>(std::ceil(2.0 * s.tau_ + 1.0));
  }
  return s;
}

ParamSchedule build_constant(double lipschitz, double op_norm, const ConstantSteps& steps) {
  if (!(steps.eta > 0.0) || !(steps.q > 0.0)) throw ConfigError("constant schedule: eta and q must be positive");
  ParamSchedule s;
  s.kind_ = ParamSchedule::Kind::constant;
  s.in_.lipschitz = lipschitz;
  s.in_.op_norm = op_norm;
  s.steps_ = steps;
  return s;
}

// ---- accessors -----------------------------------------------------------

double ParamSchedule::tau(std::int64_t k) const {
  if (kind_ == Kind::constant) return 0.0;
  return before_switch(k) ? 0.5 * static_cast<double>(k - 1) : tau_;
}

double ParamSchedule::lambda(std::int64_t k) const {
  if (kind_ == Kind::constant) return 0.0;
  return before_switch(k) ? static_cast<double>(k - 1) / static_cast<double>(k) : lambda_;
}

double ParamSchedule::log_beta(std::int64_t k) const {
  if (kind_ == Kind::constant) return 0.0;
  if (before_switch(k)) return std::log(static_cast<double>(k));
  return std::log(static_cast<double>(*delta_)) - static_cast<double>(k - *delta_) * std::log(lambda_);
}

double ParamSchedule::beta(std::int64_t k) const {
  if (kind_ == Kind::constant) return 1.0;
  if (before_switch(k)) return static_cast<double>(k);
  const double exponent = static_cast<double>(k - *delta_);
  if (-exponent * std::log(lambda_) > kOverflowLog) return kInf;
  return static_cast<double>(*delta_) * std::pow(lambda_, -exponent);
}

double ParamSchedule::p(std::int64_t k) const {
  const double L = in_.lipschitz;
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::deterministic:
      return before_switch(k) ? 2.0 * L / static_cast<double>(k) : L / (1.0 + tau_);
    case Kind::stochastic:
      return before_switch(k) ? 4.0 * L / static_cast<double>(k) : 2.0 * L / (1.0 + tau_);
  }
  return 0.0;
}

double ParamSchedule::log_T_raw(std::int64_t k) const {
  const double scale = in_.R * in_.op_norm / in_.lipschitz;
  if (before_switch(k)) return safe_log(static_cast<double>(k) * scale);
  return safe_log(2.0 * (1.0 + tau_) * scale) - 0.5 * static_cast<double>(k - *delta_) * std::log(lambda_);
}

double ParamSchedule::T(std::int64_t k) const {
  if (kind_ == Kind::constant) return 1.0;
  const double raw_log = log_T_raw(k);
  if (raw_log >= kLinearLogLimit) return raw_log > kOverflowLog ? kInf : std::exp(raw_log);
  const double scale = in_.R * in_.op_norm / in_.lipschitz;
  double x = 0.0;
  if (before_switch(k)) {
    x = static_cast<double>(k) * scale;
  } else {
    x = 2.0 * (1.0 + tau_) * scale / std::pow(lambda_, 0.5 * static_cast<double>(k - *delta_));
  }
  // A zero operator would give T_k = 0; one inner pass keeps the x-update alive.
  return std::max(1.0, std::ceil(x));
}

double ParamSchedule::log_T(std::int64_t k) const {
  if (kind_ == Kind::constant) return 0.0;
  const double raw_log = log_T_raw(k);
  if (raw_log >= kLinearLogLimit) return raw_log;
  return std::log(T(k));
}

std::int64_t ParamSchedule::inner_iterations(std::int64_t k) const {
  const double t = T(k);
  if (!(t < 9.0e15)) throw SolverError("schedule: T_" + std::to_string(k) + " is too large to execute");
  return static_cast<std::int64_t>(t);
}

double ParamSchedule::eta(std::int64_t k, std::int64_t t) const {
  if (kind_ == Kind::constant) return steps_.eta;
  const double pk = p(k);
  return (pk + in_.mu) * static_cast<double>(t - 1) + pk * T(k);
}

double ParamSchedule::log_eta(std::int64_t k, std::int64_t t) const {
  if (kind_ == Kind::constant) return std::log(steps_.eta);
  const double pk = p(k);
  return log_sum_exp({safe_log(pk + in_.mu) + safe_log(static_cast<double>(t - 1)), safe_log(pk) + log_T(k)});
}

double ParamSchedule::log_q(std::int64_t k, std::int64_t) const {
  if (kind_ == Kind::constant) return std::log(steps_.q);
  const double denom = kind_ == Kind::deterministic ? 2.0 : 4.0;
  return std::log(in_.lipschitz) + log_T(k) - std::log(denom) - log_beta(k) - 2.0 * std::log(in_.R);
}

double ParamSchedule::q(std::int64_t k, std::int64_t t) const {
  if (kind_ == Kind::constant) return steps_.q;
  const double b = beta(k);
  const double tk = T(k);
  if (std::isfinite(b) && std::isfinite(tk)) {
    const double denom = kind_ == Kind::deterministic ? 2.0 : 4.0;
    return in_.lipschitz * tk / (denom * b * in_.R * in_.R);
  }
  return std::exp(log_q(k, t));
}

double ParamSchedule::log_alpha(std::int64_t k, std::int64_t t) const {
  if (kind_ == Kind::constant || k < 2 || t != 1) return 0.0;
  return log_beta(k - 1) + log_T(k) - log_beta(k) - log_T(k - 1);
}

double ParamSchedule::alpha(std::int64_t k, std::int64_t t) const {
  if (kind_ == Kind::constant || k < 2 || t != 1) return 1.0;
  const double b0 = beta(k - 1);
  const double b1 = beta(k);
  const double t0 = T(k - 1);
  const double t1 = T(k);
  if (std::isfinite(b1) && std::isfinite(t1)) return (b0 * t1) / (b1 * t0);
  return std::exp(log_alpha(k, t));
}

double ParamSchedule::log_batch_raw(std::int64_t k) const {
  const double L = in_.lipschitz;
  const double n = static_cast<double>(*in_.N);
  if (before_switch(k)) {
    const double horizon = delta_ ? std::min(n, static_cast<double>(*delta_)) : n;
    return std::log(horizon) + log_beta(k) + std::log(in_.c) - std::log(p(k) * L);
  }
  const double delta = static_cast<double>(*delta_);
  return 2.0 * std::log1p(tau_) + std::log(delta) + std::log(in_.c) - 2.0 * std::log(L) -
         0.5 * (static_cast<double>(k) + n - 2.0 * delta) * std::log(lambda_);
}

double ParamSchedule::batch(std::int64_t k) const {
  if (kind_ != Kind::stochastic) return 1.0;
  const double raw_log = log_batch_raw(k);
  if (raw_log >= kLinearLogLimit) return raw_log > kOverflowLog ? kInf : std::exp(raw_log);
  const double L = in_.lipschitz;
  const double n = static_cast<double>(*in_.N);
  double x = 0.0;
  if (before_switch(k)) {
    const double horizon = delta_ ? std::min(n, static_cast<double>(*delta_)) : n;
    x = horizon * beta(k) * in_.c / (p(k) * L);
  } else {
    const double delta = static_cast<double>(*delta_);
    x = (1.0 + tau_) * (1.0 + tau_) * delta * in_.c /
        (L * L * std::pow(lambda_, 0.5 * (static_cast<double>(k) + n - 2.0 * delta)));
  }
  return std::max(1.0, std::ceil(x));
}

double ParamSchedule::log_batch(std::int64_t k) const {
  if (kind_ != Kind::stochastic) return 0.0;
  const double raw_log = log_batch_raw(k);
  if (raw_log >= kLinearLogLimit) return raw_log;
  return std::log(batch(k));
}

std::int64_t ParamSchedule::batch_size(std::int64_t k) const {
  const double c = batch(k);
  if (!(c < 9.0e15)) throw SolverError("schedule: c_" + std::to_string(k) + " is too large to execute");
  return static_cast<std::int64_t>(c);
}

nlohmann::json ParamSchedule::table(std::int64_t N) const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::int64_t k = 1; k <= N; ++k) {
    nlohmann::json row = {{"k", k},         {"tau", tau(k)}, {"lambda", lambda(k)}, {"log_beta", log_beta(k)},
                          {"p", p(k)},      {"log_T", log_T(k)}, {"alpha_1", alpha(k, 1)},
                          {"q", q(k, 1)},   {"eta_1", eta(k, 1)}};
    const double b = beta(k);
    const double t = T(k);
    row["beta"] = std::isfinite(b) ? nlohmann::json(b) : nlohmann::json(nullptr);
    row["T"] = std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr);
    if (kind_ == Kind::stochastic) {
      const double c = batch(k);
      row["c"] = std::isfinite(c) ? nlohmann::json(c) : nlohmann::json(nullptr);
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json out = {{"inputs", to_json(in_)}, {"rows", rows}};
  out["delta"] = delta_ ? nlohmann::json(*delta_) : nlohmann::json("inf");
  return out;
}

// ---- validator -----------------------------------------------------------

namespace {

/// Tracks one named condition across (k, t).
class ConditionTracker {
 public:
  explicit ConditionTracker(std::string name) { out_.name = std::move(name); out_.worst_slack = kInf; }

  /// exp(log_lhs) <= exp(log_rhs), to rounding relative to the log magnitude.
  void less_equal(double log_lhs, double log_rhs, std::int64_t k, std::int64_t t) {
    record(relative_slack(log_lhs, log_rhs), tolerance(log_lhs, log_rhs), false, k, t);
  }

  void equal(double log_lhs, double log_rhs, std::int64_t k, std::int64_t t) {
    record(relative_slack(log_lhs, log_rhs), tolerance(log_lhs, log_rhs), true, k, t);
  }

  ConditionOutcome finish() {
    if (out_.checked == 0) out_.worst_slack = 0.0;
    return out_;
  }

 private:
  static double relative_slack(double l, double r) {
    if (l == -kInf && r == -kInf) return 0.0;
    if (l == r) return 0.0;
    if (r >= l) return -std::expm1(l - r);  // (R - L) / R
    return std::expm1(r - l);               // (R - L) / L, negative
  }

  static double tolerance(double l, double r) {
    double scale = 1.0;
    if (std::isfinite(l)) scale = std::max(scale, std::abs(l));
    if (std::isfinite(r)) scale = std::max(scale, std::abs(r));
    return kConditionTolerance * scale;
  }

  void record(double slack, double tol, bool equality, std::int64_t k, std::int64_t t) {
    ++out_.checked;
    const bool ok = equality ? std::abs(slack) <= tol : slack >= -tol;
    const double reported = equality ? -std::abs(slack) : slack;
    if (reported < out_.worst_slack) {
      out_.worst_slack = reported;
      out_.worst_k = k;
      out_.worst_t = t;
    }
    if (!ok) {
      if (out_.failures == 0) out_.first_failure_k = k;
      ++out_.failures;
    }
  }

  ConditionOutcome out_;
};

}  // namespace

ConditionReport verify_conditions(const ParamSchedule& s, ScheduleMode mode, std::int64_t N) {
  if (N < 1) throw ConfigError("verify_conditions: N must be >= 1");
  const auto& in = s.inputs();
  const double log_L = std::log(in.lipschitz);
  const double log_mu = safe_log(in.mu);
  const double log_norm2 = 2.0 * safe_log(in.op_norm);
  const double lipschitz_factor = mode == ScheduleMode::stochastic ? std::log(2.0) : 0.0;

  // log eta_k^t with t - 1 = exp(log_tm1)
  auto log_eta_at = [&](std::int64_t k, double log_tm1) {
    const double pk = s.p(k);
    if (s.kind() == ParamSchedule::Kind::constant) return s.log_eta(k, 1);
    return log_sum_exp({safe_log(pk + in.mu) + log_tm1, safe_log(pk) + s.log_T(k)});
  };
  auto log_eta_last = [&](std::int64_t k) { return log_eta_at(k, log_minus(s.log_T(k), 1.0)); };

  ConditionTracker beta_tau("beta_tau_monotone");
  ConditionTracker beta_lambda("beta_lambda_equality");
  ConditionTracker lip_lambda("lipschitz_lambda");
  ConditionTracker alpha_eq("alpha_equality");
  ConditionTracker alpha_norm("alpha_norm");
  ConditionTracker q_trans("q_transition");
  ConditionTracker eta_trans("eta_transition");
  ConditionTracker alpha_unit("alpha_inner_unit");
  ConditionTracker norm_inner("norm_inner");
  ConditionTracker q_inner("q_inner_monotone");
  ConditionTracker eta_inner("eta_inner_growth");
  ConditionTracker tau_first("tau_first");
  ConditionTracker p_last("p_last");
  ConditionTracker norm_last("norm_last");

  for (std::int64_t k = 2; k <= N; ++k) {
    const double lb = s.log_beta(k);
    const double lb0 = s.log_beta(k - 1);
    const double lT = s.log_T(k);
    const double lT0 = s.log_T(k - 1);
    const double la = s.log_alpha(k, 1);

    beta_tau.less_equal(lb + safe_log(s.tau(k)), lb0 + std::log1p(s.tau(k - 1)), k, 1);
    beta_lambda.equal(lb0, lb + safe_log(s.lambda(k)), k, 1);
    lip_lambda.less_equal(lipschitz_factor + log_L + safe_log(s.lambda(k)), safe_log(s.p(k - 1)) + safe_log(s.tau(k)),
                          k, 1);
    alpha_eq.equal(lb + lT0 + la, lb0 + lT, k, 1);
    const double leta_prev_last = log_eta_last(k - 1);
    alpha_norm.less_equal(la + log_norm2, leta_prev_last + s.log_q(k, 1), k, 1);
    q_trans.less_equal(lb + lT0 + s.log_q(k, 1), lb0 + lT + s.log_q(k - 1, 1), k, 1);
    const double lhs_inner = log_sum_exp({s.log_eta(k, 1), safe_log(s.p(k)) + lT});
    const double rhs_inner = log_sum_exp({log_mu, leta_prev_last, safe_log(s.p(k - 1))});
    eta_trans.less_equal(lb + lT0 + lhs_inner, lb0 + lT + rhs_inner, k, 1);
  }

  for (std::int64_t k = 1; k <= N; ++k) {
    const double lT = s.log_T(k);
    if (lT < std::log(2.0) - 1e-12) continue;  // T_k = 1: no t >= 2
    // t = 2 and t = T_k bracket the affine eta and constant q.
    struct Probe {
      std::int64_t t;
      double log_tm1;  // log(t - 1)
      double log_tm2;  // log(t - 2)
    };
    const Probe probes[] = {{2, 0.0, -kInf}, {-1, log_minus(lT, 1.0), log_minus(lT, 2.0)}};
    for (const auto& pr : probes) {
      const std::int64_t t_label = pr.t > 0 ? pr.t : (lT < 40.0 ? static_cast<std::int64_t>(s.T(k)) : -1);
      const std::int64_t t_eval = pr.t > 0 ? pr.t : 2;  // alpha and q do not depend on t >= 2
      alpha_unit.equal(s.log_alpha(k, t_eval), 0.0, k, t_label);
      const double leta_prev = log_eta_at(k, pr.log_tm2);
      const double leta = log_eta_at(k, pr.log_tm1);
      norm_inner.less_equal(log_norm2, leta_prev + s.log_q(k, t_eval), k, t_label);
      q_inner.less_equal(s.log_q(k, t_eval), s.log_q(k, t_eval - 1), k, t_label);
      eta_inner.less_equal(leta, log_sum_exp({log_mu, leta_prev, safe_log(s.p(k))}), k, t_label);
    }
  }

  tau_first.equal(safe_log(s.tau(1)), -kInf, 1, 1);
  p_last.less_equal(lipschitz_factor + log_L, safe_log(s.p(N)) + std::log1p(s.tau(N)), N, 1);
  norm_last.less_equal(log_norm2, log_eta_last(N) + s.log_q(N, 1), N, 1);

  ConditionReport report;
  report.mode = mode;
  report.N = N;
  for (auto* c : {&beta_tau, &beta_lambda, &lip_lambda, &alpha_eq, &alpha_norm, &q_trans, &eta_trans, &alpha_unit,
                  &norm_inner, &q_inner, &eta_inner, &tau_first, &p_last, &norm_last})
    report.conditions.push_back(c->finish());
  return report;
}

bool ConditionReport::all_passed() const { return failures() == 0; }

std::int64_t ConditionReport::failures() const {
  std::int64_t total = 0;
  for (const auto& c : conditions) total += c.failures;
  return total;
}

double ConditionReport::worst_slack() const {
  double worst = kInf;
  for (const auto& c : conditions) worst = std::min(worst, c.worst_slack);
  return conditions.empty() ? 0.0 : worst;
}

const ConditionOutcome* ConditionReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json to_json(const ConditionReport& report) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    conds.push_back({{"name", c.name},
                     {"checked", c.checked},
                     {"failures", c.failures},
                     {"passed", c.failures == 0},
                     {"worst_slack", c.worst_slack},
                     {"worst_k", c.worst_k},
                     {"worst_t", c.worst_t},
                     {"first_failure_k", c.first_failure_k}});
  }
  return {{"mode", to_string(report.mode)},
          {"N", report.N},
          {"all_passed", report.all_passed()},
          {"failures", report.failures()},
          {"worst_slack", report.worst_slack()},
          {"tolerance", kConditionTolerance},
          {"conditions", conds}};
}

nlohmann::json to_json(const ScheduleInputs& in) {
  nlohmann::json j = {{"L", in.lipschitz}, {"mu", in.mu},   {"sigma", in.sigma}, {"norm_A", in.op_norm},
                      {"R", in.R},         {"c", in.c},     {"mode", to_string(in.mode)}};
  j["N"] = in.N ? nlohmann::json(*in.N) : nlohmann::json(nullptr);
  return j;
}

}  // namespace pdslide
