#include "pdslide/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdslide/error.hpp"

namespace pdslide {

double log_beta_sum(const ParamSchedule& s, std::int64_t N) {
  if (N < 1) throw ConfigError("bounds: N must be >= 1");
  double hi = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 1; k <= N; ++k) hi = std::max(hi, s.log_beta(k));
  double acc = 0.0;
  for (std::int64_t k = 1; k <= N; ++k) acc += std::exp(s.log_beta(k) - hi);
  return hi + std::log(acc);
}

double rate_factor(const ParamSchedule& s, std::int64_t N) {
  const double n = static_cast<double>(N);
  double rate = 2.0 / (n * n);
  if (const auto delta = s.switch_point(); delta && N > *delta)
    rate = std::min(rate, std::pow(s.lambda_limit(), static_cast<double>(N - *delta)));
  return rate;
}

double pds_gap_bound(const ParamSchedule& s, std::int64_t N, double V) {
  return rate_factor(s, N) * 4.0 * s.inputs().lipschitz * V;
}

double pds_feasibility_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V) {
  const auto& in = s.inputs();
  const double z1 = z_norm + 1.0;
  return rate_factor(s, N) * (in.lipschitz * z1 * z1 / (4.0 * in.R * in.R) + 4.0 * in.lipschitz * V);
}

GapCoefficients gap_coefficients(const ParamSchedule& s, std::int64_t N) {
  GapCoefficients c;
  c.weight = std::exp(s.log_beta(1) - log_beta_sum(s, N));
  const double T1 = s.T(1);
  c.dual = s.q(1, 1) / T1;
  c.primal = s.eta(1, 1) / T1 + s.p(1);
  return c;
}

double saddle_gap_bound(const ParamSchedule& s, std::int64_t N, double U, double V) {
  const auto c = gap_coefficients(s, N);
  return c.weight * (c.dual * U + c.primal * V);
}

double constrained_gap_bound(const ParamSchedule& s, std::int64_t N, double V) {
  const auto c = gap_coefficients(s, N);
  return c.weight * c.primal * V;
}

double constrained_residual_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V) {
  const auto c = gap_coefficients(s, N);
  const double z1 = z_norm + 1.0;
  return c.weight * (0.5 * c.dual * z1 * z1 + c.primal * V);
}

double stochastic_noise_term(const ParamSchedule& s, std::int64_t N, double sigma2) {
  if (sigma2 == 0.0) return 0.0;
  const double log_total = log_beta_sum(s, N);
  double acc = 0.0;
  for (std::int64_t k = 1; k <= N; ++k)
    acc += std::exp(s.log_beta(k) - log_total - std::log(s.p(k)) - s.log_batch(k));
  return acc * sigma2;
}

double spds_gap_bound(const ParamSchedule& s, std::int64_t N, double V, double sigma2) {
  // (beta_1 / 2)(...)||x_0 - x*||^2 = beta_1 (...) V
  return constrained_gap_bound(s, N, V) + stochastic_noise_term(s, N, sigma2);
}

double spds_feasibility_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V, double sigma2) {
  return constrained_residual_bound(s, N, z_norm, V) + stochastic_noise_term(s, N, sigma2);
}

}  // namespace pdslide
