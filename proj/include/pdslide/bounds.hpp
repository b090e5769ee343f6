#pragma once

#include <cstdint>

#include "pdslide/schedule.hpp"

// Right-hand sides of the convergence guarantees, evaluated from a schedule.
// V = V(x_0, x*) and U = U(z_0, z) are Euclidean half squared distances over
// the stacked vectors.

namespace pdslide {

/// log sum_{k=1}^N beta_k.
double log_beta_sum(const ParamSchedule& s, std::int64_t N);

/// min{2/N^2, lambda^(N - Delta)} (the second term only when mu > 0).
double rate_factor(const ParamSchedule& s, std::int64_t N);

/// f(xbar_N) - f* <= rate * 4 L V.
double pds_gap_bound(const ParamSchedule& s, std::int64_t N, double V);
/// ||A xbar_N|| <= rate * [L (||z*|| + 1)^2 / (4 R^2) + 4 L V].
double pds_feasibility_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V);

/// The two factors of the generic gap estimate:
/// weight = beta_1 / sum beta, dual = q_1^1 / T_1, primal = eta_1^1 / T_1 + p_1.
struct GapCoefficients {
  double weight = 0.0;
  double dual = 0.0;
  double primal = 0.0;
};
GapCoefficients gap_coefficients(const ParamSchedule& s, std::int64_t N);

/// Q(wbar_N, w) <= weight * (dual U + primal V).
double saddle_gap_bound(const ParamSchedule& s, std::int64_t N, double U, double V);
/// Constrained specialization with z_0 = 0: f-gap <= weight * primal * V.
double constrained_gap_bound(const ParamSchedule& s, std::int64_t N, double V);
/// ||A xbar - b|| <= weight * (dual/2 (||z*|| + 1)^2 + primal V).
double constrained_residual_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V);

/// sum_k beta_k sigma^2 / (p_k c_k) / sum beta, with the network variance sigma2.
double stochastic_noise_term(const ParamSchedule& s, std::int64_t N, double sigma2);
/// E[f(xbar_N)] - f* <= (sum beta)^{-1}[beta_1 primal V + sum beta_k sigma^2/(p_k c_k)].
double spds_gap_bound(const ParamSchedule& s, std::int64_t N, double V, double sigma2);
/// E||A xbar_N|| bound; adds beta_1 q_1^1/(2 T_1) (||z*|| + 1)^2.
double spds_feasibility_bound(const ParamSchedule& s, std::int64_t N, double z_norm, double V, double sigma2);

}  // namespace pdslide
