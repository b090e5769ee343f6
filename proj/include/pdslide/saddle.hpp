#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pdslide/sliding.hpp"

namespace pdslide {

/// min_{x in X} max_{z in Z} sum_i f_i(x^(i)) + <A x, z> - h(z).
/// A is any linear operator whose columns match the stacked primal blocks.
struct SaddleProblem {
  std::vector<LocalObjective> primal;
  std::shared_ptr<const LinearOperator> op;
  std::shared_ptr<const DualTerm> dual = std::make_shared<ZeroDual>();
};

struct SaddleResult {
  Vec x_bar;
  Vec y_bar;
  Vec z_bar;
  SolverState state;
  RunMetrics metrics;
};

/// Runs the generalized sliding method with the h-prox dual step. y0 only
/// enters through tau_1 W(y_0, .), and tau_1 = 0 for every shipped schedule,
/// so it is checked for shape and otherwise unused.
SaddleResult saddle_run(const SaddleProblem& p, const ParamSchedule& s, std::int64_t N, const Vec& x0,
                        const Vec& y0, const Vec& z0, SlidingOptions options = {});

/// Candidate wbar = (xbar, ybar, zbar) and probe w = (x, y, z).
struct GapProbe {
  Vec x_bar, y_bar, z_bar;
  Vec x, y, z;
};

struct GapValue {
  double value = 0.0;
  /// True when the value is the objective gap f(xbar) - f* instead of Q.
  bool surrogate = false;
};

/// Q(wbar, w) when every f~_i has a closed-form conjugate; otherwise the
/// objective-gap surrogate, which needs f_star. Throws ConfigError when a
/// probe y lies outside dom f~*.
GapValue gap_estimate(const GapProbe& probe, const SaddleProblem& p, std::optional<double> f_star = std::nullopt);

struct KktSolution {
  Vec x;
  Vec z;
  double value = 0.0;
};

/// Dense KKT solve of min sum_i f_i s.t. A x = b for diagonal quadratics on
/// the whole space. z is the minimum-norm multiplier of f + <A x - b, z>.
KktSolution kkt_reference(const std::vector<LocalObjective>& f, const LinearOperator& A, const Vec& b);

struct ConstrainedResult {
  Vec x_bar;
  double f_gap = 0.0;
  double residual = 0.0;  // ||A xbar - b||
  double f_star = 0.0;
  RunMetrics metrics;
};

/// min f(x) s.t. A x = b via h = <b, .>, z_0 = 0. The reference optimum is
/// f_star when given, otherwise kkt_reference.
ConstrainedResult constrained_solve(const std::vector<LocalObjective>& f, std::shared_ptr<const LinearOperator> A,
                                    const Vec& b, const ParamSchedule& s, std::int64_t N, const Vec& x0,
                                    std::optional<double> f_star = std::nullopt);

}  // namespace pdslide
