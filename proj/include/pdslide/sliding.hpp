#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "pdslide/linear_operator.hpp"
#include "pdslide/metrics.hpp"
#include "pdslide/problem.hpp"
#include "pdslide/schedule.hpp"

namespace pdslide {

/// Dual term h(z) of the coupled problem together with its prox:
/// argmin_{z in Z} h(z) - <a, z> + q/2 ||z - z_prev||^2.
class DualTerm {
 public:
  virtual ~DualTerm() = default;
  virtual void prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const = 0;
  virtual double value(const Vec& z) const = 0;
  /// b when h = <b, .> + (kappa/2)||.||^2; used for the residual ||A x - b||.
  virtual const Vec* offset() const { return nullptr; }
};

/// h = 0 on all of R^p: z_prev + (1/q) a.
class ZeroDual final : public DualTerm {
 public:
  void prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const override;
  double value(const Vec&) const override { return 0.0; }
};

/// h(z) = <b, z>: z_prev + (1/q)(a - b).
class LinearDual final : public DualTerm {
 public:
  explicit LinearDual(Vec b) : b_(std::move(b)) {}
  void prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const override;
  double value(const Vec& z) const override { return b_.dot(z); }
  const Vec* offset() const override { return &b_; }

 private:
  Vec b_;
};

/// h(z) = (kappa/2)||z||^2 + <b, z>, optionally restricted to a set Z.
class QuadraticDual final : public DualTerm {
 public:
  QuadraticDual(double kappa, Vec b, FeasibleSet set = FeasibleSet::whole_space());
  void prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const override;
  double value(const Vec& z) const override;
  const Vec* offset() const override { return &b_; }
  double kappa() const { return kappa_; }

 private:
  double kappa_;
  Vec b_;
  FeasibleSet set_;
};

/// Produces y_k (or the mini-batch estimate v_k) at the stacked point x_under.
class GradientSource {
 public:
  virtual ~GradientSource() = default;
  /// Fills g; updates metrics.gradients / metrics.samples (per agent).
  virtual void evaluate(std::int64_t k, const Vec& x_under, Vec& g, RunMetrics& metrics) = 0;
};

class ExactGradients final : public GradientSource {
 public:
  explicit ExactGradients(const std::vector<LocalObjective>& objs) : objs_(&objs) {}
  void evaluate(std::int64_t k, const Vec& x_under, Vec& g, RunMetrics& metrics) override;

 private:
  const std::vector<LocalObjective>* objs_;
};

/// Batch-c_k averages keyed by (seed, agent, k); independent of agent order.
class MiniBatchGradients final : public GradientSource {
 public:
  MiniBatchGradients(const std::vector<StochasticOracle>& oracles, const ParamSchedule& s, std::uint64_t seed,
                     std::int64_t max_batch = 0);
  void evaluate(std::int64_t k, const Vec& x_under, Vec& g, RunMetrics& metrics) override;

  /// Batch actually used at k (after the optional cap).
  std::int64_t batch(std::int64_t k) const;
  bool capped() const { return capped_; }

 private:
  const std::vector<StochasticOracle>* oracles_;
  const ParamSchedule* s_;
  std::uint64_t seed_;
  std::int64_t max_batch_;
  bool capped_ = false;
};

/// Full iterate set, stacked agent-major (block i is segment(i*d, d)).
struct SolverState {
  std::int64_t k = 0;
  Vec x;          // x_k
  Vec x_prev;     // x_{k-1}
  Vec x_carry;    // x_k^{T_k - 1}
  Vec x_hat;      // \hat x_k
  Vec x_under;    // \underline x_k
  Vec x_tilde;    // \tilde x_k
  Vec y;          // y_k (or v_k)
  Vec z;          // z_k
  Vec z_hat;      // \hat z_k
  Vec x_bar;      // beta-weighted average of \hat x
  Vec y_bar;      // beta-weighted average of y
  Vec z_bar;      // beta-weighted average of \hat z
  double log_beta_sum = -std::numeric_limits<double>::infinity();
};

/// Observation of one inner iteration, after x_k^t is formed.
struct InnerEvent {
  std::int64_t k = 0;
  std::int64_t t = 0;
  const Vec* u = nullptr;
  const Vec* z = nullptr;
  const Vec* x = nullptr;
};

enum class TraceKind { gradient_ready, inner_round };

struct TraceEvent {
  TraceKind kind;
  std::int64_t k;
  std::int64_t t;
};

struct SlidingOptions {
  /// \underline x_0; defaults to x_0.
  std::optional<Vec> x_under0;
  std::optional<Vec> z0;
  /// Evaluate y_0 = grad(\underline x_0) through the source (exact sources only).
  bool evaluate_y0 = true;
  bool record_trajectory = true;
  std::function<void(const InnerEvent&)> on_inner;
  /// Ordered log of gradient-ready and inner-round events.
  std::vector<TraceEvent>* trace = nullptr;
};

/// Network-view sliding engine shared by PDS, SPDS, the saddle solver and the
/// non-sliding baseline. One call to step() is one outer iteration.
class SlidingSolver {
 public:
  SlidingSolver(const std::vector<LocalObjective>& objs, const LinearOperator& op, const ParamSchedule& s,
                const DualTerm& dual, GradientSource& source, const Vec& x0, SlidingOptions options = {});

  void step();
  void run(std::int64_t N) {
    for (std::int64_t i = 0; i < N; ++i) step();
  }

  std::int64_t k() const { return state_.k; }
  const SolverState& state() const { return state_; }
  const RunMetrics& metrics() const { return metrics_; }
  RunMetrics& metrics() { return metrics_; }

  /// Gradient at \underline x_0, computed at construction (y_0).
  const Vec& y0() const { return y0_; }

 private:
  void record_point();
  [[noreturn]] void diverged(std::int64_t t) const;

  const std::vector<LocalObjective>* objs_;
  const LinearOperator* op_;
  const ParamSchedule* s_;
  const DualTerm* dual_;
  GradientSource* source_;
  SlidingOptions options_;
  int d_;
  int m_;

  SolverState state_;
  Vec x_prev2_;  // x_{k-2}
  Vec x_hat_prev_;
  Vec y0_;
  RunMetrics metrics_;
  std::chrono::steady_clock::time_point start_;

  // scratch
  Vec u_, au_, atz_, g_, z_next_, x_next_, x_t1_, x_t2_, x_sum_, z_sum_;
};

/// Checks that objs stack to op.cols() with a common block size; returns d.
int stacked_block_dim(const std::vector<LocalObjective>& objs, const LinearOperator& op);

/// Weight beta_k / sum_{j<=k} beta_j from log quantities; updates log_sum.
double running_weight(double log_beta, double& log_sum);

}  // namespace pdslide
