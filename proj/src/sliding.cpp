#include "pdslide/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdslide/error.hpp"

namespace pdslide {

// ---- dual terms ----------------------------------------------------------

void ZeroDual::prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const {
  z_out = z_prev + (1.0 / q) * a;
}

void LinearDual::prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const {
  if (a.size() != b_.size()) throw ConfigError("linear dual: b has the wrong dimension");
  z_out = z_prev + (1.0 / q) * (a - b_);
}

QuadraticDual::QuadraticDual(double kappa, Vec b, FeasibleSet set)
    : kappa_(kappa), b_(std::move(b)), set_(std::move(set)) {
  if (!(kappa >= 0.0)) throw ConfigError("quadratic dual: kappa must be >= 0");
  if (!set_.compatible(b_.size())) throw ConfigError("quadratic dual: set dimension mismatch");
}

void QuadraticDual::prox(const Vec& a, const Vec& z_prev, double q, Vec& z_out) const {
  if (a.size() != b_.size()) throw ConfigError("quadratic dual: b has the wrong dimension");
  z_out = (q * z_prev + a - b_) / (kappa_ + q);
  set_.project(z_out);
}

double QuadraticDual::value(const Vec& z) const {
  if (!set_.contains(z, 1e-12)) return std::numeric_limits<double>::infinity();
  return 0.5 * kappa_ * z.squaredNorm() + b_.dot(z);
}

// ---- gradient sources ----------------------------------------------------

void ExactGradients::evaluate(std::int64_t, const Vec& x_under, Vec& g, RunMetrics& metrics) {
  const auto& objs = *objs_;
  const int d = objs.front().dim();
  g.resize(x_under.size());
  OracleCounters counters;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const Eigen::Index off = static_cast<Eigen::Index>(i) * d;
    g.segment(off, d) = grad(objs[i], x_under.segment(off, d), counters);
  }
  metrics.gradients += 1;
}

MiniBatchGradients::MiniBatchGradients(const std::vector<StochasticOracle>& oracles, const ParamSchedule& s,
                                       std::uint64_t seed, std::int64_t max_batch)
    : oracles_(&oracles), s_(&s), seed_(seed), max_batch_(max_batch) {
  if (oracles.empty()) throw ConfigError("mini-batch gradients: no oracles");
  if (max_batch < 0) throw ConfigError("mini-batch gradients: max_batch must be >= 0");
}

std::int64_t MiniBatchGradients::batch(std::int64_t k) const {
  const double c = s_->batch(k);
  if (max_batch_ > 0 && !(c <= static_cast<double>(max_batch_))) return max_batch_;
  return s_->batch_size(k);
}

void MiniBatchGradients::evaluate(std::int64_t k, const Vec& x_under, Vec& g, RunMetrics& metrics) {
  const auto& oracles = *oracles_;
  const int d = oracles.front().objective().dim();
  const std::int64_t c = batch(k);
  if (max_batch_ > 0 && !(s_->batch(k) <= static_cast<double>(max_batch_)) && !capped_) {
    capped_ = true;
    metrics.warnings.push_back("batch size capped at " + std::to_string(max_batch_) + " from k = " +
                               std::to_string(k));
  }
  g.resize(x_under.size());
  OracleCounters counters;
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    const Eigen::Index off = static_cast<Eigen::Index>(i) * d;
    const std::uint64_t key = hash_key(seed_, i, static_cast<std::uint64_t>(k));
    g.segment(off, d) = oracles[i].sample_mean(x_under.segment(off, d), c, key, counters);
  }
  metrics.samples += c;
}

// ---- helpers -------------------------------------------------------------

int stacked_block_dim(const std::vector<LocalObjective>& objs, const LinearOperator& op) {
  if (objs.empty()) throw ConfigError("solver: no objectives");
  const int d = objs.front().dim();
  for (const auto& o : objs)
    if (o.dim() != d) throw ConfigError("solver: objectives must share the block dimension");
  if (op.cols() != static_cast<Eigen::Index>(objs.size()) * d)
    throw ConfigError("solver: operator has " + std::to_string(op.cols()) + " columns but the objectives stack to " +
                      std::to_string(objs.size() * d));
  return d;
}

double running_weight(double log_beta, double& log_sum) {
  if (log_sum == -std::numeric_limits<double>::infinity()) {
    log_sum = log_beta;
    return 1.0;
  }
  const double hi = std::max(log_sum, log_beta);
  log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(log_beta - hi));
  return std::exp(log_beta - log_sum);
}

// ---- engine --------------------------------------------------------------

SlidingSolver::SlidingSolver(const std::vector<LocalObjective>& objs, const LinearOperator& op,
                             const ParamSchedule& s, const DualTerm& dual, GradientSource& source, const Vec& x0,
                             SlidingOptions options)
    : objs_(&objs), op_(&op), s_(&s), dual_(&dual), source_(&source), options_(std::move(options)) {
  d_ = stacked_block_dim(objs, op);
  m_ = static_cast<int>(objs.size());
  if (x0.size() != op.cols()) throw ConfigError("solver: x0 has the wrong dimension");
  if (!x0.allFinite()) throw ConfigError("solver: x0 is not finite");
  for (int i = 0; i < m_; ++i) {
    if (!objs[i].set().contains(x0.segment(static_cast<Eigen::Index>(i) * d_, d_), 1e-12))
      throw ConfigError("solver: x0 block " + std::to_string(i + 1) + " lies outside its feasible set");
  }
  metrics_.agents = m_;
  start_ = std::chrono::steady_clock::now();

  state_.x = x0;
  state_.x_prev = x0;
  state_.x_carry = x0;  // x_1^{-1} = x_0
  state_.x_hat = x0;
  state_.x_under = options_.x_under0 ? *options_.x_under0 : x0;
  if (state_.x_under.size() != x0.size()) throw ConfigError("solver: x_under0 has the wrong dimension");
  state_.x_tilde = x0;
  state_.z = options_.z0 ? *options_.z0 : Vec::Zero(op.rows());
  if (state_.z.size() != op.rows()) throw ConfigError("solver: z0 has the wrong dimension");
  state_.z_hat = state_.z;
  state_.x_bar = x0;
  state_.y_bar = Vec::Zero(x0.size());
  state_.z_bar = state_.z;
  x_prev2_ = x0;
  x_hat_prev_ = x0;
  y0_ = Vec::Zero(x0.size());
  if (options_.evaluate_y0) {
    RunMetrics init;
    source_->evaluate(0, state_.x_under, y0_, init);
    metrics_.init_gradients = init.gradients;
  }
  state_.y = y0_;
}

void SlidingSolver::diverged(std::int64_t t) const {
  throw SolverError("solver diverged: non-finite iterate at k = " + std::to_string(state_.k + 1) +
                    ", t = " + std::to_string(t));
}

void SlidingSolver::step() {
  const std::int64_t k = state_.k + 1;
  const auto& objs = *objs_;
  const auto& s = *s_;

  // x_tilde_k, x_under_k, y_k
  const double lambda = s.lambda(k);
  const double tau = s.tau(k);
  state_.x_tilde = state_.x_prev + lambda * (x_hat_prev_ - x_prev2_);
  state_.x_under = (state_.x_tilde + tau * state_.x_under) / (1.0 + tau);
  source_->evaluate(k, state_.x_under, state_.y, metrics_);
  if (!state_.y.allFinite()) diverged(0);
  if (options_.trace) options_.trace->push_back({TraceKind::gradient_ready, k, 0});

  const std::int64_t T = s.inner_iterations(k);
  const double p = s.p(k);
  x_t1_ = state_.x_prev;   // x_k^{t-1}
  x_t2_ = state_.x_carry;  // x_k^{t-2}
  Vec& z_t = state_.z;
  x_sum_.setZero(state_.x.size());
  z_sum_.setZero(z_t.size());
  x_next_.resize(state_.x.size());

  for (std::int64_t t = 1; t <= T; ++t) {
    const double alpha = s.alpha(k, t);
    u_ = x_t1_ + alpha * (x_t1_ - x_t2_);
    op_->apply(u_, au_);
    ++metrics_.operator_applies;
    dual_->prox(au_, z_t, s.q(k, t), z_next_);
    z_t.swap(z_next_);
    op_->apply_adjoint(z_t, atz_);
    ++metrics_.adjoint_applies;
    g_ = state_.y + atz_;
    const double eta = s.eta(k, t);
    for (int i = 0; i < m_; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * d_;
      x_next_.segment(off, d_) =
          prox_step(objs[i], g_.segment(off, d_), x_t1_.segment(off, d_), state_.x_prev.segment(off, d_), eta, p);
    }
    if (!x_next_.allFinite() || !z_t.allFinite()) diverged(t);
    x_t2_.swap(x_t1_);
    x_t1_.swap(x_next_);
    x_sum_ += x_t1_;
    z_sum_ += z_t;
    metrics_.rounds += 2;
    ++metrics_.inner_iterations;
    if (options_.trace) options_.trace->push_back({TraceKind::inner_round, k, t});
    if (options_.on_inner) options_.on_inner({k, t, &u_, &z_t, &x_t1_});
  }

  x_prev2_ = state_.x_prev;
  x_hat_prev_ = x_sum_ / static_cast<double>(T);
  state_.x_hat = x_hat_prev_;
  state_.z_hat = z_sum_ / static_cast<double>(T);
  state_.x = x_t1_;
  state_.x_carry = x_t2_;
  state_.x_prev = state_.x;
  state_.k = k;

  const double w = running_weight(s.log_beta(k), state_.log_beta_sum);
  state_.x_bar += w * (state_.x_hat - state_.x_bar);
  state_.y_bar += w * (state_.y - state_.y_bar);
  state_.z_bar += w * (state_.z_hat - state_.z_bar);
  ++metrics_.outer_iterations;
  metrics_.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  if (options_.record_trajectory) record_point();
}

void SlidingSolver::record_point() {
  TrajectoryPoint pt;
  pt.k = state_.k;
  pt.gradients = metrics_.gradients;
  pt.rounds = metrics_.rounds;
  pt.samples = metrics_.samples;
  pt.loss = stacked_value(*objs_, state_.x_bar);
  pt.consensus_loss = consensus_value(*objs_, state_.x_bar);
  Vec ax = op_->apply(state_.x_bar);
  if (const Vec* b = dual_->offset()) ax -= *b;
  pt.feasibility = ax.norm();
  pt.elapsed_ms = metrics_.elapsed_ms;
  metrics_.trajectory.push_back(pt);
}

}  // namespace pdslide
