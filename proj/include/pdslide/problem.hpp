#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "pdslide/dataset.hpp"
#include "pdslide/linear_operator.hpp"
#include "pdslide/rng.hpp"

namespace pdslide {

/// Closed convex set X^(i): all of R^d, a box, or a Euclidean ball.
class FeasibleSet {
 public:
  enum class Kind { whole_space, box, ball };

  static FeasibleSet whole_space() { return FeasibleSet(); }
  static FeasibleSet box(Vec lo, Vec hi);
  static FeasibleSet box(int d, double lo, double hi);
  static FeasibleSet ball(Vec center, double radius);

  Kind kind() const { return kind_; }
  const Vec& lower() const { return a_; }
  const Vec& upper() const { return b_; }
  const Vec& center() const { return a_; }
  double radius() const { return radius_; }

  /// Euclidean projection, in place.
  void project(Eigen::Ref<Vec> x) const;
  double distance(const Vec& x) const;
  bool contains(const Vec& x, double tol = 0.0) const;

  /// Dimension constraint; whole_space accepts any.
  bool compatible(Eigen::Index d) const;

  friend bool operator==(const FeasibleSet& a, const FeasibleSet& b);

 private:
  Kind kind_ = Kind::whole_space;
  Vec a_;
  Vec b_;
  double radius_ = 0.0;
};

/// Smooth convex part f~_i with an L~-Lipschitz gradient.
class SmoothTerm {
 public:
  virtual ~SmoothTerm() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual void gradient(const Vec& x, Vec& g) const = 0;
  virtual double lipschitz() const = 0;
  /// Convex conjugate f~*(y) when it has a closed form; nullopt otherwise.
  /// Throws ConfigError when y is outside dom f~*.
  virtual std::optional<double> conjugate(const Vec& y) const;
};

/// f~(x) = 1/2 x^T diag(q) x + b^T x.
class DiagonalQuadratic final : public SmoothTerm {
 public:
  DiagonalQuadratic(Vec q_diag, Vec b);

  int dim() const override { return static_cast<int>(q_.size()); }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> conjugate(const Vec& y) const override;

  const Vec& q_diag() const { return q_; }
  const Vec& linear() const { return b_; }

 private:
  Vec q_;
  Vec b_;
  double lipschitz_;
};

enum class LipschitzEstimate { trace, spectral };

/// f~(w) = sum_j log(1 + exp(-y_j <w, a_j>)) over the rows of a shard.
class LogisticLoss final : public SmoothTerm {
 public:
  LogisticLoss(DataShard shard, LipschitzEstimate estimate = LipschitzEstimate::trace);

  int dim() const override { return shard_.feature_dim; }
  double value(const Vec& w) const override;
  void gradient(const Vec& w, Vec& g) const override;
  double lipschitz() const override { return lipschitz_; }

  /// Gradient of the single-row loss, for data-subsampling oracles.
  void row_gradient(std::size_t row, const Vec& w, Vec& g) const;
  const DataShard& shard() const { return shard_; }

 private:
  double margin(std::size_t row, const Vec& w) const;

  DataShard shard_;
  double lipschitz_;
};

/// f_i = f~_i + mu * nu_i with nu_i = 1/2 ||.||_2^2, over X^(i).
class LocalObjective {
 public:
  LocalObjective(std::shared_ptr<const SmoothTerm> smooth, double mu, FeasibleSet set);

  int dim() const { return smooth_->dim(); }
  double mu() const { return mu_; }
  double lipschitz() const { return smooth_->lipschitz(); }
  const SmoothTerm& smooth() const { return *smooth_; }
  std::shared_ptr<const SmoothTerm> smooth_ptr() const { return smooth_; }
  const FeasibleSet& set() const { return set_; }

  /// f_i(x) = f~_i(x) + mu/2 ||x||^2.
  double value(const Vec& x) const;
  /// Gradient of the smooth part only. Does not touch any counter.
  void smooth_gradient(const Vec& x, Vec& g) const { smooth_->gradient(x, g); }

 private:
  std::shared_ptr<const SmoothTerm> smooth_;
  double mu_;
  FeasibleSet set_;
};

LocalObjective quadratic_objective(Vec q_diag, Vec b, double mu, FeasibleSet set = FeasibleSet::whole_space());
LocalObjective logistic_objective(DataShard shard, double mu, LipschitzEstimate estimate = LipschitzEstimate::trace);

/// Per-run oracle counters, owned by solvers.
struct OracleCounters {
  std::int64_t gradients = 0;
  std::int64_t samples = 0;
};

/// Exact gradient of f~_i; bumps counters.gradients.
Vec grad(const LocalObjective& obj, const Vec& x, OracleCounters& counters);

/// Unbiased stochastic first-order oracle G_i(x, xi) for one agent.
class StochasticOracle {
 public:
  enum class Noise { additive_gaussian, data_subsampling };

  /// Additive N(0, sigma^2 / d I) noise, so E||G - grad||^2 = sigma^2.
  static StochasticOracle gaussian(LocalObjective obj, double sigma);
  /// One uniformly drawn row, scaled by the row count (sum-form logistic only).
  static StochasticOracle subsampling(LocalObjective obj);

  const LocalObjective& objective() const { return obj_; }
  Noise noise() const { return noise_; }
  double sigma() const { return sigma_; }

  /// Mean of `batch` draws at x from the counter-based stream `key`; bumps
  /// counters.samples by batch. With sigma = 0 returns grad bit for bit.
  Vec sample_mean(const Vec& x, std::int64_t batch, std::uint64_t key, OracleCounters& counters) const;

 private:
  StochasticOracle(LocalObjective obj, Noise noise, double sigma);

  LocalObjective obj_;
  Noise noise_;
  double sigma_;
  const LogisticLoss* logistic_ = nullptr;
};

/// argmin_{x in X} mu/2||x||^2 + <g, x> + eta/2 ||x - anchor_t||^2 + p/2 ||x - anchor_k||^2,
/// i.e. the projection of (eta anchor_t + p anchor_k - g) / (mu + eta + p).
Vec prox_step(const LocalObjective& obj, const Vec& g, const Vec& anchor_t, const Vec& anchor_k, double eta,
              double p);

struct CentralizedSolution {
  Vec x;
  double value = 0.0;
  std::int64_t iterations = 0;
};

/// Minimizes sum_i f_i over the shared X by accelerated projected gradient
/// with backtracking and adaptive restart, until the gradient-mapping norm
/// drops below tol.
CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objs, double tol,
                                      std::int64_t max_iterations = 2'000'000);

/// The uniform constants the schedules assume: the largest L~_i and the
/// smallest mu_i.
double uniform_lipschitz(const std::vector<LocalObjective>& objs);
double uniform_mu(const std::vector<LocalObjective>& objs);

/// f(x) = sum_i f_i(x^(i)) for a stacked vector of m blocks.
double stacked_value(const std::vector<LocalObjective>& objs, const Vec& x);
/// Sum_i f_i evaluated at the mean of the agent blocks.
double consensus_value(const std::vector<LocalObjective>& objs, const Vec& x);
Vec block_mean(const Vec& x, int m);

}  // namespace pdslide
