#include "pdslide/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdslide/error.hpp"

namespace pdslide {

// ---- FeasibleSet ---------------------------------------------------------

FeasibleSet FeasibleSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw ConfigError("box: bound dimensions differ");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw ConfigError("box: lower bound exceeds upper bound");
  FeasibleSet s;
  s.kind_ = Kind::box;
  s.a_ = std::move(lo);
  s.b_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::box(int d, double lo, double hi) {
  return box(Vec::Constant(d, lo), Vec::Constant(d, hi));
}

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (!(radius >= 0.0)) throw ConfigError("ball: radius must be non-negative");
  FeasibleSet s;
  s.kind_ = Kind::ball;
  s.a_ = std::move(center);
  s.radius_ = radius;
  return s;
}

void FeasibleSet::project(Eigen::Ref<Vec> x) const {
  switch (kind_) {
    case Kind::whole_space:
      return;
    case Kind::box:
      x = x.cwiseMax(a_).cwiseMin(b_);
      return;
    case Kind::ball: {
      const double dist = (x - a_).norm();
      if (dist > radius_) x = a_ + (radius_ / dist) * (x - a_);
      return;
    }
  }
}

double FeasibleSet::distance(const Vec& x) const {
  Vec p = x;
  project(p);
  return (x - p).norm();
}

bool FeasibleSet::contains(const Vec& x, double tol) const { return distance(x) <= tol; }

bool FeasibleSet::compatible(Eigen::Index d) const { return kind_ == Kind::whole_space || a_.size() == d; }

bool operator==(const FeasibleSet& a, const FeasibleSet& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case FeasibleSet::Kind::whole_space: return true;
    case FeasibleSet::Kind::box: return a.a_ == b.a_ && a.b_ == b.b_;
    case FeasibleSet::Kind::ball: return a.a_ == b.a_ && a.radius_ == b.radius_;
  }
  return false;
}

// ---- smooth terms --------------------------------------------------------

std::optional<double> SmoothTerm::conjugate(const Vec&) const { return std::nullopt; }

DiagonalQuadratic::DiagonalQuadratic(Vec q_diag, Vec b) : q_(std::move(q_diag)), b_(std::move(b)) {
  if (q_.size() != b_.size()) throw ConfigError("quadratic: Q and b dimensions differ");
  if (q_.size() == 0) throw ConfigError("quadratic: empty dimension");
  if ((q_.array() < 0.0).any()) throw ConfigError("quadratic: negative diagonal entry in Q");
  lipschitz_ = q_.maxCoeff();
}

double DiagonalQuadratic::value(const Vec& x) const {
  return 0.5 * x.dot(q_.cwiseProduct(x)) + b_.dot(x);
}

void DiagonalQuadratic::gradient(const Vec& x, Vec& g) const { g = q_.cwiseProduct(x) + b_; }

std::optional<double> DiagonalQuadratic::conjugate(const Vec& y) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < q_.size(); ++i) {
    const double r = y[i] - b_[i];
    if (q_[i] > 0.0) {
      total += 0.5 * r * r / q_[i];
    } else if (std::abs(r) > 1e-12) {
      throw ConfigError("quadratic conjugate: y outside domain (flat coordinate " + std::to_string(i) + ")");
    }
  }
  return total;
}

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double logistic_spectral_bound(const DataShard& shard) {
  // 1/4 lambda_max(A^T A) by power iteration on the feature matrix.
  const int d = shard.feature_dim;
  Vec v = Vec::Ones(d).normalized();
  double est = 0.0;
  for (int it = 0; it < 10 * d + 100; ++it) {
    Vec w = Vec::Zero(d);
    for (const auto& row : shard.rows) {
      double s = 0.0;
      for (std::size_t k = 0; k < row.index.size(); ++k) s += row.value[k] * v[row.index[k] - 1];
      for (std::size_t k = 0; k < row.index.size(); ++k) w[row.index[k] - 1] += s * row.value[k];
    }
    const double next = v.dot(w);
    const double len = w.norm();
    if (len == 0.0) return 0.0;
    v = w / len;
    if (it > 0 && std::abs(next - est) <= 1e-12 * next) return 0.25 * next;
    est = next;
  }
  return 0.25 * est;
}

}  // namespace

LogisticLoss::LogisticLoss(DataShard shard, LipschitzEstimate estimate) : shard_(std::move(shard)) {
  if (shard_.size() == 0) throw ConfigError("logistic: empty shard");
  shard_.validate();
  if (estimate == LipschitzEstimate::trace) {
    double total = 0.0;
    for (const auto& row : shard_.rows)
      for (double v : row.value) total += v * v;
    lipschitz_ = 0.25 * total;
  } else {
    lipschitz_ = logistic_spectral_bound(shard_);
  }
}

double LogisticLoss::margin(std::size_t r, const Vec& w) const {
  const auto& row = shard_.rows[r];
  double s = 0.0;
  for (std::size_t k = 0; k < row.index.size(); ++k) s += row.value[k] * w[row.index[k] - 1];
  return shard_.labels[r] * s;
}

double LogisticLoss::value(const Vec& w) const {
  double total = 0.0;
  for (std::size_t r = 0; r < shard_.size(); ++r) total += softplus(-margin(r, w));
  return total;
}

void LogisticLoss::gradient(const Vec& w, Vec& g) const {
  g = Vec::Zero(shard_.feature_dim);
  for (std::size_t r = 0; r < shard_.size(); ++r) {
    const double coef = -shard_.labels[r] * sigmoid(-margin(r, w));
    const auto& row = shard_.rows[r];
    for (std::size_t k = 0; k < row.index.size(); ++k) g[row.index[k] - 1] += coef * row.value[k];
  }
}

void LogisticLoss::row_gradient(std::size_t r, const Vec& w, Vec& g) const {
  g = Vec::Zero(shard_.feature_dim);
  const double coef = -shard_.labels[r] * sigmoid(-margin(r, w));
  const auto& row = shard_.rows[r];
  for (std::size_t k = 0; k < row.index.size(); ++k) g[row.index[k] - 1] += coef * row.value[k];
}

// ---- LocalObjective ------------------------------------------------------

LocalObjective::LocalObjective(std::shared_ptr<const SmoothTerm> smooth, double mu, FeasibleSet set)
    : smooth_(std::move(smooth)), mu_(mu), set_(std::move(set)) {
  if (!smooth_) throw ConfigError("objective: null smooth term");
  if (!(mu_ >= 0.0)) throw ConfigError("objective: mu must be >= 0");
  if (!set_.compatible(smooth_->dim())) throw ConfigError("objective: feasible set dimension mismatch");
}

double LocalObjective::value(const Vec& x) const { return smooth_->value(x) + 0.5 * mu_ * x.squaredNorm(); }

LocalObjective quadratic_objective(Vec q_diag, Vec b, double mu, FeasibleSet set) {
  return LocalObjective(std::make_shared<DiagonalQuadratic>(std::move(q_diag), std::move(b)), mu, std::move(set));
}

LocalObjective logistic_objective(DataShard shard, double mu, LipschitzEstimate estimate) {
  return LocalObjective(std::make_shared<LogisticLoss>(std::move(shard), estimate), mu, FeasibleSet::whole_space());
}

Vec grad(const LocalObjective& obj, const Vec& x, OracleCounters& counters) {
  if (!x.allFinite()) throw SolverError("grad: non-finite input");
  Vec g;
  obj.smooth_gradient(x, g);
  ++counters.gradients;
  return g;
}

// ---- StochasticOracle ----------------------------------------------------

StochasticOracle::StochasticOracle(LocalObjective obj, Noise noise, double sigma)
    : obj_(std::move(obj)), noise_(noise), sigma_(sigma) {}

StochasticOracle StochasticOracle::gaussian(LocalObjective obj, double sigma) {
  if (!(sigma >= 0.0)) throw ConfigError("stochastic oracle: sigma must be >= 0");
  return StochasticOracle(std::move(obj), Noise::additive_gaussian, sigma);
}

StochasticOracle StochasticOracle::subsampling(LocalObjective obj) {
  const auto* logistic = dynamic_cast<const LogisticLoss*>(&obj.smooth());
  if (!logistic) throw ConfigError("stochastic oracle: data subsampling needs a logistic objective");
  StochasticOracle oracle(std::move(obj), Noise::data_subsampling, std::numeric_limits<double>::quiet_NaN());
  oracle.logistic_ = logistic;
  return oracle;
}

Vec StochasticOracle::sample_mean(const Vec& x, std::int64_t batch, std::uint64_t key,
                                  OracleCounters& counters) const {
  if (batch < 1) throw ConfigError("stoch_grad: batch must be >= 1");
  if (!x.allFinite()) throw SolverError("stoch_grad: non-finite input");
  counters.samples += batch;
  const Eigen::Index d = x.size();
  if (noise_ == Noise::additive_gaussian) {
    Vec g;
    obj_.smooth_gradient(x, g);
    Vec noise = Vec::Zero(d);
    for (std::int64_t j = 0; j < batch; ++j) {
      KeyedStream stream(hash_key(key, static_cast<std::uint64_t>(j)));
      for (Eigen::Index c = 0; c < d; ++c) noise[c] += stream.normal();
    }
    const double scale = sigma_ / (std::sqrt(static_cast<double>(d)) * static_cast<double>(batch));
    return g + scale * noise;
  }
  const std::size_t n = logistic_->shard().size();
  Vec acc = Vec::Zero(d);
  Vec g;
  for (std::int64_t j = 0; j < batch; ++j) {
    KeyedStream stream(hash_key(key, static_cast<std::uint64_t>(j)));
    const std::size_t row = static_cast<std::size_t>(stream() % n);
    logistic_->row_gradient(row, x, g);
    acc += g;
  }
  return (static_cast<double>(n) / static_cast<double>(batch)) * acc;
}

// ---- prox ----------------------------------------------------------------

Vec prox_step(const LocalObjective& obj, const Vec& g, const Vec& anchor_t, const Vec& anchor_k, double eta,
              double p) {
  if (!(eta > 0.0)) throw ConfigError("prox_step: eta must be positive");
  if (!(p >= 0.0)) throw ConfigError("prox_step: p must be >= 0");
  Vec x = (eta * anchor_t + p * anchor_k - g) / (obj.mu() + eta + p);
  obj.set().project(x);
  return x;
}

// ---- reference solver ----------------------------------------------------

double uniform_lipschitz(const std::vector<LocalObjective>& objs) {
  double best = 0.0;
  for (const auto& o : objs) best = std::max(best, o.lipschitz());
  return best;
}

double uniform_mu(const std::vector<LocalObjective>& objs) {
  if (objs.empty()) return 0.0;
  double best = objs.front().mu();
  for (const auto& o : objs) best = std::min(best, o.mu());
  return best;
}

double stacked_value(const std::vector<LocalObjective>& objs, const Vec& x) {
  const int d = objs.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < objs.size(); ++i) total += objs[i].value(x.segment(static_cast<Eigen::Index>(i) * d, d));
  return total;
}

Vec block_mean(const Vec& x, int m) {
  const Eigen::Index d = x.size() / m;
  Vec mean = Vec::Zero(d);
  for (int i = 0; i < m; ++i) mean += x.segment(i * d, d);
  return mean / m;
}

double consensus_value(const std::vector<LocalObjective>& objs, const Vec& x) {
  const Vec mean = block_mean(x, static_cast<int>(objs.size()));
  double total = 0.0;
  for (const auto& o : objs) total += o.value(mean);
  return total;
}

CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objs, double tol,
                                      std::int64_t max_iterations) {
  if (objs.empty()) throw ConfigError("centralized_solve: no objectives");
  if (!(tol > 0.0)) throw ConfigError("centralized_solve: tol must be positive");
  const int d = objs.front().dim();
  for (const auto& o : objs) {
    if (o.dim() != d) throw ConfigError("centralized_solve: objectives disagree on dimension");
    if (!(o.set() == objs.front().set())) throw ConfigError("centralized_solve: objectives disagree on X");
  }
  const FeasibleSet& set = objs.front().set();
  double big_l = 0.0;
  for (const auto& o : objs) big_l += o.lipschitz() + o.mu();
  if (big_l == 0.0) big_l = 1.0;
  const double step = 1.0 / big_l;

  auto total_gradient = [&](const Vec& x) {
    Vec g = Vec::Zero(d);
    Vec gi;
    for (const auto& o : objs) {
      o.smooth_gradient(x, gi);
      g += gi + o.mu() * x;
    }
    return g;
  };
  auto total_value = [&](const Vec& x) {
    double v = 0.0;
    for (const auto& o : objs) v += o.value(x);
    return v;
  };

  Vec x = Vec::Zero(d);
  set.project(x);
  Vec y = x;
  Vec gx = total_gradient(x);
  double theta = 1.0;
  // Local curvature estimate, accepted by a secant test on gradients, which
  // stays meaningful where value differences drown in rounding. big_l is a
  // global bound, so backtracking stops there.
  double local_l = big_l;
  for (std::int64_t it = 1; it <= max_iterations; ++it) {
    // The gradient mapping with the global step certifies stationarity of x.
    Vec probe = x - step * gx;
    set.project(probe);
    if (big_l * (x - probe).norm() < tol) return {x, total_value(x), it};

    const Vec gy = total_gradient(y);
    local_l = std::max(0.5 * local_l, 1e-12 * big_l);
    Vec x_next, g_next;
    for (;;) {
      x_next = y - gy / local_l;
      set.project(x_next);
      g_next = total_gradient(x_next);
      if (local_l >= big_l || (g_next - gy).norm() <= local_l * (x_next - y).norm()) break;
      local_l = std::min(2.0 * local_l, big_l);
    }
    // Gradient-based restart: the momentum direction points uphill.
    const bool restart = (y - x_next).dot(x_next - x) > 0.0;
    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    if (restart) {
      theta_next = 1.0;
      y = x_next;
    } else {
      y = x_next + ((theta - 1.0) / theta_next) * (x_next - x);
    }
    x = std::move(x_next);
    gx = std::move(g_next);
    theta = theta_next;
  }
  throw SolverError("centralized_solve: iteration cap " + std::to_string(max_iterations) + " exceeded");
}

}  // namespace pdslide
