#include <gtest/gtest.h>

#include "pdslide/error.hpp"
#include "pdslide/problem.hpp"
#include "support/oracles.hpp"

using namespace pdslide;

namespace {

DataShard tiny_shard() {
  DataShard s;
  s.feature_dim = 3;
  s.rows = {{{1, 3}, {0.5, -1.0}}, {{2}, {2.0}}, {{1, 2, 3}, {0.3, 0.1, -0.7}}};
  s.labels = {1, -1, 1};
  return s;
}

}  // namespace

TEST(Problem, BoxProjection) {
  const auto box = FeasibleSet::box(3, -1.0, 1.0);
  Vec x(3);
  x << 2.0, -0.5, -3.0;
  box.project(x);
  EXPECT_EQ(x, (Vec(3) << 1.0, -0.5, -1.0).finished());
  EXPECT_TRUE(box.contains(x));
}

TEST(Problem, BallProjection) {
  const auto ball = FeasibleSet::ball(Vec::Zero(2), 2.0);
  Vec x(2);
  x << 3.0, 4.0;
  ball.project(x);
  EXPECT_NEAR(x.norm(), 2.0, 1e-15);
  EXPECT_NEAR(x[0] / x[1], 0.75, 1e-15);
}

TEST(Problem, QuadraticGradientMatchesFiniteDifferences) {
  const auto obj = quadratic_objective((Vec(2) << 1.0, 3.0).finished(), (Vec(2) << -1.0, 0.5).finished(), 0.0);
  const Vec x = (Vec(2) << 0.3, -0.7).finished();
  Vec g;
  obj.smooth_gradient(x, g);
  const Vec fd = oracle::finite_difference_gradient([&](const Vec& y) { return obj.smooth().value(y); }, x);
  EXPECT_LT((g - fd).norm(), 1e-8);
  EXPECT_DOUBLE_EQ(obj.lipschitz(), 3.0);
}

TEST(Problem, LogisticGradientMatchesFiniteDifferences) {
  const auto obj = logistic_objective(tiny_shard(), 0.0);
  const Vec w = (Vec(3) << 0.2, -0.4, 1.1).finished();
  Vec g;
  obj.smooth_gradient(w, g);
  const Vec fd = oracle::finite_difference_gradient([&](const Vec& y) { return obj.smooth().value(y); }, w);
  EXPECT_LT((g - fd).norm(), 1e-8);
}

TEST(Problem, LogisticLipschitzBoundsCurvature) {
  // Sum-form logistic loss: Hessian <= 1/4 sum_j a_j a_j^T, trace bound >= that.
  const auto shard = tiny_shard();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(3, 3);
  for (const auto& r : shard.rows) {
    Vec a = Vec::Zero(3);
    for (std::size_t k = 0; k < r.index.size(); ++k) a[r.index[k] - 1] = r.value[k];
    gram += a * a.transpose();
  }
  const double spectral = 0.25 * oracle::dense_norm(gram);
  EXPECT_GE(LogisticLoss(shard, LipschitzEstimate::trace).lipschitz(), spectral * (1 - 1e-12));
  EXPECT_NEAR(LogisticLoss(shard, LipschitzEstimate::spectral).lipschitz(), spectral, 1e-6 * spectral);
}

TEST(Problem, ValueIncludesStrongConvexity) {
  const auto obj = quadratic_objective(Vec::Ones(2), Vec::Zero(2), 0.5);
  const Vec x = (Vec(2) << 1.0, 2.0).finished();
  EXPECT_DOUBLE_EQ(obj.value(x), 0.5 * 5.0 + 0.25 * 5.0);
}

TEST(Problem, ProxStepClosedForm) {
  const auto obj = quadratic_objective(Vec::Ones(1), Vec::Zero(1), 2.0, FeasibleSet::box(1, -1.0, 1.0));
  const Vec g = Vec::Constant(1, 1.0), at = Vec::Constant(1, 0.5), ak = Vec::Constant(1, -0.25);
  // (eta at + p ak - g) / (mu + eta + p) = (3*0.5 + 1*(-0.25) - 1) / 6.
  EXPECT_NEAR(prox_step(obj, g, at, ak, 3.0, 1.0)[0], 0.25 / 6.0, 1e-15);
  // Projection clips large unconstrained minimizers.
  EXPECT_DOUBLE_EQ(prox_step(obj, Vec::Constant(1, -100.0), at, ak, 3.0, 1.0)[0], 1.0);
}

TEST(Problem, GradCountsEvaluations) {
  const auto obj = quadratic_objective(Vec::Ones(2), Vec::Zero(2), 0.0);
  OracleCounters c;
  grad(obj, Vec::Ones(2), c);
  grad(obj, Vec::Ones(2), c);
  EXPECT_EQ(c.gradients, 2);
  EXPECT_EQ(c.samples, 0);
}

TEST(Problem, GaussianOracleIsUnbiasedWithTheRightVariance) {
  const auto obj = quadratic_objective((Vec(4) << 1, 2, 3, 4).finished(), Vec::Zero(4), 0.0);
  const auto so = StochasticOracle::gaussian(obj, 0.5);
  const Vec x = Vec::Ones(4);
  Vec exact;
  obj.smooth_gradient(x, exact);
  OracleCounters c;
  Vec mean = Vec::Zero(4);
  double sq = 0.0;
  const int n = 20000;
  for (int j = 0; j < n; ++j) {
    const Vec s = so.sample_mean(x, 1, hash_key(7, j), c);
    mean += s / n;
    sq += (s - exact).squaredNorm() / n;
  }
  EXPECT_EQ(c.samples, n);
  EXPECT_LT((mean - exact).norm(), 0.02);
  EXPECT_NEAR(sq, 0.25, 0.01);
}

TEST(Problem, ZeroNoiseOracleIsExact) {
  const auto obj = quadratic_objective((Vec(2) << 1, 2).finished(), Vec::Ones(2), 0.0);
  const auto so = StochasticOracle::gaussian(obj, 0.0);
  OracleCounters c;
  Vec exact;
  obj.smooth_gradient(Vec::Ones(2), exact);
  EXPECT_TRUE(so.sample_mean(Vec::Ones(2), 5, 3, c) == exact);
}

TEST(Problem, CentralizedSolveMatchesClosedForm) {
  for (bool boxed : {false, true}) {
    const auto qp = oracle::make_consensus_qp(6, 3, 42, boxed, 0.1);
    const auto sol = centralized_solve(qp.objs, 1e-10);
    EXPECT_LT((sol.x - qp.x_star).norm(), 1e-8);
    EXPECT_NEAR(sol.value, qp.f_star, 1e-9 * std::max(1.0, std::abs(qp.f_star)));
  }
}

TEST(Problem, StackedAndConsensusValues) {
  const auto qp = oracle::make_consensus_qp(3, 2, 5, false);
  EXPECT_NEAR(stacked_value(qp.objs, qp.x_star_stacked), qp.f_star, 1e-12);
  EXPECT_NEAR(consensus_value(qp.objs, qp.x_star_stacked), qp.f_star, 1e-12);
  EXPECT_LT((block_mean(qp.x_star_stacked, 3) - qp.x_star).norm(), 1e-15);
}

TEST(Problem, UniformConstants) {
  std::vector<LocalObjective> objs{quadratic_objective(Vec::Constant(1, 2.0), Vec::Zero(1), 0.5),
                                   quadratic_objective(Vec::Constant(1, 5.0), Vec::Zero(1), 0.2)};
  EXPECT_DOUBLE_EQ(uniform_lipschitz(objs), 5.0);
  EXPECT_DOUBLE_EQ(uniform_mu(objs), 0.2);
}
