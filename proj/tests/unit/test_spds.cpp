#include <gtest/gtest.h>

#include "pdslide/error.hpp"
#include "pdslide/spds.hpp"
#include "support/oracles.hpp"

using namespace pdslide;

namespace {

struct Setup {
  oracle::ConsensusQp qp;
  ConsensusOperator op;
  std::vector<StochasticOracle> oracles;
  ScheduleInputs in;
};

Setup make_setup(double sigma, std::int64_t N) {
  auto qp = oracle::make_consensus_qp(3, 2, 77, false, 0.0);
  auto op = ConsensusOperator::laplacian(std::make_shared<const CommGraph>(named_graph(GraphKind::path, 3)), 2);
  std::vector<StochasticOracle> oracles;
  for (const auto& o : qp.objs) oracles.push_back(StochasticOracle::gaussian(o, sigma));
  ScheduleInputs in;
  in.lipschitz = uniform_lipschitz(qp.objs);
  in.op_norm = op.norm();
  in.sigma = sigma;
  in.c = 1.0;
  in.N = N;
  in.mode = ScheduleMode::stochastic;
  return {std::move(qp), std::move(op), std::move(oracles), in};
}

}  // namespace

TEST(Spds, SameSeedSameResult) {
  auto st = make_setup(0.5, 8);
  const auto s = build_stochastic(st.in);
  const auto a = spds_run(st.oracles, st.op, s, 8, Vec::Zero(6), 3);
  const auto b = spds_run(st.oracles, st.op, s, 8, Vec::Zero(6), 3);
  const auto c = spds_run(st.oracles, st.op, s, 8, Vec::Zero(6), 4);
  EXPECT_TRUE(a.x_bar == b.x_bar);
  EXPECT_FALSE(a.x_bar == c.x_bar);
}

TEST(Spds, SampleCountsFollowBatchSchedule) {
  auto st = make_setup(0.5, 6);
  const auto s = build_stochastic(st.in);
  const auto r = spds_run(st.oracles, st.op, s, 6, Vec::Zero(6), 1);
  std::int64_t samples = 0;
  for (std::int64_t k = 1; k <= 6; ++k) samples += s.batch_size(k);
  EXPECT_EQ(r.metrics.samples, samples);
  EXPECT_EQ(r.metrics.total_samples(), 3 * samples);
}

TEST(Spds, BatchCapIsRecorded) {
  auto st = make_setup(0.5, 6);
  const auto s = build_stochastic(st.in);
  SpdsOptions opts;
  opts.max_batch = 2;
  const auto r = spds_run(st.oracles, st.op, s, 6, Vec::Zero(6), 1, opts);
  EXPECT_LE(r.metrics.samples, 12);
  EXPECT_FALSE(r.metrics.warnings.empty());
}

TEST(Spds, RequiresStochasticSchedule) {
  auto st = make_setup(0.5, 6);
  st.in.mode = ScheduleMode::deterministic;
  const auto s = build_deterministic(st.in);
  EXPECT_THROW(spds_run(st.oracles, st.op, s, 6, Vec::Zero(6), 1), ConfigError);
}

TEST(Spds, ReplicationsAreIndependentOfExecutionOrder) {
  auto st = make_setup(1.0, 5);
  const auto s = build_stochastic(st.in);
  StochasticRunConfig cfg;
  cfg.replications = 6;
  cfg.base_seed = 50;
  cfg.N = 5;
  cfg.x0 = Vec::Zero(6);
  const auto rep = replicate(st.oracles, st.op, s, cfg);
  ASSERT_EQ(rep.rows.size(), 6u);
  for (int r = 0; r < 6; ++r) {
    const auto single = spds_run(st.oracles, st.op, s, 5, cfg.x0, 50 + r);
    EXPECT_TRUE(single.x_bar == rep.x_bars[r]);
    EXPECT_EQ(rep.rows[r].seed, 50u + r);
  }
  std::vector<double> losses;
  for (const auto& row : rep.rows) losses.push_back(row.loss);
  EXPECT_DOUBLE_EQ(rep.loss.mean, summarize(losses).mean);
}

TEST(Spds, SummaryStatistics) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 4.0);
  EXPECT_DOUBLE_EQ(summarize({7.0}).stddev, 0.0);
}

TEST(Spds, SubsamplingOracleIsUnbiased) {
  DataShard shard;
  shard.feature_dim = 2;
  shard.rows = {{{1}, {1.0}}, {{2}, {-0.5}}, {{1, 2}, {0.3, 0.9}}};
  shard.labels = {1, 1, -1};
  const auto obj = logistic_objective(shard, 0.0);
  const auto so = StochasticOracle::subsampling(obj);
  const Vec w = (Vec(2) << 0.4, -0.2).finished();
  Vec exact;
  obj.smooth_gradient(w, exact);
  OracleCounters c;
  const Vec mean = so.sample_mean(w, 30000, 5, c);
  EXPECT_LT((mean - exact).norm(), 0.02);
}

TEST(Spds, NoisyRunsApproachTheOptimumOnAverage) {
  auto st = make_setup(0.3, 30);
  const auto s = build_stochastic(st.in);
  StochasticRunConfig cfg;
  cfg.replications = 8;
  cfg.N = 30;
  cfg.x0 = Vec::Zero(6);
  const auto rep = replicate(st.oracles, st.op, s, cfg);
  EXPECT_LT(rep.loss.mean - st.qp.f_star, 0.05);
  EXPECT_LT(rep.feasibility.mean, 0.05);
}
