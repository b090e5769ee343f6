#include <gtest/gtest.h>

#include "pdslide/kernels.hpp"
#include "pdslide/linear_operator.hpp"
#include "support/oracles.hpp"

using namespace pdslide;

namespace {

Vec random_vec(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

std::shared_ptr<const CommGraph> shared(CommGraph g) { return std::make_shared<const CommGraph>(std::move(g)); }

}  // namespace

TEST(Operator, LaplacianMatchesDenseKronecker) {
  const auto g = shared(erdos_renyi(9, 0.4, 1));
  const auto op = ConsensusOperator::laplacian(g, 3);
  const Eigen::MatrixXd ref = oracle::dense_laplacian(*g, 3);
  const Vec x = random_vec(27, 2);
  EXPECT_LT((op.apply(x) - ref * x).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((op.apply_adjoint(x) - ref.transpose() * x).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Operator, IncidenceGramIsLaplacian) {
  const auto g = shared(erdos_renyi(10, 0.3, 5));
  const auto op = ConsensusOperator::incidence(g, 2, 17);
  const Eigen::MatrixXd b = op.to_dense();
  EXPECT_EQ(b.rows(), static_cast<Eigen::Index>(2 * g->edge_count()));
  EXPECT_LT((b.transpose() * b - oracle::dense_laplacian(*g, 2)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Operator, AdjointIdentity) {
  const auto g = shared(named_graph(GraphKind::star, 7));
  for (const auto& op : {ConsensusOperator::laplacian(g, 2), ConsensusOperator::incidence(g, 2, 3)}) {
    const Vec x = random_vec(op.cols(), 11);
    const Vec z = random_vec(op.rows(), 12);
    EXPECT_NEAR(op.apply(x).dot(z), x.dot(op.apply_adjoint(z)), 1e-12);
  }
}

TEST(Operator, NullSpaceIsConsensus) {
  const auto g = shared(named_graph(GraphKind::cycle, 6));
  Vec block(3);
  block << 1.5, -2.0, 0.25;
  const Vec x = block.replicate(6, 1);
  EXPECT_LT(ConsensusOperator::laplacian(g, 3).apply(x).norm(), 1e-14);
  EXPECT_LT(ConsensusOperator::incidence(g, 3).apply(x).norm(), 1e-14);
}

TEST(Operator, NormMatchesDenseOracle) {
  const auto g = shared(erdos_renyi(25, 0.2, 9));
  const auto lap = ConsensusOperator::laplacian(g, 2);
  const auto inc = ConsensusOperator::incidence(g, 2);
  EXPECT_NEAR(lap.norm(), oracle::dense_norm(lap.to_dense()), 1e-6 * lap.norm());
  EXPECT_NEAR(inc.norm(), oracle::dense_norm(inc.to_dense()), 1e-6 * inc.norm());
  // ||B^T|| = sqrt ||L||.
  EXPECT_NEAR(inc.norm() * inc.norm(), lap.norm(), 1e-6 * lap.norm());
}

TEST(Operator, CompleteGraphNormIsM) {
  const auto op = ConsensusOperator::laplacian(shared(named_graph(GraphKind::complete, 8)), 1);
  EXPECT_NEAR(op.norm(), 8.0, 1e-9);
}

TEST(Operator, DenseOperatorNormAndAdjoint) {
  Eigen::MatrixXd a(2, 3);
  a << 3, 0, 0, 0, 4, 0;
  const DenseOperator op(a);
  EXPECT_NEAR(op.norm(), 4.0, 1e-9);
  Vec z(2);
  z << 1, 2;
  EXPECT_LT((op.apply_adjoint(z) - a.transpose() * z).norm(), 1e-15);
}

TEST(Operator, ExecutionModesAgreeBitForBit) {
  const auto g = shared(erdos_renyi(40, 0.15, 3));
  auto lap = ConsensusOperator::laplacian(g, 4);
  auto inc = ConsensusOperator::incidence(g, 4, 5);
  const Vec x = random_vec(lap.cols(), 21);
  const Vec z = random_vec(inc.rows(), 22);
  const Vec l0 = lap.apply(x), i0 = inc.apply(x), a0 = inc.apply_adjoint(z);
  lap.set_exec(kernels::Exec::omp);
  inc.set_exec(kernels::Exec::omp);
  EXPECT_TRUE(lap.apply(x) == l0);
  EXPECT_TRUE(inc.apply(x) == i0);
  EXPECT_TRUE(inc.apply_adjoint(z) == a0);
}

TEST(Operator, KernelsAgreeOnRawSpans) {
  const CommGraph g = named_graph(GraphKind::complete, 12);
  const Vec x = random_vec(12 * 3, 8);
  Vec a(12 * 3), b(12 * 3);
  kernels::laplacian_apply_serial(g, 3, {x.data(), 36}, {a.data(), 36});
  kernels::laplacian_apply_omp(g, 3, {x.data(), 36}, {b.data(), 36});
  EXPECT_TRUE(a == b);
}
