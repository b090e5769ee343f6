#pragma once

// Independent reference computations for tests. None of these call the
// library routine they are used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <queue>
#include <random>
#include <vector>

#include "pdslide/graph.hpp"
#include "pdslide/linear_operator.hpp"
#include "pdslide/problem.hpp"

namespace oracle {

using pdslide::Vec;

/// Largest singular value from a dense symmetric eigensolve of M^T M.
inline double dense_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Dense L (x) I_d built from the edge list alone.
inline Eigen::MatrixXd dense_laplacian(const pdslide::CommGraph& g, int d) {
  const int m = g.node_count();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : g.edges()) {
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * d, m * d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.block(i * d, j * d, d, d) = l(i, j) * Eigen::MatrixXd::Identity(d, d);
  return out;
}

inline bool bfs_connected(int m, const std::vector<pdslide::Edge>& edges) {
  if (m <= 1) return true;
  std::vector<std::vector<int>> adj(m);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> seen(m, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == m;
}

/// Central differences with step h.
inline Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// A consensus QP with diagonal local quadratics, a common box (or R^d),
/// and its exact solution.
struct ConsensusQp {
  std::vector<pdslide::LocalObjective> objs;
  std::vector<Vec> q;  // per agent diagonal
  std::vector<Vec> b;  // per agent linear term
  double mu = 0.0;
  bool boxed = false;
  double lo = 0.0, hi = 0.0;
  Vec x_star;          // one block
  Vec x_star_stacked;  // replicated
  double f_star = 0.0;
};

/// Coordinate-wise closed form: the consensus minimizer of
/// sum_i 1/2 q_i x^2 + b_i x + mu/2 x^2 over [lo, hi] is the clipped ratio.
inline ConsensusQp make_consensus_qp(int m, int d, std::uint64_t seed, bool boxed, double mu = 0.0,
                                     double q_lo = 0.5, double q_hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(q_lo, q_hi);
  std::normal_distribution<double> nb(0.0, 1.0);
  ConsensusQp qp;
  qp.mu = mu;
  qp.boxed = boxed;
  qp.lo = -0.5;
  qp.hi = 0.5;
  Vec q_sum = Vec::Zero(d), b_sum = Vec::Zero(d);
  for (int i = 0; i < m; ++i) {
    Vec q(d), b(d);
    for (int c = 0; c < d; ++c) {
      q[c] = uq(rng);
      b[c] = 2.0 * nb(rng);
    }
    q_sum += q;
    b_sum += b;
    qp.q.push_back(q);
    qp.b.push_back(b);
    auto set = boxed ? pdslide::FeasibleSet::box(d, qp.lo, qp.hi) : pdslide::FeasibleSet::whole_space();
    qp.objs.push_back(pdslide::quadratic_objective(q, b, mu, set));
  }
  qp.x_star = Vec(d);
  for (int c = 0; c < d; ++c) {
    double v = -b_sum[c] / (q_sum[c] + m * mu);
    if (boxed) v = std::clamp(v, qp.lo, qp.hi);
    qp.x_star[c] = v;
  }
  qp.x_star_stacked = qp.x_star.replicate(m, 1);
  qp.f_star = 0.0;
  for (int i = 0; i < m; ++i)
    qp.f_star += 0.5 * (qp.q[i].array() * qp.x_star.array().square()).sum() + qp.b[i].dot(qp.x_star) +
                 0.5 * mu * qp.x_star.squaredNorm();
  return qp;
}

/// Minimum-norm multiplier z* with A^T z = -(g_i - gbar)_i, where g_i is the
/// full local gradient at the consensus optimum. Over a common box this also
/// yields valid normal-cone multipliers, since gbar lies in -N_X(x*).
inline Vec consensus_dual(const ConsensusQp& qp, const Eigen::MatrixXd& a_dense) {
  const int m = static_cast<int>(qp.q.size());
  const int d = static_cast<int>(qp.x_star.size());
  Vec g(m * d);
  Vec gbar = Vec::Zero(d);
  for (int i = 0; i < m; ++i) {
    const Vec gi = (qp.q[i].array() * qp.x_star.array()).matrix() + qp.b[i] + qp.mu * qp.x_star;
    g.segment(i * d, d) = gi;
    gbar += gi / m;
  }
  Vec rhs(m * d);
  for (int i = 0; i < m; ++i) rhs.segment(i * d, d) = -(g.segment(i * d, d) - gbar);
  const Eigen::MatrixXd at = a_dense.transpose();
  return at.completeOrthogonalDecomposition().solve(rhs);
}

/// V(x0, x*) = 1/2 ||x0 - x*||^2.
inline double prox_distance(const Vec& x0, const Vec& x_star) { return 0.5 * (x0 - x_star).squaredNorm(); }

}  // namespace oracle
