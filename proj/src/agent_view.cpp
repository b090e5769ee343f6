#include <algorithm>
#include <exception>
#include <string>

#include "pdslide/error.hpp"
#include "pdslide/pds.hpp"

namespace pdslide {

namespace {

// Sum_{j in N_i} L(i,j) v^(j), walked over N_i ascending. The order matches
// the Laplacian kernel, so agent and network views agree bit for bit.
void laplacian_row_from(const CommGraph& g, int i, std::span<const Payload* const> by_sender, Vec& acc) {
  const int d = static_cast<int>(by_sender.front()->data.size());
  acc.setZero(d);
  const double deg = static_cast<double>(g.degree(i));
  for (const Payload* p : by_sender) {
    const double* v = p->data.data();
    if (p->sender == i) {
      for (int c = 0; c < d; ++c) acc[c] += deg * v[c];
    } else {
      for (int c = 0; c < d; ++c) acc[c] -= v[c];
    }
  }
}

/// Payload pointers in N_i order; throws unless senders equal N_i exactly.
std::vector<const Payload*> match_neighborhood(const CommGraph& g, int i, std::span<const Payload> neighbors) {
  const auto nbrs = g.neighborhood(i);
  std::vector<const Payload*> sorted;
  sorted.reserve(neighbors.size());
  for (const auto& p : neighbors) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Payload* a, const Payload* b) { return a->sender < b->sender; });
  std::size_t n = 0;
  for (int j : nbrs) {
    if (n >= sorted.size() || sorted[n]->sender != j)
      throw SolverError("agent " + std::to_string(i + 1) + ": missing payload from neighbor " + std::to_string(j + 1));
    ++n;
  }
  if (n != sorted.size())
    throw SolverError("agent " + std::to_string(i + 1) + ": payload from non-neighbor " +
                      std::to_string(sorted[n]->sender + 1));
  const std::size_t d = sorted.front()->data.size();
  for (const auto* p : sorted)
    if (p->data.size() != d) throw SolverError("agent " + std::to_string(i + 1) + ": payload size mismatch");
  return sorted;
}

void log_receives(MessageLog* log, std::span<const Payload* const> from, int receiver, PayloadTag tag,
                  std::int64_t round) {
  if (!log) return;
  for (const auto* p : from)
    log->record({round, p->sender, receiver, tag, p->data.size() * sizeof(double)});
}

/// Parallel loop over agents; an exception from any agent is rethrown after
/// the barrier, lowest agent id first.
template <typename Fn>
void for_agents(int m, Fn&& fn) {
  std::vector<std::exception_ptr> errors(m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct AgentState {
  Vec x_prev, x_prev2, x_hat_prev, x_under, x_tilde, y;
  Vec z, z_next, x_t1, x_t2, x_next, u, acc;
  Vec x_sum, z_sum, x_hat, z_hat, x_bar, y_bar, z_bar;
  MessageLog log;
};

}  // namespace

void agent_step_z(const CommGraph& g, int i, std::span<const Payload> neighbors, const Vec& z_prev, double q,
                  Vec& z_out, MessageLog* log, std::int64_t round) {
  if (i < 0 || i >= g.node_count()) throw ConfigError("agent_step_z: agent id out of range");
  const auto ordered = match_neighborhood(g, i, neighbors);
  if (static_cast<Eigen::Index>(ordered.front()->data.size()) != z_prev.size())
    throw SolverError("agent_step_z: payload and z_prev sizes differ");
  Vec acc;
  laplacian_row_from(g, i, ordered, acc);
  log_receives(log, ordered, i, PayloadTag::u_block, round);
  z_out = z_prev + (1.0 / q) * acc;
}

PdsResult pds_run_agents(const std::vector<LocalObjective>& objs, const ConsensusOperator& op, const ParamSchedule& s,
                         std::int64_t N, const Vec& x0, const AgentViewOptions& options) {
  if (N < 1) throw ConfigError("pds_run: N must be >= 1");
  if (op.form() != ConsensusOperator::Form::laplacian)
    throw ConfigError("agent view: only the Laplacian form has an agent-local dual update");
  const int d = stacked_block_dim(objs, op);
  const int m = static_cast<int>(objs.size());
  const CommGraph& g = op.graph();
  if (x0.size() != op.cols()) throw ConfigError("pds_run: x0 has the wrong dimension");

  const auto start = std::chrono::steady_clock::now();
  PdsResult out;
  out.log = MessageLog(&g, options.keep_message_records);
  RunMetrics& metrics = out.metrics;
  metrics.agents = m;

  std::vector<AgentState> agents(m);
  for (int i = 0; i < m; ++i) {
    auto& a = agents[i];
    const Vec xi = x0.segment(static_cast<Eigen::Index>(i) * d, d);
    if (!xi.allFinite() || !objs[i].set().contains(xi, 1e-12))
      throw ConfigError("solver: x0 block " + std::to_string(i + 1) + " lies outside its feasible set");
    a.x_prev = a.x_prev2 = a.x_hat_prev = a.x_under = a.x_t2 = a.x_bar = a.x_hat = xi;
    a.z = Vec::Zero(d);
    a.z_hat = a.z_bar = a.z;
    a.y_bar = Vec::Zero(d);
    a.log = MessageLog(&g, options.keep_message_records);
    OracleCounters init;
    a.y = grad(objs[i], a.x_under, init);  // y_0
  }
  metrics.init_gradients = 1;

  // Published buffers: agents read only the previous phase's values.
  Vec pub_u(static_cast<Eigen::Index>(m) * d);
  Vec pub_z(static_cast<Eigen::Index>(m) * d);
  std::vector<std::vector<Payload>> inbox(m);
  double log_beta_sum = -std::numeric_limits<double>::infinity();
  std::int64_t round = 0;

  auto fill_inbox = [&](int i, const Vec& pub) {
    auto& box = inbox[i];
    box.clear();
    for (int j : g.neighborhood(i))
      box.push_back({j, std::span<const double>(pub.data() + static_cast<std::ptrdiff_t>(j) * d, d)});
  };
  auto stacked = [&](auto member) {
    Vec v(static_cast<Eigen::Index>(m) * d);
    for (int i = 0; i < m; ++i) v.segment(static_cast<Eigen::Index>(i) * d, d) = agents[i].*member;
    return v;
  };
  auto merge_logs = [&]() {
    for (auto& a : agents) {
      out.log.append(a.log);
      a.log = MessageLog(&g, options.keep_message_records);
    }
  };

  for (std::int64_t k = 1; k <= N; ++k) {
    const double lambda = s.lambda(k);
    const double tau = s.tau(k);
    const std::int64_t T = s.inner_iterations(k);
    const double p = s.p(k);

    for_agents(m, [&](int i) {
      auto& a = agents[i];
      a.x_tilde = a.x_prev + lambda * (a.x_hat_prev - a.x_prev2);
      a.x_under = (a.x_tilde + tau * a.x_under) / (1.0 + tau);
      OracleCounters c;
      a.y = grad(objs[i], a.x_under, c);
      a.x_t1 = a.x_prev;
      a.x_sum.setZero(d);
      a.z_sum.setZero(d);
    });
    metrics.gradients += 1;

    for (std::int64_t t = 1; t <= T; ++t) {
      const double alpha = s.alpha(k, t);
      const double q = s.q(k, t);
      const double eta = s.eta(k, t);

      // Round 1: publish u, then each agent updates z from its neighbors' u.
      for_agents(m, [&](int i) {
        auto& a = agents[i];
        a.u = a.x_t1 + alpha * (a.x_t1 - a.x_t2);
        pub_u.segment(static_cast<Eigen::Index>(i) * d, d) = a.u;
      });
      for_agents(m, [&](int i) {
        auto& a = agents[i];
        fill_inbox(i, pub_u);
        agent_step_z(g, i, inbox[i], a.z, q, a.z_next, &a.log, round);
        a.z.swap(a.z_next);
        pub_z.segment(static_cast<Eigen::Index>(i) * d, d) = a.z;
      });
      merge_logs();
      ++round;

      // Round 2: each agent forms (A^T z)^(i) from its neighbors' z and steps x.
      for_agents(m, [&](int i) {
        auto& a = agents[i];
        fill_inbox(i, pub_z);
        const auto ordered = match_neighborhood(g, i, inbox[i]);
        laplacian_row_from(g, i, ordered, a.acc);
        log_receives(&a.log, ordered, i, PayloadTag::z_block, round);
        const Vec gi = a.y + a.acc;
        a.x_next = prox_step(objs[i], gi, a.x_t1, a.x_prev, eta, p);
        if (!a.x_next.allFinite() || !a.z.allFinite())
          throw SolverError("solver diverged: non-finite iterate at k = " + std::to_string(k) +
                            ", t = " + std::to_string(t) + " (agent " + std::to_string(i + 1) + ")");
        a.x_t2.swap(a.x_t1);
        a.x_t1.swap(a.x_next);
        a.x_sum += a.x_t1;
        a.z_sum += a.z;
      });
      merge_logs();
      ++round;
      metrics.rounds += 2;
      ++metrics.inner_iterations;
      ++metrics.operator_applies;
      ++metrics.adjoint_applies;
      if (options.on_inner) {
        const Vec u = stacked(&AgentState::u);
        const Vec z = stacked(&AgentState::z);
        const Vec x = stacked(&AgentState::x_t1);
        options.on_inner({k, t, &u, &z, &x});
      }
    }

    const double w = running_weight(s.log_beta(k), log_beta_sum);
    for_agents(m, [&](int i) {
      auto& a = agents[i];
      a.x_prev2 = a.x_prev;
      a.x_hat_prev = a.x_sum / static_cast<double>(T);
      a.x_hat = a.x_hat_prev;
      a.z_hat = a.z_sum / static_cast<double>(T);
      a.x_prev = a.x_t1;  // x_k; x_t2 now holds x_k^{T_k - 1}
      a.x_bar += w * (a.x_hat - a.x_bar);
      a.y_bar += w * (a.y - a.y_bar);
      a.z_bar += w * (a.z_hat - a.z_bar);
    });
    ++metrics.outer_iterations;
    metrics.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (options.record_trajectory) {
      TrajectoryPoint pt;
      pt.k = k;
      pt.gradients = metrics.gradients;
      pt.rounds = metrics.rounds;
      const Vec xb = stacked(&AgentState::x_bar);
      pt.loss = stacked_value(objs, xb);
      pt.consensus_loss = consensus_value(objs, xb);
      pt.feasibility = op.apply(xb).norm();
      pt.elapsed_ms = metrics.elapsed_ms;
      metrics.trajectory.push_back(pt);
    }
  }

  auto& st = out.state;
  st.k = N;
  st.x = stacked(&AgentState::x_prev);
  st.x_prev = st.x;
  st.x_carry = stacked(&AgentState::x_t2);
  st.x_hat = stacked(&AgentState::x_hat);
  st.x_under = stacked(&AgentState::x_under);
  st.x_tilde = stacked(&AgentState::x_tilde);
  st.y = stacked(&AgentState::y);
  st.z = stacked(&AgentState::z);
  st.z_hat = stacked(&AgentState::z_hat);
  st.x_bar = stacked(&AgentState::x_bar);
  st.y_bar = stacked(&AgentState::y_bar);
  st.z_bar = stacked(&AgentState::z_bar);
  st.log_beta_sum = log_beta_sum;
  out.x_bar = st.x_bar;
  return out;
}

}  // namespace pdslide
