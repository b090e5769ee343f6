#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pdslide/sliding.hpp"

namespace pdslide {

enum class View { network, agent };

View parse_view(std::string_view name);
std::string_view to_string(View view);

struct PdsResult {
  Vec x_bar;
  SolverState state;
  RunMetrics metrics;
  MessageLog log;  // empty for the network view
};

/// Options for the agent-view execution.
struct AgentViewOptions {
  bool keep_message_records = true;
  std::function<void(const InnerEvent&)> on_inner;
  bool record_trajectory = true;
};

/// Deterministic PDS. The network view runs the stacked recursion; the agent
/// view runs one state per agent with neighbor-only message passing and
/// requires the Laplacian form.
PdsResult pds_run(const std::vector<LocalObjective>& objs, const LinearOperator& op, const ParamSchedule& s,
                  std::int64_t N, const Vec& x0, View view = View::network, SlidingOptions options = {});

/// Agent-view PDS over a Laplacian consensus operator.
PdsResult pds_run_agents(const std::vector<LocalObjective>& objs, const ConsensusOperator& op, const ParamSchedule& s,
                         std::int64_t N, const Vec& x0, const AgentViewOptions& options = {});

/// A neighbor's published block.
struct Payload {
  int sender = 0;
  std::span<const double> data;
};

/// z = z_prev + (1/q) sum_{j in N_i} L(i,j) u^(j), with one receive logged per
/// payload. `neighbors` must cover N_i exactly, in any order.
void agent_step_z(const CommGraph& g, int i, std::span<const Payload> neighbors, const Vec& z_prev, double q,
                  Vec& z_out, MessageLog* log = nullptr, std::int64_t round = 0);

/// Step sizes of the non-sliding baseline.
struct BaselineSteps {
  double eta = 0.0;
  double q = 0.0;
};

/// q = rho ||A||, eta = L + ||A|| / rho, so eta q >= ||A||^2.
BaselineSteps default_baseline_steps(double lipschitz, double op_norm, double rho = 1.0);

/// Primal-dual method with T_k = 1: one gradient per inner iteration, output
/// the uniform average. Throws ConfigError when eta q < ||A||^2.
PdsResult baseline_pd_run(const std::vector<LocalObjective>& objs, const LinearOperator& op,
                          std::int64_t total_inner, const BaselineSteps& steps, const Vec& x0,
                          SlidingOptions options = {});

/// The constant schedule used by the baseline.
ParamSchedule baseline_schedule(const std::vector<LocalObjective>& objs, const LinearOperator& op,
                                const BaselineSteps& steps);

}  // namespace pdslide
