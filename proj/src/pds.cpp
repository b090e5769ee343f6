#include "pdslide/pds.hpp"

#include <string>

#include "pdslide/error.hpp"

namespace pdslide {

View parse_view(std::string_view name) {
  if (name == "network") return View::network;
  if (name == "agent") return View::agent;
  throw ConfigError("unknown view '" + std::string(name) + "' (expected network or agent)");
}

std::string_view to_string(View view) { return view == View::network ? "network" : "agent"; }

PdsResult pds_run(const std::vector<LocalObjective>& objs, const LinearOperator& op, const ParamSchedule& s,
                  std::int64_t N, const Vec& x0, View view, SlidingOptions options) {
  if (N < 1) throw ConfigError("pds_run: N must be >= 1");
  if (view == View::agent) {
    const auto* consensus = dynamic_cast<const ConsensusOperator*>(&op);
    if (!consensus) throw ConfigError("pds_run: the agent view needs a graph consensus operator");
    AgentViewOptions agent_options;
    agent_options.on_inner = options.on_inner;
    agent_options.record_trajectory = options.record_trajectory;
    return pds_run_agents(objs, *consensus, s, N, x0, agent_options);
  }
  ZeroDual dual;
  ExactGradients source(objs);
  SlidingSolver solver(objs, op, s, dual, source, x0, std::move(options));
  solver.run(N);
  PdsResult out;
  out.x_bar = solver.state().x_bar;
  out.state = solver.state();
  out.metrics = solver.metrics();
  return out;
}

BaselineSteps default_baseline_steps(double lipschitz, double op_norm, double rho) {
  if (!(rho > 0.0)) throw ConfigError("baseline: rho must be positive");
  BaselineSteps steps;
  if (op_norm > 0.0) {
    steps.q = rho * op_norm;
    steps.eta = lipschitz + op_norm / rho;
  } else {
    steps.q = 1.0;
    steps.eta = lipschitz;
  }
  return steps;
}

ParamSchedule baseline_schedule(const std::vector<LocalObjective>& objs, const LinearOperator& op,
                                const BaselineSteps& steps) {
  const double norm = op.norm();
  if (!(steps.eta > 0.0) || !(steps.q > 0.0)) throw ConfigError("baseline: eta and q must be positive");
  if (steps.eta * steps.q < norm * norm * (1.0 - 1e-12))
    throw ConfigError("baseline: step condition eta*q >= ||A||^2 violated (" + std::to_string(steps.eta * steps.q) +
                      " < " + std::to_string(norm * norm) + ")");
  return build_constant(uniform_lipschitz(objs), norm, {steps.eta, steps.q});
}

PdsResult baseline_pd_run(const std::vector<LocalObjective>& objs, const LinearOperator& op,
                          std::int64_t total_inner, const BaselineSteps& steps, const Vec& x0,
                          SlidingOptions options) {
  if (total_inner < 1) throw ConfigError("baseline: iteration count must be >= 1");
  const ParamSchedule s = baseline_schedule(objs, op, steps);
  ZeroDual dual;
  ExactGradients source(objs);
  SlidingSolver solver(objs, op, s, dual, source, x0, std::move(options));
  solver.run(total_inner);
  PdsResult out;
  out.x_bar = solver.state().x_bar;
  out.state = solver.state();
  out.metrics = solver.metrics();
  return out;
}

}  // namespace pdslide
