#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pdslide/harness.hpp"
#include "pdslide/json_fwd.hpp"
#include "pdslide/pds.hpp"
#include "pdslide/schedule.hpp"

namespace pdslide {

/// Parses JSON text. Malformed input raises ConfigError with the line and
/// column of the offending byte.
nlohmann::json parse_json_text(std::string_view text, std::string_view source = "<input>");
nlohmann::json load_json_file(const std::string& path);

// Every *_from_json reader rejects unknown keys and wrong value types with a
// ConfigError naming the key path. Missing keys keep the value in `base`.

GraphSpec graph_spec_from_json(const nlohmann::json& j, GraphSpec base = {});
ProblemSpec problem_spec_from_json(const nlohmann::json& j, ProblemSpec base = {});
AlgorithmSpec algorithm_spec_from_json(const nlohmann::json& j, AlgorithmSpec base = {});
ScheduleInputs schedule_inputs_from_json(const nlohmann::json& j, ScheduleInputs base = {});
ExperimentPlan plan_from_json(const nlohmann::json& j, ExperimentPlan base);

/// One solver run (`run` subcommand).
struct RunConfig {
  GraphSpec graph;
  ProblemSpec problem;
  AlgorithmSpec algorithm;
  ConsensusOperator::Form form = ConsensusOperator::Form::laplacian;
  View view = View::network;
  /// Outer iterations (inner iterations for the baseline).
  std::int64_t N = 50;
  std::int64_t replications = 1;
  std::uint64_t seed = 1;
};

RunConfig run_config_from_json(const nlohmann::json& j);

/// `graph-info` input: a graph and the operator built on it.
struct GraphInfoConfig {
  GraphSpec graph;
  ConsensusOperator::Form form = ConsensusOperator::Form::laplacian;
  int d = 1;
};

GraphInfoConfig graph_info_config_from_json(const nlohmann::json& j);

/// `validate-schedule` input. ||A|| comes from `inputs` or, when a graph is
/// given, from the operator on that graph.
struct ValidateConfig {
  ScheduleInputs inputs;
  std::int64_t N = 100;
  std::optional<GraphSpec> graph;
  ConsensusOperator::Form form = ConsensusOperator::Form::laplacian;
  int d = 1;
};

ValidateConfig validate_config_from_json(const nlohmann::json& j);

/// Random min sum_i f_i(x_i) s.t. A x = b with diagonal quadratics
/// f_i = 1/2 x'Qx + c'x, Q_jj in [q_min, q_max], A Gaussian, b = A x_feas.
struct ConstrainedSpec {
  int blocks = 4;
  int d = 2;
  int constraints = 3;
  double q_min = 1.0;
  double q_max = 4.0;
  std::uint64_t seed = 1;
  std::int64_t N = 40;
  double R = 1.0;
};

ConstrainedSpec constrained_spec_from_json(const nlohmann::json& j);

struct ConstrainedQp {
  std::vector<LocalObjective> objs;
  std::shared_ptr<const LinearOperator> A;
  Vec b;
};

ConstrainedQp make_constrained_qp(const ConstrainedSpec& spec);

}  // namespace pdslide
