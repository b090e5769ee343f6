#pragma once

#include <cstdint>
#include <vector>

#include "pdslide/pds.hpp"

namespace pdslide {

struct SpdsOptions {
  /// Upper bound on c_k; 0 means uncapped. Capping records a warning.
  std::int64_t max_batch = 0;
  bool record_trajectory = true;
  std::function<void(const InnerEvent&)> on_inner;
  std::vector<TraceEvent>* trace = nullptr;
};

struct SpdsResult {
  Vec x_bar;
  SolverState state;
  RunMetrics metrics;
};

/// Stochastic PDS: y_k is replaced by the batch-c_k average v_k at
/// \underline x_k, drawn from streams keyed by (seed, agent, k).
/// Needs a schedule from build_stochastic planned for at least N iterations.
SpdsResult spds_run(const std::vector<StochasticOracle>& oracles, const LinearOperator& op, const ParamSchedule& s,
                    std::int64_t N, const Vec& x0, std::uint64_t seed, const SpdsOptions& options = {});

struct StochasticRunConfig {
  std::int64_t replications = 1;
  std::uint64_t base_seed = 0;
  std::int64_t N = 1;
  Vec x0;
  SpdsOptions options;
  /// Keep each replication's RunMetrics, with trajectories when
  /// options.record_trajectory is set.
  bool keep_metrics = false;
};

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one replication
  double min = 0.0;
  double max = 0.0;
};

SampleStats summarize(const std::vector<double>& values);

struct ReplicationRow {
  std::uint64_t seed = 0;
  double loss = 0.0;  // sum_i f_i(xbar^(i))
  double feasibility = 0.0;
  std::int64_t samples = 0;  // total over agents
  std::int64_t rounds = 0;
};

struct ReplicationReport {
  std::vector<ReplicationRow> rows;
  std::vector<Vec> x_bars;
  std::vector<RunMetrics> metrics;  // filled when keep_metrics is set
  SampleStats loss;
  SampleStats feasibility;
  std::int64_t total_samples = 0;
  std::int64_t total_rounds = 0;
  std::vector<std::string> warnings;
};

/// Runs replication r with seed base_seed + r. Replications may execute in
/// parallel; the report depends only on the config.
ReplicationReport replicate(const std::vector<StochasticOracle>& oracles, const LinearOperator& op,
                            const ParamSchedule& s, const StochasticRunConfig& config);

nlohmann::json to_json(const ReplicationReport& report);

}  // namespace pdslide
