#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdslide/graph.hpp"
#include "pdslide/json_fwd.hpp"

namespace pdslide {

/// One row of the per-outer-iteration trajectory.
struct TrajectoryPoint {
  std::int64_t k = 0;
  std::int64_t gradients = 0;  // per agent
  std::int64_t rounds = 0;
  std::int64_t samples = 0;  // per agent
  double loss = 0.0;             // sum_i f_i at the stacked average
  double consensus_loss = 0.0;   // sum_i f_i at the mean of the agent blocks
  double feasibility = 0.0;      // ||A xbar - b||_2
  double elapsed_ms = 0.0;
};

/// Counters and trajectory of a single run. Counters are written only by the
/// solver that owns them.
struct RunMetrics {
  std::int64_t gradients = 0;       // per agent, outer-iteration evaluations
  std::int64_t init_gradients = 0;  // per agent, the y_0 evaluation
  std::int64_t samples = 0;         // per agent, stochastic draws
  std::int64_t agents = 1;
  std::int64_t rounds = 0;          // 2 per inner iteration
  std::int64_t operator_applies = 0;
  std::int64_t adjoint_applies = 0;
  std::int64_t outer_iterations = 0;
  std::int64_t inner_iterations = 0;
  double elapsed_ms = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<std::string> warnings;

  std::int64_t total_samples() const { return samples * agents; }

  /// Columns k, gradients, rounds, loss, feasibility, elapsed_ms; the
  /// stochastic layout inserts samples and appends the replication id.
  void write_csv(std::ostream& out, bool stochastic = false, std::int64_t replication = 0, bool header = true) const;
};

nlohmann::json to_json(const RunMetrics& metrics);

enum class PayloadTag { u_block, z_block };

struct MessageRecord {
  std::int64_t round = 0;
  int sender = 0;
  int receiver = 0;
  PayloadTag tag = PayloadTag::u_block;
  std::size_t bytes = 0;
};

/// Receive log of the agent-view execution. With a graph attached, every
/// record is checked against the edge set as it is written.
class MessageLog {
 public:
  MessageLog() = default;
  explicit MessageLog(const CommGraph* graph, bool keep_records = true) : graph_(graph), keep_(keep_records) {}

  void record(const MessageRecord& r);
  /// Appends another log's records and counters, in order.
  void append(const MessageLog& other);
  void clear_records() { records_.clear(); }

  const std::vector<MessageRecord>& records() const { return records_; }
  std::int64_t messages() const { return messages_; }
  std::int64_t bytes() const { return bytes_; }
  /// Violations seen while recording (0 without an attached graph).
  std::int64_t violations() const { return violations_; }

  /// Re-checks every stored record against g; returns the violation count.
  std::int64_t audit(const CommGraph& g) const;

 private:
  const CommGraph* graph_ = nullptr;
  bool keep_ = true;
  std::vector<MessageRecord> records_;
  std::int64_t messages_ = 0;
  std::int64_t bytes_ = 0;
  std::int64_t violations_ = 0;
};

}  // namespace pdslide
