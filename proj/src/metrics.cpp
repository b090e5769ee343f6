#include "pdslide/metrics.hpp"

#include <limits>
#include <ostream>

namespace pdslide {

void RunMetrics::write_csv(std::ostream& out, bool stochastic, std::int64_t replication, bool header) const {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  if (header)
    out << (stochastic ? "k,gradients,samples,rounds,loss,feasibility,elapsed_ms,replication\n"
                       : "k,gradients,rounds,loss,feasibility,elapsed_ms\n");
  for (const auto& p : trajectory) {
    out << p.k << ',' << p.gradients << ',';
    if (stochastic) out << p.samples << ',';
    out << p.rounds << ',' << p.loss << ',' << p.feasibility << ',' << p.elapsed_ms;
    if (stochastic) out << ',' << replication;
    out << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json to_json(const RunMetrics& m) {
  nlohmann::json j = {{"gradients", m.gradients},
                      {"init_gradients", m.init_gradients},
                      {"samples", m.samples},
                      {"total_samples", m.total_samples()},
                      {"agents", m.agents},
                      {"rounds", m.rounds},
                      {"operator_applies", m.operator_applies},
                      {"adjoint_applies", m.adjoint_applies},
                      {"outer_iterations", m.outer_iterations},
                      {"inner_iterations", m.inner_iterations},
                      {"elapsed_ms", m.elapsed_ms},
                      {"warnings", m.warnings}};
  if (!m.trajectory.empty()) {
    const auto& last = m.trajectory.back();
    j["final"] = {{"loss", last.loss}, {"consensus_loss", last.consensus_loss}, {"feasibility", last.feasibility}};
  }
  return j;
}

void MessageLog::record(const MessageRecord& r) {
  ++messages_;
  bytes_ += static_cast<std::int64_t>(r.bytes);
  if (graph_ && !graph_->adjacent(r.sender, r.receiver)) ++violations_;
  if (keep_) records_.push_back(r);
}

void MessageLog::append(const MessageLog& other) {
  messages_ += other.messages_;
  bytes_ += other.bytes_;
  violations_ += other.violations_;
  if (keep_) records_.insert(records_.end(), other.records_.begin(), other.records_.end());
}

std::int64_t MessageLog::audit(const CommGraph& g) const {
  std::int64_t bad = 0;
  for (const auto& r : records_) {
    const bool in_range = r.sender >= 0 && r.receiver >= 0 && r.sender < g.node_count() && r.receiver < g.node_count();
    if (!in_range || !g.adjacent(r.sender, r.receiver)) ++bad;
  }
  return bad;
}

}  // namespace pdslide
