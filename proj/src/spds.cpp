#include "pdslide/spds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "pdslide/error.hpp"

namespace pdslide {

namespace {

std::vector<LocalObjective> objectives_of(const std::vector<StochasticOracle>& oracles) {
  std::vector<LocalObjective> objs;
  objs.reserve(oracles.size());
  for (const auto& o : oracles) objs.push_back(o.objective());
  return objs;
}

}  // namespace

SpdsResult spds_run(const std::vector<StochasticOracle>& oracles, const LinearOperator& op, const ParamSchedule& s,
                    std::int64_t N, const Vec& x0, std::uint64_t seed, const SpdsOptions& options) {
  if (N < 1) throw ConfigError("spds_run: N must be >= 1");
  if (s.kind() != ParamSchedule::Kind::stochastic) throw ConfigError("spds_run: needs a stochastic schedule");
  if (N > *s.inputs().N)
    throw ConfigError("spds_run: schedule was planned for N = " + std::to_string(*s.inputs().N) + ", asked for " +
                      std::to_string(N));
  const auto objs = objectives_of(oracles);
  ZeroDual dual;
  MiniBatchGradients source(oracles, s, seed, options.max_batch);
  SlidingOptions sliding;
  sliding.evaluate_y0 = false;
  sliding.record_trajectory = options.record_trajectory;
  sliding.on_inner = options.on_inner;
  sliding.trace = options.trace;
  SlidingSolver solver(objs, op, s, dual, source, x0, std::move(sliding));
  solver.run(N);
  SpdsResult out;
  out.x_bar = solver.state().x_bar;
  out.state = solver.state();
  out.metrics = solver.metrics();
  return out;
}

SampleStats summarize(const std::vector<double>& values) {
  SampleStats st;
  if (values.empty()) return st;
  const double n = static_cast<double>(values.size());
  st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  st.min = *std::min_element(values.begin(), values.end());
  st.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / (n - 1.0));
  }
  return st;
}

ReplicationReport replicate(const std::vector<StochasticOracle>& oracles, const LinearOperator& op,
                            const ParamSchedule& s, const StochasticRunConfig& config) {
  if (config.replications < 1) throw ConfigError("replicate: replication count must be >= 1");
  const auto objs = objectives_of(oracles);
  const auto n = static_cast<std::size_t>(config.replications);
  ReplicationReport report;
  report.rows.resize(n);
  report.x_bars.resize(n);
  std::vector<std::vector<std::string>> warnings(n);
  std::vector<std::exception_ptr> errors(n);
  SpdsOptions options = config.options;
  if (!config.keep_metrics) options.record_trajectory = false;
  if (config.keep_metrics) report.metrics.resize(n);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < config.replications; ++r) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(r);
    try {
      const auto run = spds_run(oracles, op, s, config.N, config.x0, seed, options);
      auto& row = report.rows[r];
      row.seed = seed;
      row.loss = stacked_value(objs, run.x_bar);
      row.feasibility = op.apply(run.x_bar).norm();
      row.samples = run.metrics.total_samples();
      row.rounds = run.metrics.rounds;
      report.x_bars[r] = run.x_bar;
      warnings[r] = run.metrics.warnings;
      if (config.keep_metrics) report.metrics[r] = run.metrics;
    } catch (const Error& e) {
      errors[r] = std::make_exception_ptr(SolverError("replication with seed " + std::to_string(seed) + ": " + e.what()));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> losses, feas;
  for (std::size_t r = 0; r < n; ++r) {
    losses.push_back(report.rows[r].loss);
    feas.push_back(report.rows[r].feasibility);
    report.total_samples += report.rows[r].samples;
    report.total_rounds += report.rows[r].rounds;
    for (auto& w : warnings[r])
      if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end())
        report.warnings.push_back(w);
  }
  report.loss = summarize(losses);
  report.feasibility = summarize(feas);
  return report;
}

nlohmann::json to_json(const ReplicationReport& report) {
  auto stats = [](const SampleStats& s) {
    return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"seed", r.seed},
                    {"loss", r.loss},
                    {"feasibility", r.feasibility},
                    {"samples", r.samples},
                    {"rounds", r.rounds}});
  return {{"replications", report.rows.size()},
          {"loss", stats(report.loss)},
          {"feasibility", stats(report.feasibility)},
          {"total_samples", report.total_samples},
          {"total_rounds", report.total_rounds},
          {"warnings", report.warnings},
          {"rows", rows}};
}

}  // namespace pdslide
