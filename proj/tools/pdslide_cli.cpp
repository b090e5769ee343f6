// Command-line front end: run, plan, validate-schedule, graph-info,
// solve-constrained. Exit codes: 0 success, 1 config error, 2 solver error.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "pdslide/bounds.hpp"
#include "pdslide/config.hpp"
#include "pdslide/error.hpp"
#include "pdslide/harness.hpp"
#include "pdslide/pds.hpp"
#include "pdslide/saddle.hpp"
#include "pdslide/spds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdslide;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  int verbosity = 0;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f.precision(std::numeric_limits<double>::max_digits10);
  return f;
}

std::string out_dir(const Common& c, const std::string& fallback) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("PDSLIDE_OUT_DIR"); env && *env) return env;
  return fallback;
}

void apply_threads(const Common& c) {
  int n = c.threads;
  if (n <= 0)
    if (const char* env = std::getenv("PDSLIDE_THREADS"); env && *env) n = std::atoi(env);
  if (n < 0) throw ConfigError("--threads must be >= 0");
  if (n > 0) omp_set_num_threads(n);
}

std::vector<LocalObjective> build_objectives(const ProblemSpec& p, int m) {
  DataShard data = p.source == ProblemSpec::Source::synthetic
                       ? synthesize_dataset(p.rows, p.features, p.separability, p.data_seed, p.feature_scale)
                       : load_libsvm(p.path);
  if (p.source == ProblemSpec::Source::libsvm) {
    if (p.rows > 0 && static_cast<std::size_t>(p.rows) < data.size()) {
      data.rows.resize(static_cast<std::size_t>(p.rows));
      data.labels.resize(static_cast<std::size_t>(p.rows));
    }
    if (p.feature_scale != 1.0)
      for (auto& row : data.rows)
        for (auto& v : row.value) v *= p.feature_scale;
  }
  std::vector<LocalObjective> objs;
  for (auto& shard : split_shards(data, m, p.split_seed))
    objs.push_back(logistic_objective(std::move(shard), p.mu, p.lipschitz_estimate));
  return objs;
}

ConsensusOperator build_operator(const CommGraph& g, ConsensusOperator::Form form, int d) {
  auto shared = std::make_shared<const CommGraph>(g);
  return form == ConsensusOperator::Form::laplacian ? ConsensusOperator::laplacian(shared, d)
                                                    : ConsensusOperator::incidence(shared, d);
}

int cmd_run(const Common& common) {
  RunConfig cfg = run_config_from_json(load_json_file(common.config));
  if (common.seed) cfg.seed = *common.seed;
  const std::string dir = out_dir(common, "run_out");
  const CommGraph graph = cfg.graph.build();
  const auto objs = build_objectives(cfg.problem, graph.node_count());
  const ConsensusOperator op = build_operator(graph, cfg.form, objs.front().dim());
  const Vec x0 = Vec::Zero(op.cols());
  const double L = uniform_lipschitz(objs) * cfg.algorithm.lipschitz_multiplier;

  ScheduleInputs in;
  in.lipschitz = L;
  in.mu = uniform_mu(objs);
  in.op_norm = op.norm();
  in.R = cfg.algorithm.R;
  json summary = {{"algorithm", to_string(cfg.algorithm.algorithm)}, {"m", graph.node_count()},
                  {"d_max", graph.max_degree()}, {"seed", cfg.seed}};

  if (cfg.algorithm.algorithm == Algorithm::spds) {
    in.mode = ScheduleMode::stochastic;
    in.c = cfg.algorithm.c;
    in.sigma = cfg.problem.sigma;
    in.N = cfg.N;
    const ParamSchedule s = build_stochastic(in);
    std::vector<StochasticOracle> oracles;
    for (const auto& o : objs)
      oracles.push_back(cfg.problem.noise == ProblemSpec::Noise::subsample
                            ? StochasticOracle::subsampling(o)
                            : StochasticOracle::gaussian(o, cfg.problem.sigma));
    StochasticRunConfig rc;
    rc.replications = cfg.replications;
    rc.base_seed = cfg.seed;
    rc.N = cfg.N;
    rc.x0 = x0;
    rc.options.max_batch = cfg.algorithm.max_batch;
    rc.keep_metrics = true;
    const ReplicationReport report = replicate(oracles, op, s, rc);
    auto csv = open_out(fs::path(dir) / "metrics.csv");
    for (std::size_t r = 0; r < report.metrics.size(); ++r)
      report.metrics[r].write_csv(csv, true, static_cast<std::int64_t>(r), r == 0);
    summary["schedule"] = to_json(s.inputs());
    summary["report"] = to_json(report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  } else {
    PdsResult result;
    if (cfg.algorithm.algorithm == Algorithm::pds) {
      const ParamSchedule s = build_deterministic(in);
      result = pds_run(objs, op, s, cfg.N, x0, cfg.view);
      summary["schedule"] = to_json(s.inputs());
      if (cfg.view == View::agent) {
        summary["messages"] = result.log.messages();
        summary["message_bytes"] = result.log.bytes();
        summary["non_edge_messages"] = result.log.violations();
      }
    } else {
      const auto steps = default_baseline_steps(L, op.norm(), cfg.algorithm.baseline_rho);
      result = baseline_pd_run(objs, op, cfg.N, steps, x0);
      summary["eta"] = steps.eta;
      summary["q"] = steps.q;
    }
    auto csv = open_out(fs::path(dir) / "metrics.csv");
    result.metrics.write_csv(csv);
    summary["metrics"] = to_json(result.metrics);
    summary["loss"] = consensus_value(objs, result.x_bar);
    summary["feasibility"] = op.apply(result.x_bar).norm();
  }
  auto js = open_out(fs::path(dir) / "summary.json");
  js << summary.dump(2) << '\n';
  if (common.verbosity >= 0) std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_plan(const Common& common, const std::string& scale, const std::string& dataset) {
  ExperimentPlan base;
  if (scale == "paper") {
    if (dataset.empty()) throw ConfigError("--scale paper needs --dataset <libsvm file>");
    base = paper_plan(dataset);
  } else {
    base = desk_plan();
  }
  ExperimentPlan plan = common.config.empty() ? base : plan_from_json(load_json_file(common.config), base);
  if (common.seed) plan.seed = *common.seed;
  plan.out_dir = out_dir(common, plan.out_dir);
  const PlanResult result = run_plan(plan);
  write_plan_outputs(result, plan.out_dir);
  if (common.verbosity >= 1)
    for (const auto& line : result.log) std::cerr << line << '\n';
  write_results_csv(std::cout, result);
  return 0;
}

int cmd_validate(const Common& common) {
  ValidateConfig cfg = validate_config_from_json(load_json_file(common.config));
  if (cfg.graph) cfg.inputs.op_norm = build_operator(cfg.graph->build(), cfg.form, cfg.d).norm();
  const ParamSchedule s =
      cfg.inputs.mode == ScheduleMode::stochastic ? build_stochastic(cfg.inputs) : build_deterministic(cfg.inputs);
  const ConditionReport report = verify_conditions(s, cfg.inputs.mode, cfg.N);
  json j = to_json(report);
  j["inputs"] = to_json(s.inputs());
  std::cout << j.dump(2) << '\n';
  if (!common.out.empty()) open_out(common.out) << j.dump(2) << '\n';
  if (!report.all_passed()) {
    std::cerr << "schedule violates " << report.failures() << " condition checks\n";
    return 2;
  }
  return 0;
}

int cmd_graph_info(const Common& common, const std::string& edges) {
  GraphInfoConfig cfg;
  if (!common.config.empty()) cfg = graph_info_config_from_json(load_json_file(common.config));
  if (!edges.empty()) {
    cfg.graph.source = GraphSpec::Source::edge_list;
    cfg.graph.path = edges;
  }
  if (common.config.empty() && edges.empty()) throw ConfigError("graph-info needs --config or --edges");
  const CommGraph g = cfg.graph.build();
  const ConsensusOperator op = build_operator(g, cfg.form, cfg.d);
  std::cout.precision(std::numeric_limits<double>::max_digits10);
  std::cout << "m " << g.node_count() << "\nedges " << g.edge_count() << "\nd_max " << g.max_degree()
            << "\nnorm_A " << op.norm() << "\nform " << to_string(cfg.form) << "\n";
  return 0;
}

int cmd_solve_constrained(const Common& common) {
  ConstrainedSpec spec;
  if (!common.config.empty()) spec = constrained_spec_from_json(load_json_file(common.config));
  if (common.seed) spec.seed = *common.seed;
  const ConstrainedQp qp = make_constrained_qp(spec);
  const KktSolution kkt = kkt_reference(qp.objs, *qp.A, qp.b);
  ScheduleInputs in;
  in.lipschitz = uniform_lipschitz(qp.objs);
  in.op_norm = qp.A->norm();
  in.R = spec.R;
  const ParamSchedule s = build_deterministic(in);
  const Vec x0 = Vec::Zero(qp.A->cols());
  const ConstrainedResult r = constrained_solve(qp.objs, qp.A, qp.b, s, spec.N, x0, kkt.value);
  const double V = 0.5 * (x0 - kkt.x).squaredNorm();
  json j = {{"N", spec.N},
            {"f_star", r.f_star},
            {"f_gap", r.f_gap},
            {"residual", r.residual},
            {"gap_bound", constrained_gap_bound(s, spec.N, V)},
            {"residual_bound", constrained_residual_bound(s, spec.N, kkt.z.norm(), V)},
            {"metrics", to_json(r.metrics)}};
  std::cout << j.dump(2) << '\n';
  if (!common.out.empty()) open_out(common.out) << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual sliding solvers for decentralized optimization"};
  app.require_subcommand(1, 1);
  Common common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--out", common.out, "output path (overrides PDSLIDE_OUT_DIR)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--threads", common.threads, "OpenMP threads (overrides PDSLIDE_THREADS)");
    sub->add_flag("-v,--verbose", common.verbosity, "more diagnostics");
  };
  auto* run = app.add_subcommand("run", "one solver run");
  add_common(run, true);
  auto* plan = app.add_subcommand("plan", "run an experiment plan");
  add_common(plan, false);
  std::string scale = "desk";
  std::string dataset;
  plan->add_option("--scale", scale, "default plan")->check(CLI::IsMember({"desk", "paper"}));
  plan->add_option("--dataset", dataset, "LIBSVM file for --scale paper");
  auto* validate = app.add_subcommand("validate-schedule", "check the convergence conditions of a schedule");
  add_common(validate, true);
  auto* info = app.add_subcommand("graph-info", "print m, |E|, d_max and ||A||");
  add_common(info, false);
  std::string edges;
  info->add_option("--edges", edges, "edge-list file");
  auto* constrained = app.add_subcommand("solve-constrained", "random equality-constrained QP via the saddle solver");
  add_common(constrained, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (auto* sub : app.get_subcommands())
      if (sub->count("--seed")) common.seed = seed;
    apply_threads(common);
    if (*run) return cmd_run(common);
    if (*plan) return cmd_plan(common, scale, dataset);
    if (*validate) return cmd_validate(common);
    if (*info) return cmd_graph_info(common, edges);
    if (*constrained) return cmd_solve_constrained(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
