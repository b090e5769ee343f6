#include "pdslide/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "pdslide/error.hpp"
#include "pdslide/pds.hpp"
#include "pdslide/rng.hpp"
#include "pdslide/schedule.hpp"
#include "pdslide/spds.hpp"

namespace pdslide {

Separability parse_separability(std::string_view name) {
  if (name == "separable") return Separability::separable;
  if (name == "overlapping") return Separability::overlapping;
  throw ConfigError("unknown separability '" + std::string(name) + "'");
}

std::string_view to_string(Separability s) { return s == Separability::separable ? "separable" : "overlapping"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "pds") return Algorithm::pds;
  if (name == "spds") return Algorithm::spds;
  if (name == "baseline") return Algorithm::baseline;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::pds:
      return "pds";
    case Algorithm::spds:
      return "spds";
    case Algorithm::baseline:
      return "baseline";
  }
  return "?";
}

std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::na:
      return "NA";
    case CellStatus::error:
      return "error";
  }
  return "?";
}

DataShard synthesize_dataset(int n, int d, Separability separability, std::uint64_t seed, double scale) {
  if (n < 1 || d < 1) throw ConfigError("synthesize_dataset: n and d must be >= 1");
  if (!(scale > 0.0)) throw ConfigError("synthesize_dataset: scale must be positive");
  KeyedStream dir_stream(hash_key(seed, 0xd1));
  Vec u(d);
  for (int c = 0; c < d; ++c) u[c] = dir_stream.normal();
  u /= u.norm();

  DataShard shard;
  shard.feature_dim = d;
  for (int r = 0; r < n; ++r) {
    KeyedStream stream(hash_key(seed, 0xda7a, static_cast<std::uint64_t>(r)));
    const int y = (stream() & 1U) ? 1 : -1;
    Vec a(d);
    for (int c = 0; c < d; ++c) a[c] = stream.normal();
    a -= a.dot(u) * u;  // noise orthogonal to u
    const double g = stream.normal();
    const double along = separability == Separability::separable ? y * (0.5 + 0.5 * std::abs(g)) : y * 0.5 + g;
    a += along * u;
    a *= scale;
    SparseRow row;
    for (int c = 0; c < d; ++c) {
      row.index.push_back(c + 1);
      row.value.push_back(a[c]);
    }
    shard.rows.push_back(std::move(row));
    shard.labels.push_back(y);
  }
  return shard;
}

CommGraph GraphSpec::build() const {
  switch (source) {
    case Source::erdos_renyi:
      return erdos_renyi(m, edge_prob, seed);
    case Source::named:
      return named_graph(kind, m);
    case Source::edge_list:
      return load_edge_list(path);
  }
  throw ConfigError("graph spec: unknown source");
}

ExperimentPlan desk_plan() {
  ExperimentPlan plan;
  GraphSpec path;
  path.label = "path";
  path.source = GraphSpec::Source::named;
  path.kind = GraphKind::path;
  path.m = 20;
  path.expected_max_degree = 2;
  GraphSpec er;
  er.label = "er";
  er.source = GraphSpec::Source::erdos_renyi;
  er.m = 20;
  er.edge_prob = 0.1;
  er.seed = 3;
  er.expected_max_degree = 5;
  GraphSpec complete;
  complete.label = "complete";
  complete.source = GraphSpec::Source::named;
  complete.kind = GraphKind::complete;
  complete.m = 20;
  complete.expected_max_degree = 19;
  plan.graphs = {path, er, complete};
  plan.problem.rows = 2000;
  plan.problem.features = 10;
  plan.problem.feature_scale = 0.1;
  AlgorithmSpec pds;
  AlgorithmSpec baseline;
  baseline.algorithm = Algorithm::baseline;
  AlgorithmSpec spds;
  spds.algorithm = Algorithm::spds;
  spds.R = 1.0;
  spds.c = 0.25;
  plan.algorithms = {pds, baseline, spds};
  plan.target_gaps = {1e-3, 1e-4};
  plan.round_budget = 4000;
  return plan;
}

ExperimentPlan paper_plan(const std::string& dataset_path) {
  ExperimentPlan plan;
  const double probs[] = {0.02, 0.05, 0.12};
  const int degrees[] = {4, 9, 20};
  for (int g = 0; g < 3; ++g) {
    GraphSpec spec;
    spec.label = "G" + std::to_string(g + 1);
    spec.source = GraphSpec::Source::erdos_renyi;
    spec.m = 100;
    spec.edge_prob = probs[g];
    spec.seed = static_cast<std::uint64_t>(g + 1);
    spec.expected_max_degree = degrees[g];
    plan.graphs.push_back(spec);
  }
  plan.problem.source = ProblemSpec::Source::libsvm;
  plan.problem.path = dataset_path;
  plan.problem.rows = 20000;
  AlgorithmSpec pds;
  AlgorithmSpec baseline;
  baseline.algorithm = Algorithm::baseline;
  AlgorithmSpec spds;
  spds.algorithm = Algorithm::spds;
  spds.R = 1.0;
  spds.c = 0.25;
  plan.algorithms = {pds, baseline, spds};
  plan.targets = {70.0, 60.0};
  plan.round_budget = 8000;
  return plan;
}

namespace {

struct Instance {
  std::vector<LocalObjective> objs;
  double f_star = 0.0;
  double lipschitz = 0.0;
};

DataShard load_problem_data(const ProblemSpec& p) {
  if (p.source == ProblemSpec::Source::synthetic)
    return synthesize_dataset(p.rows, p.features, p.separability, p.data_seed, p.feature_scale);
  DataShard full = load_libsvm(p.path);
  if (p.rows > 0 && static_cast<std::size_t>(p.rows) < full.size()) {
    full.rows.resize(static_cast<std::size_t>(p.rows));
    full.labels.resize(static_cast<std::size_t>(p.rows));
  }
  if (p.feature_scale != 1.0)
    for (auto& row : full.rows)
      for (auto& v : row.value) v *= p.feature_scale;
  return full;
}

Instance build_instance(const ExperimentPlan& plan, int m) {
  Instance inst;
  const DataShard data = load_problem_data(plan.problem);
  for (auto& shard : split_shards(data, m, plan.problem.split_seed))
    inst.objs.push_back(logistic_objective(std::move(shard), plan.problem.mu, plan.problem.lipschitz_estimate));
  inst.lipschitz = uniform_lipschitz(inst.objs);
  inst.f_star = centralized_solve(inst.objs, 1e-7).value;
  return inst;
}

struct Job {
  std::size_t algo;
  std::size_t graph;
};

struct JobOutput {
  std::vector<CellResult> cells;  // one per target, in target order
  RunTrace trace;
};

CellResult blank_cell(const AlgorithmSpec& a, const GraphSpec& g, const CommGraph& graph, const LinearOperator& op,
                      double target) {
  CellResult c;
  c.algorithm = a.algorithm;
  c.graph = g.label;
  c.max_degree = graph.max_degree();
  c.op_norm = op.norm();
  c.target = target;
  return c;
}

void fill_from(CellResult& c, const TrajectoryPoint& pt, const RunMetrics& m) {
  c.status = CellStatus::ok;
  c.loss = pt.consensus_loss;
  c.feasibility = pt.feasibility;
  c.rounds = pt.rounds;
  c.gradients = pt.gradients;
  c.samples = pt.samples * m.agents;
  c.outer_iterations = pt.k;
}

// Indices of targets, loosest first.
std::vector<std::size_t> target_order(const std::vector<double>& targets) {
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return targets[a] > targets[b]; });
  return order;
}

JobOutput run_deterministic(const AlgorithmSpec& a, const GraphSpec& gspec, const CommGraph& graph,
                            const LinearOperator& op, const Instance& inst, const std::vector<double>& targets,
                            const ExperimentPlan& plan) {
  JobOutput out;
  out.trace.algorithm = a.algorithm;
  out.trace.graph = gspec.label;
  for (double t : targets) out.cells.push_back(blank_cell(a, gspec, graph, op, t));
  const Vec x0 = Vec::Zero(op.cols());
  const double L = inst.lipschitz * a.lipschitz_multiplier;

  std::optional<ParamSchedule> sched;
  if (a.algorithm == Algorithm::pds) {
    ScheduleInputs in;
    in.lipschitz = L;
    in.mu = uniform_mu(inst.objs);
    in.op_norm = op.norm();
    in.R = a.R;
    sched = build_deterministic(in);
  } else {
    sched = build_constant(L, op.norm(), [&] {
      const auto st = default_baseline_steps(L, op.norm(), a.baseline_rho);
      return ConstantSteps{st.eta, st.q};
    }());
  }

  const auto order = target_order(targets);
  std::size_t next = 0;
  try {
    ZeroDual dual;
    ExactGradients source(inst.objs);
    SlidingSolver solver(inst.objs, op, *sched, dual, source, x0);
    while (next < order.size()) {
      const std::int64_t k = solver.k() + 1;
      const double planned = static_cast<double>(solver.metrics().rounds) + 2.0 * sched->T(k);
      if (planned > static_cast<double>(plan.round_budget)) break;
      solver.step();
      const auto& pt = solver.metrics().trajectory.back();
      while (next < order.size() && pt.consensus_loss <= targets[order[next]]) {
        fill_from(out.cells[order[next]], pt, solver.metrics());
        ++next;
      }
    }
    for (; next < order.size(); ++next) {
      auto& c = out.cells[order[next]];
      c.status = CellStatus::na;
      c.rounds = solver.metrics().rounds;
      c.gradients = solver.metrics().gradients;
      c.outer_iterations = solver.k();
      if (!solver.metrics().trajectory.empty()) {
        c.loss = solver.metrics().trajectory.back().consensus_loss;
        c.feasibility = solver.metrics().trajectory.back().feasibility;
      }
      c.message = "round budget exhausted";
    }
    out.trace.metrics = solver.metrics();
  } catch (const Error& e) {
    for (; next < order.size(); ++next) {
      out.cells[order[next]].status = CellStatus::error;
      out.cells[order[next]].message = e.what();
    }
  }
  return out;
}

JobOutput run_stochastic(const AlgorithmSpec& a, const GraphSpec& gspec, const CommGraph& graph,
                         const LinearOperator& op, const Instance& inst, const std::vector<double>& targets,
                         const ExperimentPlan& plan) {
  JobOutput out;
  out.trace.algorithm = a.algorithm;
  out.trace.graph = gspec.label;
  for (double t : targets) out.cells.push_back(blank_cell(a, gspec, graph, op, t));
  const Vec x0 = Vec::Zero(op.cols());
  std::vector<StochasticOracle> oracles;
  for (const auto& o : inst.objs)
    oracles.push_back(plan.problem.noise == ProblemSpec::Noise::subsample ? StochasticOracle::subsampling(o)
                                                                         : StochasticOracle::gaussian(o, plan.problem.sigma));
  ScheduleInputs in;
  in.mode = ScheduleMode::stochastic;
  in.lipschitz = inst.lipschitz * a.lipschitz_multiplier;
  in.mu = uniform_mu(inst.objs);
  in.sigma = plan.problem.sigma;
  in.op_norm = op.norm();
  in.R = a.R;
  in.c = a.c;

  const auto order = target_order(targets);
  std::size_t next = 0;
  std::int64_t N = a.spds_n_start;
  try {
    while (next < order.size() && N <= a.spds_n_max) {
      in.N = N;
      const ParamSchedule s = build_stochastic(in);
      double planned = 0.0;
      for (std::int64_t k = 1; k <= N; ++k) planned += 2.0 * s.T(k);
      if (planned > static_cast<double>(plan.round_budget)) break;
      SpdsOptions opts;
      opts.max_batch = a.max_batch;
      const auto run = spds_run(oracles, op, s, N, x0, plan.seed, opts);
      const auto& pt = run.metrics.trajectory.back();
      out.trace.metrics = run.metrics;
      while (next < order.size() && pt.consensus_loss <= targets[order[next]]) {
        fill_from(out.cells[order[next]], pt, run.metrics);
        ++next;
      }
      N += a.spds_n_step;
    }
    for (; next < order.size(); ++next) {
      auto& c = out.cells[order[next]];
      c.status = CellStatus::na;
      c.message = N > a.spds_n_max ? "outer iteration limit reached" : "round budget exhausted";
    }
  } catch (const Error& e) {
    for (; next < order.size(); ++next) {
      out.cells[order[next]].status = CellStatus::error;
      out.cells[order[next]].message = e.what();
    }
  }
  return out;
}

}  // namespace

PlanResult run_plan(const ExperimentPlan& plan) {
  if (plan.graphs.empty()) throw ConfigError("plan: no graphs");
  if (plan.algorithms.empty()) throw ConfigError("plan: no algorithms");
  if (plan.targets.empty() && plan.target_gaps.empty()) throw ConfigError("plan: no targets");
  if (plan.round_budget < 2) throw ConfigError("plan: round budget must be >= 2");
  if (plan.problem.source == ProblemSpec::Source::libsvm && !std::filesystem::exists(plan.problem.path))
    throw ConfigError("plan: dataset '" + plan.problem.path + "' does not exist");

  std::vector<CommGraph> graphs;
  for (const auto& g : plan.graphs) graphs.push_back(g.build());
  const int m = graphs.front().node_count();
  for (const auto& g : graphs)
    if (g.node_count() != m) throw ConfigError("plan: all graphs must have the same node count");

  PlanResult result;
  const Instance inst = build_instance(plan, m);
  result.f_star = inst.f_star;
  result.lipschitz = inst.lipschitz;
  result.targets = plan.targets;
  for (double gap : plan.target_gaps) result.targets.push_back(inst.f_star + gap * std::max(1.0, std::abs(inst.f_star)));
  {
    std::ostringstream msg;
    msg.precision(std::numeric_limits<double>::max_digits10);
    msg << "f* = " << inst.f_star << ", L (trace or spectral estimate) = " << inst.lipschitz;
    result.log.push_back(msg.str());
  }

  const int d = inst.objs.front().dim();
  std::vector<std::shared_ptr<ConsensusOperator>> ops;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    auto shared = std::make_shared<const CommGraph>(graphs[g]);
    ops.push_back(std::make_shared<ConsensusOperator>(plan.form == ConsensusOperator::Form::laplacian
                                                          ? ConsensusOperator::laplacian(shared, d)
                                                          : ConsensusOperator::incidence(shared, d)));
    if (plan.graphs[g].expected_max_degree && *plan.graphs[g].expected_max_degree != graphs[g].max_degree())
      result.log.push_back("graph " + plan.graphs[g].label + ": expected d_max " +
                           std::to_string(*plan.graphs[g].expected_max_degree) + ", built " +
                           std::to_string(graphs[g].max_degree()));
  }

  std::vector<Job> jobs;
  for (std::size_t a = 0; a < plan.algorithms.size(); ++a)
    for (std::size_t g = 0; g < graphs.size(); ++g) jobs.push_back({a, g});
  std::vector<JobOutput> outputs(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& a = plan.algorithms[jobs[j].algo];
    const auto g = jobs[j].graph;
    outputs[j] = a.algorithm == Algorithm::spds
                     ? run_stochastic(a, plan.graphs[g], graphs[g], *ops[g], inst, result.targets, plan)
                     : run_deterministic(a, plan.graphs[g], graphs[g], *ops[g], inst, result.targets, plan);
  }

  for (auto& o : outputs) {
    for (auto& c : o.cells) result.cells.push_back(std::move(c));
    result.traces.push_back(std::move(o.trace));
  }
  return result;
}

void write_results_csv(std::ostream& out, const PlanResult& r) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "algorithm,graph,d_max,norm_A,target,status,loss,achieved_feasibility,rounds,gradients,samples,"
         "outer_iterations,message\n";
  for (const auto& c : r.cells) {
    std::string msg = c.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << to_string(c.algorithm) << ',' << c.graph << ',' << c.max_degree << ',' << c.op_norm << ',' << c.target
        << ',' << to_string(c.status) << ',';
    if (c.status == CellStatus::ok) {
      out << c.loss << ',' << c.feasibility << ',' << c.rounds << ',' << c.gradients << ',' << c.samples << ','
          << c.outer_iterations;
    } else {
      out << "NA,NA,NA,NA,NA,NA";
    }
    out << ',' << msg << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json to_json(const PlanResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json j = {{"algorithm", to_string(c.algorithm)},
                        {"graph", c.graph},
                        {"d_max", c.max_degree},
                        {"norm_A", c.op_norm},
                        {"target", c.target},
                        {"status", to_string(c.status)},
                        {"message", c.message}};
    if (c.status == CellStatus::ok) {
      j["loss"] = c.loss;
      j["achieved_feasibility"] = c.feasibility;
      j["rounds"] = c.rounds;
      j["gradients"] = c.gradients;
      j["samples"] = c.samples;
      j["outer_iterations"] = c.outer_iterations;
    }
    cells.push_back(std::move(j));
  }
  return {{"f_star", r.f_star}, {"lipschitz", r.lipschitz}, {"targets", r.targets}, {"log", r.log}, {"cells", cells}};
}

void write_plan_outputs(const PlanResult& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "trajectories");
  fs::create_directories(root / "plot_data");
  auto open = [](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f.precision(std::numeric_limits<double>::max_digits10);
    return f;
  };
  {
    auto f = open(root / "results.csv");
    write_results_csv(f, r);
  }
  {
    auto f = open(root / "results.json");
    f << to_json(r).dump(2) << '\n';
  }
  for (const auto& t : r.traces) {
    const std::string stem = std::string(to_string(t.algorithm)) + "_" + t.graph;
    {
      auto f = open(root / "trajectories" / (stem + ".csv"));
      t.metrics.write_csv(f, t.algorithm == Algorithm::spds);
    }
    auto rounds = open(root / "plot_data" / (stem + "_loss_vs_rounds.dat"));
    auto grads = open(root / "plot_data" / (stem + "_loss_vs_gradients.dat"));
    for (const auto& p : t.metrics.trajectory) {
      rounds << p.rounds << ' ' << p.consensus_loss << '\n';
      grads << (t.algorithm == Algorithm::spds ? p.samples * t.metrics.agents : p.gradients) << ' '
            << p.consensus_loss << '\n';
    }
  }
}

}  // namespace pdslide
