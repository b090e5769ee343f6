#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdslide/dataset.hpp"
#include "pdslide/graph.hpp"
#include "pdslide/linear_operator.hpp"
#include "pdslide/metrics.hpp"
#include "pdslide/problem.hpp"

namespace pdslide {

enum class Separability { separable, overlapping };
Separability parse_separability(std::string_view name);
std::string_view to_string(Separability s);

/// Two Gaussian class clouds along a seeded unit direction u. Separable mode
/// keeps every y <a, u> above a margin; overlapping mode centers the classes
/// at +-0.5 u with unit noise. Features are multiplied by `scale`.
DataShard synthesize_dataset(int n, int d, Separability separability, std::uint64_t seed, double scale = 1.0);

struct GraphSpec {
  enum class Source { erdos_renyi, named, edge_list };
  std::string label;
  Source source = Source::erdos_renyi;
  int m = 20;
  double edge_prob = 0.2;
  std::uint64_t seed = 1;
  GraphKind kind = GraphKind::path;
  std::string path;
  std::optional<int> expected_max_degree;

  CommGraph build() const;
};

struct ProblemSpec {
  enum class Source { synthetic, libsvm };
  enum class Noise { subsample, gaussian };
  Source source = Source::synthetic;
  std::string path;  // libsvm
  int rows = 2000;   // synthetic
  int features = 10;
  Separability separability = Separability::overlapping;
  double feature_scale = 1.0;
  std::uint64_t data_seed = 1;
  std::uint64_t split_seed = 1;
  double mu = 0.0;
  LipschitzEstimate lipschitz_estimate = LipschitzEstimate::trace;
  Noise noise = Noise::subsample;
  double sigma = 0.0;  // gaussian noise level
};

enum class Algorithm { pds, spds, baseline };
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::pds;
  double R = 0.35355339059327373;  // 1 / (2 sqrt 2)
  double c = 0.25;
  double lipschitz_multiplier = 1.0;
  double baseline_rho = 1.0;
  std::int64_t spds_n_start = 10;
  std::int64_t spds_n_step = 10;
  std::int64_t spds_n_max = 200;
  std::int64_t max_batch = 0;
};

struct ExperimentPlan {
  std::vector<GraphSpec> graphs;
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  /// Absolute loss targets.
  std::vector<double> targets;
  /// Targets f* + gap * max(1, |f*|), with f* from the centralized solver.
  std::vector<double> target_gaps;
  std::int64_t round_budget = 4000;
  ConsensusOperator::Form form = ConsensusOperator::Form::laplacian;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
};

/// Desk-scale defaults: m = 20, 2000 synthetic rows, 4000-round budget.
ExperimentPlan desk_plan();
/// The m = 100 / 20000-row protocol on a LIBSVM file.
ExperimentPlan paper_plan(const std::string& dataset_path);

enum class CellStatus { ok, na, error };
std::string_view to_string(CellStatus s);

struct CellResult {
  Algorithm algorithm = Algorithm::pds;
  std::string graph;
  int max_degree = 0;
  double op_norm = 0.0;
  double target = 0.0;
  CellStatus status = CellStatus::na;
  double loss = 0.0;
  double feasibility = 0.0;
  std::int64_t rounds = 0;
  std::int64_t gradients = 0;
  std::int64_t samples = 0;  // total over agents
  std::int64_t outer_iterations = 0;
  std::string message;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::pds;
  std::string graph;
  RunMetrics metrics;
};

struct PlanResult {
  double f_star = 0.0;
  double lipschitz = 0.0;
  std::vector<double> targets;
  std::vector<CellResult> cells;  // canonical order: algorithm, graph, target
  std::vector<RunTrace> traces;
  std::vector<std::string> log;
};

/// Runs every algorithm x graph x target cell. Cells stop at the first outer
/// iteration whose consensus loss reaches the target; a cell is NA when the
/// round budget runs out first and an error row when the solver throws.
PlanResult run_plan(const ExperimentPlan& plan);

/// results.csv, results.json, trajectories/<alg>_<graph>.csv and plot_data/.
void write_plan_outputs(const PlanResult& result, const std::string& out_dir);
nlohmann::json to_json(const PlanResult& result);
void write_results_csv(std::ostream& out, const PlanResult& result);

}  // namespace pdslide
