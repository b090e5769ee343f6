#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdslide/error.hpp"
#include "pdslide/harness.hpp"

using namespace pdslide;
namespace fs = std::filesystem;

namespace {

ExperimentPlan small_plan() {
  ExperimentPlan p;
  GraphSpec path;
  path.label = "path";
  path.source = GraphSpec::Source::named;
  path.kind = GraphKind::path;
  path.m = 4;
  GraphSpec complete = path;
  complete.label = "complete";
  complete.kind = GraphKind::complete;
  p.graphs = {path, complete};
  p.problem.rows = 200;
  p.problem.features = 3;
  p.problem.feature_scale = 0.2;
  AlgorithmSpec pds;
  AlgorithmSpec base;
  base.algorithm = Algorithm::baseline;
  p.algorithms = {pds, base};
  p.target_gaps = {1e-2, 1e-9};
  p.round_budget = 600;
  return p;
}

}  // namespace

TEST(Harness, SyntheticDataIsSeededAndScaled) {
  const auto a = synthesize_dataset(50, 4, Separability::overlapping, 3, 0.5);
  EXPECT_EQ(a, synthesize_dataset(50, 4, Separability::overlapping, 3, 0.5));
  EXPECT_NE(a, synthesize_dataset(50, 4, Separability::overlapping, 4, 0.5));
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(a.feature_dim, 4);
  const auto b = synthesize_dataset(50, 4, Separability::overlapping, 3, 1.0);
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t k = 0; k < a.rows[r].value.size(); ++k)
      EXPECT_NEAR(a.rows[r].value[k], 0.5 * b.rows[r].value[k], 1e-15);
}

TEST(Harness, SeparableDataHasPositiveMarginAlongSomeDirection) {
  // A linear separator exists: logistic loss can be driven toward zero.
  const auto s = synthesize_dataset(100, 3, Separability::separable, 2);
  const auto obj = logistic_objective(s, 0.0);
  const auto sol = centralized_solve({obj}, 1e-6, 20000);
  EXPECT_LT(sol.value, 0.1 * obj.value(Vec::Zero(3)));
}

TEST(Harness, DeskPlanGraphsHaveExpectedDegrees) {
  for (const auto& g : desk_plan().graphs) {
    ASSERT_TRUE(g.expected_max_degree.has_value());
    EXPECT_EQ(g.build().max_degree(), *g.expected_max_degree) << g.label;
  }
}

TEST(Harness, PlanCellsAreCanonicalAndDeterministic) {
  const auto plan = small_plan();
  const auto a = run_plan(plan);
  const auto b = run_plan(plan);
  ASSERT_EQ(a.cells.size(), 8u);
  std::ostringstream ca, cb;
  write_results_csv(ca, a);
  write_results_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(a.cells[0].algorithm, Algorithm::pds);
  EXPECT_EQ(a.cells[0].graph, "path");
  EXPECT_EQ(a.cells[4].algorithm, Algorithm::baseline);
  // The loose target is reached; the tight one is beyond the round budget.
  for (const auto& c : a.cells) {
    if (c.target == a.targets[0]) {
      EXPECT_EQ(c.status, CellStatus::ok) << to_string(c.algorithm) << " " << c.graph;
      EXPECT_LE(c.loss, c.target);
      EXPECT_LE(c.rounds, plan.round_budget);
    } else {
      EXPECT_EQ(c.status, CellStatus::na);
    }
  }
}

TEST(Harness, TargetsAreRelativeToOptimum) {
  const auto r = run_plan(small_plan());
  ASSERT_EQ(r.targets.size(), 2u);
  EXPECT_NEAR(r.targets[0], r.f_star + 1e-2 * std::max(1.0, std::abs(r.f_star)), 1e-12);
}

TEST(Harness, WritesOutputTree) {
  const fs::path dir = fs::temp_directory_path() / "pdslide_harness_test";
  fs::remove_all(dir);
  write_plan_outputs(run_plan(small_plan()), dir.string());
  EXPECT_TRUE(fs::exists(dir / "results.csv"));
  EXPECT_TRUE(fs::exists(dir / "trajectories" / "pds_path.csv"));
  EXPECT_TRUE(fs::exists(dir / "trajectories" / "baseline_complete.csv"));
  std::ifstream js(dir / "results.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["cells"].size(), 8u);
  fs::remove_all(dir);
}

TEST(Harness, RejectsPlansWithMismatchedAgentCounts) {
  auto plan = small_plan();
  plan.graphs[1].m = 5;
  EXPECT_THROW(run_plan(plan), ConfigError);
}

TEST(Harness, GraphDegreeMismatchIsLogged) {
  auto plan = small_plan();
  plan.target_gaps = {1e-2};
  plan.graphs[0].expected_max_degree = 3;
  const auto r = run_plan(plan);
  bool logged = false;
  for (const auto& line : r.log) logged = logged || line.find("expected d_max 3, built 2") != std::string::npos;
  EXPECT_TRUE(logged);
}

TEST(Harness, EnumNames) {
  for (auto a : {Algorithm::pds, Algorithm::spds, Algorithm::baseline}) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_EQ(parse_separability("separable"), Separability::separable);
  EXPECT_THROW(parse_algorithm("admm"), ConfigError);
}
