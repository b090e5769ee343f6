#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "pdslide/config.hpp"
#include "pdslide/error.hpp"

using namespace pdslide;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(PDSLIDE_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pdslide_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, MalformedJsonReportsPosition) {
  try {
    parse_json_text("{\n  \"a\": 1,\n  \"b\": }\n", "cfg.json");
    FAIL() << "no exception";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeysAndBadTypesAreRejected) {
  EXPECT_THROW(graph_spec_from_json(json{{"mm", 3}}), ConfigError);
  try {
    graph_spec_from_json(json{{"m", "three"}});
    FAIL() << "no exception";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("graph.m"), std::string::npos) << e.what();
  }
}

TEST(Config, MissingKeysKeepDefaults) {
  const auto g = graph_spec_from_json(json{{"source", "named"}, {"kind", "star"}, {"m", 6}});
  EXPECT_EQ(g.source, GraphSpec::Source::named);
  EXPECT_EQ(g.kind, GraphKind::star);
  EXPECT_EQ(g.build().max_degree(), 5);
  const auto a = algorithm_spec_from_json(json{{"name", "baseline"}});
  EXPECT_EQ(a.algorithm, Algorithm::baseline);
  EXPECT_DOUBLE_EQ(a.c, AlgorithmSpec{}.c);
}

TEST(Config, RunConfigValidation) {
  EXPECT_THROW(run_config_from_json(json{{"N", 0}}), ConfigError);
  EXPECT_THROW(run_config_from_json(json{{"x0", "random"}}), ConfigError);
  EXPECT_THROW(run_config_from_json(json{{"view", "agent"}, {"algorithm", {{"name", "spds"}}}}), ConfigError);
  const auto c = run_config_from_json(json{{"N", 7}, {"form", "incidence"}});
  EXPECT_EQ(c.N, 7);
  EXPECT_EQ(c.form, ConsensusOperator::Form::incidence);
}

TEST(Config, ScheduleInputs) {
  const auto in = schedule_inputs_from_json(json{{"mode", "stochastic"}, {"L", 2.0}, {"c", 0.5}, {"N", 10}});
  EXPECT_EQ(in.mode, ScheduleMode::stochastic);
  EXPECT_DOUBLE_EQ(in.lipschitz, 2.0);
  EXPECT_EQ(in.N.value(), 10);
}

TEST(Config, ConstrainedQpIsFeasible) {
  ConstrainedSpec spec;
  const auto qp = make_constrained_qp(spec);
  EXPECT_EQ(qp.A->rows(), spec.constraints);
  EXPECT_EQ(qp.A->cols(), spec.blocks * spec.d);
  EXPECT_EQ(make_constrained_qp(spec).b, qp.b);
}

TEST(Cli, GraphInfoFromEdgeList) {
  const auto edges = write_file("tri.txt", "m 3\n1 2\n2 3\n1 3\n");
  const auto r = cli("graph-info --edges " + edges.string());
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("m 3\nedges 3\nd_max 2\nnorm_A 3"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("graph-info").status, 1);
  EXPECT_EQ(cli("graph-info --config /nonexistent/cfg.json").status, 1);
  const auto bad = write_file("bad.json", "{ \"graph\": ");
  EXPECT_EQ(cli("run --config " + bad.string()).status, 1);
  EXPECT_EQ(cli("no-such-command").status, 1);
}

TEST(Cli, ValidateSchedule) {
  const auto cfg = write_file("val.json", R"({"schedule": {"L": 2, "mu": 0.1, "norm_A": 3, "R": 1}, "N": 50})");
  const auto r = cli("validate-schedule --config " + cfg.string());
  EXPECT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.contains("conditions"));
}

TEST(Cli, RunWritesMetricsAndSummary) {
  const auto cfg = write_file("run.json", R"({
    "graph": {"source": "named", "kind": "cycle", "m": 4},
    "problem": {"rows": 80, "features": 3},
    "algorithm": {"name": "pds"},
    "view": "agent",
    "N": 5
  })");
  const fs::path out = scratch("run_out");
  fs::remove_all(out);
  const auto r = cli("run -v --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.status, 0);
  std::ifstream js(out / "summary.json");
  const auto j = json::parse(js);
  EXPECT_EQ(j["non_edge_messages"], 0);
  EXPECT_EQ(j["metrics"]["gradients"], 5);
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
}

TEST(Cli, SolveConstrainedMeetsBounds) {
  const auto r = cli("solve-constrained --seed 5");
  ASSERT_EQ(r.status, 0);
  const auto j = json::parse(r.out);
  EXPECT_LE(j["f_gap"].get<double>(), j["gap_bound"].get<double>() + 1e-12);
  EXPECT_LE(j["residual"].get<double>(), j["residual_bound"].get<double>());
}
