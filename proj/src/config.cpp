#include "pdslide/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pdslide/error.hpp"
#include "pdslide/rng.hpp"

namespace pdslide {

using nlohmann::json;

json parse_json_text(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

namespace {

// Reads keys of one JSON object and reports the ones never asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  template <class T>
  void read(const char* key, T& out) {
    const json* v = find(key);
    if (!v) return;
    out = as<T>(*v, path(key));
  }

  template <class T>
  void read_optional(const char* key, std::optional<T>& out) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    out = as<T>(*v, path(key));
  }

  template <class Parse>
  void read_enum(const char* key, Parse parse) {
    const json* v = find(key);
    if (!v) return;
    try {
      parse(as<std::string>(*v, path(key)));
    } catch (const ConfigError& e) {
      throw ConfigError(path(key) + ": " + e.what());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }

  template <class T>
  static T as(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
      for (const auto& e : v)
        if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    }
    return v.get<T>();
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

GraphSpec graph_spec_from_json(const json& j, GraphSpec base) {
  Reader r(j, "graph");
  r.read("label", base.label);
  r.read_enum("source", [&](const std::string& s) {
    if (s == "erdos_renyi")
      base.source = GraphSpec::Source::erdos_renyi;
    else if (s == "named")
      base.source = GraphSpec::Source::named;
    else if (s == "edge_list")
      base.source = GraphSpec::Source::edge_list;
    else
      throw ConfigError("unknown graph source '" + s + "'");
  });
  r.read("m", base.m);
  r.read("edge_prob", base.edge_prob);
  r.read("seed", base.seed);
  r.read_enum("kind", [&](const std::string& s) { base.kind = parse_graph_kind(s); });
  r.read("path", base.path);
  r.read_optional("expected_max_degree", base.expected_max_degree);
  r.finish();
  if (base.source == GraphSpec::Source::edge_list && base.path.empty())
    throw ConfigError("graph.path: required for an edge_list graph");
  return base;
}

ProblemSpec problem_spec_from_json(const json& j, ProblemSpec base) {
  Reader r(j, "problem");
  r.read_enum("source", [&](const std::string& s) {
    if (s == "synthetic")
      base.source = ProblemSpec::Source::synthetic;
    else if (s == "libsvm")
      base.source = ProblemSpec::Source::libsvm;
    else
      throw ConfigError("unknown problem source '" + s + "'");
  });
  r.read("path", base.path);
  r.read("rows", base.rows);
  r.read("features", base.features);
  r.read_enum("separability", [&](const std::string& s) { base.separability = parse_separability(s); });
  r.read("feature_scale", base.feature_scale);
  r.read("data_seed", base.data_seed);
  r.read("split_seed", base.split_seed);
  r.read("mu", base.mu);
  r.read_enum("lipschitz_estimate", [&](const std::string& s) {
    if (s == "trace")
      base.lipschitz_estimate = LipschitzEstimate::trace;
    else if (s == "spectral")
      base.lipschitz_estimate = LipschitzEstimate::spectral;
    else
      throw ConfigError("unknown Lipschitz estimate '" + s + "'");
  });
  r.read_enum("noise", [&](const std::string& s) {
    if (s == "subsample")
      base.noise = ProblemSpec::Noise::subsample;
    else if (s == "gaussian")
      base.noise = ProblemSpec::Noise::gaussian;
    else
      throw ConfigError("unknown noise model '" + s + "'");
  });
  r.read("sigma", base.sigma);
  r.finish();
  if (base.source == ProblemSpec::Source::libsvm && base.path.empty())
    throw ConfigError("problem.path: required for a libsvm problem");
  if (!(base.mu >= 0.0)) throw ConfigError("problem.mu: must be >= 0");
  if (!(base.sigma >= 0.0)) throw ConfigError("problem.sigma: must be >= 0");
  return base;
}

AlgorithmSpec algorithm_spec_from_json(const json& j, AlgorithmSpec base) {
  Reader r(j, "algorithm");
  r.read_enum("name", [&](const std::string& s) {
    base.algorithm = parse_algorithm(s);
    if (base.algorithm == Algorithm::spds) base.R = 1.0;
  });
  r.read("R", base.R);
  r.read("c", base.c);
  r.read("lipschitz_multiplier", base.lipschitz_multiplier);
  r.read("baseline_rho", base.baseline_rho);
  r.read("spds_n_start", base.spds_n_start);
  r.read("spds_n_step", base.spds_n_step);
  r.read("spds_n_max", base.spds_n_max);
  r.read("max_batch", base.max_batch);
  r.finish();
  if (!(base.R > 0.0)) throw ConfigError("algorithm.R: must be positive");
  if (!(base.c > 0.0)) throw ConfigError("algorithm.c: must be positive");
  if (!(base.lipschitz_multiplier > 0.0)) throw ConfigError("algorithm.lipschitz_multiplier: must be positive");
  if (!(base.baseline_rho > 0.0)) throw ConfigError("algorithm.baseline_rho: must be positive");
  if (base.spds_n_start < 1 || base.spds_n_step < 1 || base.spds_n_max < base.spds_n_start)
    throw ConfigError("algorithm: need 1 <= spds_n_start <= spds_n_max and spds_n_step >= 1");
  if (base.max_batch < 0) throw ConfigError("algorithm.max_batch: must be >= 0");
  return base;
}

ScheduleInputs schedule_inputs_from_json(const json& j, ScheduleInputs base) {
  Reader r(j, "schedule");
  r.read_enum("mode", [&](const std::string& s) { base.mode = parse_schedule_mode(s); });
  r.read("L", base.lipschitz);
  r.read("mu", base.mu);
  r.read("sigma", base.sigma);
  r.read("norm_A", base.op_norm);
  r.read("R", base.R);
  r.read("c", base.c);
  r.read_optional("N", base.N);
  r.finish();
  return base;
}

namespace {

ConsensusOperator::Form read_form(Reader& r, ConsensusOperator::Form form) {
  r.read_enum("form", [&](const std::string& s) { form = parse_operator_form(s); });
  return form;
}

}  // namespace

ExperimentPlan plan_from_json(const json& j, ExperimentPlan base) {
  Reader r(j, "plan");
  if (const json* g = r.find("graphs")) {
    if (!g->is_array() || g->empty()) throw ConfigError("plan.graphs: expected a non-empty array");
    base.graphs.clear();
    for (const auto& e : *g) base.graphs.push_back(graph_spec_from_json(e));
    for (std::size_t i = 0; i < base.graphs.size(); ++i)
      if (base.graphs[i].label.empty()) base.graphs[i].label = "G" + std::to_string(i + 1);
  }
  if (const json* p = r.find("problem")) base.problem = problem_spec_from_json(*p, base.problem);
  if (const json* a = r.find("algorithms")) {
    if (!a->is_array() || a->empty()) throw ConfigError("plan.algorithms: expected a non-empty array");
    base.algorithms.clear();
    for (const auto& e : *a) base.algorithms.push_back(algorithm_spec_from_json(e));
  }
  if (r.find("targets") || r.find("target_gaps")) {
    base.targets.clear();
    base.target_gaps.clear();
    r.read("targets", base.targets);
    r.read("target_gaps", base.target_gaps);
  }
  r.read("round_budget", base.round_budget);
  base.form = read_form(r, base.form);
  r.read("seed", base.seed);
  r.read("out_dir", base.out_dir);
  r.finish();

  std::set<std::string> labels;
  for (const auto& g : base.graphs)
    if (!labels.insert(g.label).second) throw ConfigError("plan.graphs: duplicate label '" + g.label + "'");
  std::set<Algorithm> algos;
  for (const auto& a : base.algorithms)
    if (!algos.insert(a.algorithm).second)
      throw ConfigError("plan.algorithms: duplicate algorithm '" + std::string(to_string(a.algorithm)) + "'");
  if (base.targets.empty() && base.target_gaps.empty()) throw ConfigError("plan: needs targets or target_gaps");
  for (double gap : base.target_gaps)
    if (!(gap > 0.0)) throw ConfigError("plan.target_gaps: entries must be positive");
  if (base.round_budget < 2) throw ConfigError("plan.round_budget: must be >= 2");
  return base;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "run");
  if (const json* g = r.find("graph")) c.graph = graph_spec_from_json(*g, c.graph);
  if (const json* p = r.find("problem")) c.problem = problem_spec_from_json(*p, c.problem);
  if (const json* a = r.find("algorithm")) c.algorithm = algorithm_spec_from_json(*a, c.algorithm);
  c.form = read_form(r, c.form);
  r.read_enum("view", [&](const std::string& s) { c.view = parse_view(s); });
  r.read("N", c.N);
  r.read("replications", c.replications);
  r.read("seed", c.seed);
  r.read_enum("x0", [](const std::string& s) {
    if (s != "zero") throw ConfigError("only the 'zero' initial point is supported, got '" + s + "'");
  });
  r.finish();
  if (c.N < 1) throw ConfigError("run.N: must be >= 1");
  if (c.replications < 1) throw ConfigError("run.replications: must be >= 1");
  if (c.view == View::agent && c.algorithm.algorithm != Algorithm::pds)
    throw ConfigError("run.view: the agent view is available for pds only");
  return c;
}

GraphInfoConfig graph_info_config_from_json(const json& j) {
  GraphInfoConfig c;
  Reader r(j, "graph-info");
  if (const json* g = r.find("graph")) c.graph = graph_spec_from_json(*g, c.graph);
  c.form = read_form(r, c.form);
  r.read("d", c.d);
  r.finish();
  if (c.d < 1) throw ConfigError("graph-info.d: must be >= 1");
  return c;
}

ValidateConfig validate_config_from_json(const json& j) {
  ValidateConfig c;
  Reader r(j, "validate");
  if (const json* s = r.find("schedule")) c.inputs = schedule_inputs_from_json(*s, c.inputs);
  r.read("N", c.N);
  if (const json* g = r.find("graph")) c.graph = graph_spec_from_json(*g);
  c.form = read_form(r, c.form);
  r.read("d", c.d);
  r.finish();
  if (c.N < 1) throw ConfigError("validate.N: must be >= 1");
  if (c.d < 1) throw ConfigError("validate.d: must be >= 1");
  if (c.inputs.mode == ScheduleMode::stochastic && !c.inputs.N) c.inputs.N = c.N;
  return c;
}

ConstrainedSpec constrained_spec_from_json(const json& j) {
  ConstrainedSpec c;
  Reader r(j, "constrained");
  r.read("blocks", c.blocks);
  r.read("d", c.d);
  r.read("constraints", c.constraints);
  r.read("q_min", c.q_min);
  r.read("q_max", c.q_max);
  r.read("seed", c.seed);
  r.read("N", c.N);
  r.read("R", c.R);
  r.finish();
  if (c.blocks < 1 || c.d < 1 || c.constraints < 1)
    throw ConfigError("constrained: blocks, d and constraints must be >= 1");
  if (!(c.q_min > 0.0) || c.q_max < c.q_min) throw ConfigError("constrained: need 0 < q_min <= q_max");
  if (c.N < 1) throw ConfigError("constrained.N: must be >= 1");
  if (!(c.R > 0.0)) throw ConfigError("constrained.R: must be positive");
  return c;
}

ConstrainedQp make_constrained_qp(const ConstrainedSpec& spec) {
  KeyedStream rng(hash_key(spec.seed, 0xc0));
  const int n = spec.blocks * spec.d;
  ConstrainedQp qp;
  for (int i = 0; i < spec.blocks; ++i) {
    Vec q(spec.d), lin(spec.d);
    for (int k = 0; k < spec.d; ++k) {
      q[k] = spec.q_min + (spec.q_max - spec.q_min) * rng.uniform();
      lin[k] = rng.normal();
    }
    qp.objs.push_back(quadratic_objective(std::move(q), std::move(lin), 0.0));
  }
  Eigen::MatrixXd a(spec.constraints, n);
  for (int row = 0; row < spec.constraints; ++row)
    for (int col = 0; col < n; ++col) a(row, col) = rng.normal();
  Vec x_feas(n);
  for (int k = 0; k < n; ++k) x_feas[k] = rng.normal();
  qp.b = a * x_feas;
  qp.A = std::make_shared<DenseOperator>(std::move(a));
  return qp;
}

}  // namespace pdslide
