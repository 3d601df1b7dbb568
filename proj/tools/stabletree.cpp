// stabletree: command-line front end for the stable-tree toolkit.
//
//   stabletree marchal grow --alpha 2 --n 2 --seed 1
//   stabletree rde iterate --xi stable:1.5 --mode spine --depth 8 --reps 1000
//   stabletree ghdist A.json B.json --marked
//   stabletree verify --suite quick --seed 42
//
// Exit codes: 0 success, 1 domain/runtime failure or failed verification,
// 2 usage or configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "srt/concat.hpp"
#include "srt/config.hpp"
#include "srt/errors.hpp"
#include "srt/exec.hpp"
#include "srt/gh.hpp"
#include "srt/marchal.hpp"
#include "srt/random_laws.hpp"
#include "srt/rde.hpp"
#include "srt/stats.hpp"
#include "srt/tree_io.hpp"
#include "srt/verify_suite.hpp"

using nlohmann::json;
using namespace srt;

namespace {

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  std::string where() const { return path_ == "-" ? "stdout" : path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

void summary(const std::string& line) { std::cerr << line << '\n'; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

json report_to_json(const StatReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    const auto& v = r.verdicts[i];
    const auto& e = r.estimates[i];
    const auto& t = r.targets[i];
    rows.push_back({{"label", e.label},
                    {"estimate", e.value},
                    {"stderr", e.std_error},
                    {"n", e.n},
                    {"target_label", t.label},
                    {"target", t.value},
                    {"provenance", provenance_name(t.provenance)},
                    {"rule", v.rule},
                    {"verdict", v.informational ? "info" : v.pass ? "pass" : "fail"}});
  }
  return {{"test", r.name}, {"seed", r.seed}, {"runtime_s", r.runtime_s}, {"rows", rows}, {"pass", r.all_pass()}};
}

void write_reports(const RunConfig& cfg, const std::vector<StatReport>& reports) {
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    out.stream() << arr.dump(1) << '\n';
  } else {
    write_csv_header(out.stream());
    for (const auto& r : reports) write_csv(out.stream(), r);
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

json shape_json(const DiscreteTree& t) {
  json clusters = json::array();
  for (std::uint64_t mask : shape_key(t)) {
    json leaves = json::array();
    for (int i = 1; i < 64; ++i)
      if (mask >> i & 1U) leaves.push_back(i);
    clusters.push_back(leaves);
  }
  return clusters;
}

json discrete_json(const DiscreteTree& t) {
  json nodes = json::array();
  for (std::size_t v = 0; v < t.size(); ++v)
    nodes.push_back({{"id", v},
                     {"name", t.node_name(static_cast<std::int32_t>(v))},
                     {"parent", t.parent[v] < 0 ? json(nullptr) : json(t.parent[v])},
                     {"degree", t.degree[v]}});
  return {{"format", "marchal-discrete-v1"}, {"alpha", t.alpha}, {"n", t.n_leaves()}, {"nodes", nodes}};
}

int run_marchal(const RunConfig& cfg) {
  const std::string action = cfg.text("action");
  const double alpha = cfg.number("alpha");
  const std::int64_t n = cfg.integer("n");
  CounterRng rng = StreamKey{cfg.seed}.stream();
  if (action == "grow") {
    const DiscreteTree t = grow(alpha, n, rng);
    Output out(cfg.out);
    write_tree(out.stream(), to_metric(t, alpha));
    if (cfg.out != "-") {
      std::ofstream side(cfg.out + ".discrete.json");
      side << discrete_json(t).dump(1) << '\n';
    }
    summary("marchal grow: " + std::to_string(n) + " leaves, " + std::to_string(t.size()) + " nodes -> " + out.where());
  } else if (action == "shapes") {
    const auto shapes = enumerate_shapes(static_cast<int>(n));
    json arr = json::array();
    double total = 0.0;
    for (const auto& s : shapes) {
      const double p = shape_prob(s, alpha);
      total += p;
      arr.push_back({{"branch_points", shape_json(s)}, {"prob", p}});
    }
    Output out(cfg.out);
    out.stream() << json{{"alpha", alpha}, {"n", n}, {"shapes", arr}}.dump(1) << '\n';
    summary("marchal shapes: " + std::to_string(shapes.size()) + " shapes, total probability " + std::to_string(total));
  } else if (action == "spine") {
    StatReport r = spine_scaling_stat(alpha, n, cfg.integer("reps"), cfg.seed);
    write_reports(cfg, {r});
    summary("marchal spine: " + std::string(r.all_pass() ? "pass" : "fail"));
  } else {
    const DiscreteTree t = grow(alpha, n, rng);
    const Decomposition d = decompose_at_v2(t);
    json parts = json::array();
    for (const auto& c : d.parts)
      parts.push_back({{"leaves", c.leaves}, {"least_leaf", c.least_leaf}, {"weight", c.weight}, {"nodes", c.nodes.size()}});
    Output out(cfg.out);
    out.stream() << json{{"k", d.k},
                         {"total_weight", d.total_weight},
                         {"v2_weight", d.v2_weight},
                         {"rest_weight", d.rest_weight},
                         {"fractions", d.fractions()},
                         {"parts", parts}}
                        .dump(1)
                 << '\n';
    summary("marchal decompose: " + std::to_string(d.parts.size()) + " components");
  }
  return 0;
}

int run_urn(const RunConfig& cfg) {
  const auto gamma = parse_list(cfg.text("gamma"));
  const double step = cfg.number("step");
  const std::int64_t n = cfg.integer("n"), reps = cfg.integer("reps");
  Output out(cfg.out);
  std::vector<UrnState> states(static_cast<std::size_t>(reps));
  for_each_index(states.size(), Exec::kParallel, [&](std::size_t r) {
    CounterRng rng = replicate_key(cfg.seed, r).stream();
    UrnState s = UrnState::make(gamma, step);
    for (std::int64_t k = 0; k < n; ++k) urn_advance(s, rng);
    states[r] = std::move(s);
  });
  auto freqs = [&](const UrnState& s) {
    std::vector<double> f;
    for (auto d : s.draws) f.push_back(static_cast<double>(d) / static_cast<double>(s.n));
    return f;
  };
  if (reps == 1 && cfg.format == "json") {
    out.stream() << json{{"draws", states[0].draws},
                         {"frequencies", freqs(states[0])},
                         {"weights", states[0].weights},
                         {"limit_dirichlet", urn_limit_params(states[0])}}
                        .dump(1)
                 << '\n';
  } else {
    out.stream() << "rep";
    for (std::size_t j = 0; j < gamma.size(); ++j) out.stream() << ",freq" << j;
    out.stream() << '\n';
    out.stream().precision(17);
    for (std::size_t r = 0; r < states.size(); ++r) {
      out.stream() << r;
      for (double f : freqs(states[r])) out.stream() << ',' << f;
      out.stream() << '\n';
    }
  }
  summary("urn: " + std::to_string(reps) + " replicate(s) of " + std::to_string(n) + " draws -> " + out.where());
  return 0;
}

int run_crp(const RunConfig& cfg) {
  const double beta = cfg.number("beta"), theta = cfg.number("theta");
  const std::int64_t n = cfg.integer("n"), reps = cfg.integer("reps");
  std::vector<CrpState> states(static_cast<std::size_t>(reps), CrpState(beta, theta));
  for_each_index(states.size(), Exec::kParallel, [&](std::size_t r) {
    CounterRng rng = replicate_key(cfg.seed, r).stream();
    while (states[r].n() < n) states[r].advance(rng);
  });
  Output out(cfg.out);
  const double scale = std::pow(static_cast<double>(n), beta);
  if (reps == 1 && cfg.format == "json") {
    out.stream() << json{{"n", n},
                         {"tables", states[0].tables()},
                         {"scaled_tables", static_cast<double>(states[0].tables()) / scale},
                         {"table_sizes", states[0].table_sizes()}}
                        .dump(1)
                 << '\n';
  } else {
    out.stream() << "rep,tables,scaled_tables\n";
    out.stream().precision(17);
    for (std::size_t r = 0; r < states.size(); ++r)
      out.stream() << r << ',' << states[r].tables() << ',' << static_cast<double>(states[r].tables()) / scale << '\n';
  }
  summary("crp: " + std::to_string(reps) + " replicate(s) of " + std::to_string(n) + " customers -> " + out.where());
  return 0;
}

int run_xi(const RunConfig& cfg) {
  const XiModel model = XiModel::stable(cfg.number("alpha"), cfg.number("eps"));
  json arr = json::array();
  for (std::int64_t r = 0; r < cfg.integer("reps"); ++r) {
    const ScalingSeq xi = model.sample(replicate_key(cfg.seed, static_cast<std::uint64_t>(r)));
    arr.push_back({{"x", xi.x}, {"p", xi.p}, {"residual", xi.residual}});
  }
  Output out(cfg.out);
  out.stream() << arr.dump(1) << '\n';
  summary("xi: " + std::to_string(cfg.integer("reps")) + " sequence(s) -> " + out.where());
  return 0;
}

ConcatInput concat_from_json(const json& j) {
  if (j.value("format", "") != "concat-input-v1") throw DomainError("concat input must have format concat-input-v1");
  try {
    ConcatInput in;
    in.beta = j.at("beta").get<double>();
    const auto x = j.at("xi").at("x").get<std::vector<double>>();
    if (x.size() != 4) throw DomainError("xi.x must have four entries");
    std::copy(x.begin(), x.end(), in.xi.x.begin());
    in.xi.p = j.at("xi").value("p", std::vector<double>{});
    for (const auto& t : j.at("trees")) in.trees.push_back(tree_from_json(t));
    in.xi.validate();
    return in;
  } catch (const json::exception& e) {
    throw DomainError(std::string("concat input: ") + e.what());
  }
}

int run_concat(const RunConfig& cfg) {
  const ConcatInput in = concat_from_json(read_json_file(cfg.text("input")));
  const MetricTree t = concat(in);
  Output out(cfg.out);
  write_tree(out.stream(), t);
  summary("concat: " + std::to_string(t.size()) + " nodes -> " + out.where());
  return 0;
}

int run_ghdist(const RunConfig& cfg) {
  const MetricTree a = read_tree_file(cfg.text("a")), b = read_tree_file(cfg.text("b"));
  const GhResult g = gh_search(a, b, cfg.flag("marked"), static_cast<std::size_t>(cfg.integer("max_nodes")));
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream().precision(17);
    out.stream() << "distance," << g.distance << "\na,b\n";
    for (const auto& [u, v] : g.correspondence) out.stream() << u << ',' << v << '\n';
  } else {
    out.stream() << json{{"distance", g.distance}, {"correspondence", g.correspondence}}.dump(1) << '\n';
  }
  std::ostringstream os;
  os.precision(17);
  os << "ghdist: " << g.distance << " (" << g.correspondence.size() << " pairs)";
  summary(os.str());
  return 0;
}

XiModel xi_from_config(const RunConfig& cfg, bool fill_beta = true) {
  const std::string spec = cfg.text("xi");
  if (spec.rfind("stable:", 0) == 0) return XiModel::stable(std::stod(spec.substr(7)), cfg.number("eps"));
  const json j = read_json_file(spec.substr(7));
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const double beta = j.contains("beta") ? j.at("beta").get<double>() : std::numeric_limits<double>::quiet_NaN();
    XiModel m;
    if (kind == "dirichlet") {
      m = XiModel::dirichlet(j.at("params").get<std::vector<double>>(), beta);
    } else if (kind == "discrete") {
      m = XiModel::discrete(j.at("table").get<std::vector<std::vector<double>>>(),
                            j.at("probs").get<std::vector<double>>(), beta);
    } else {
      throw DomainError("custom xi kind must be dirichlet or discrete");
    }
    if (fill_beta && std::isnan(m.beta)) m.beta = calibrate_beta(m, cfg.number("tol"), 100000, cfg.seed).beta;
    return m;
  } catch (const json::exception& e) {
    throw DomainError(std::string("custom xi: ") + e.what());
  }
}

InitLaw init_from_config(const RunConfig& cfg) {
  const std::string spec = cfg.text("init");
  if (spec.rfind("segment:", 0) == 0) return InitLaw::constant(std::stod(spec.substr(8)));
  if (spec.rfind("exp:", 0) == 0) return InitLaw::exponential(std::stod(spec.substr(4)));
  const json j = read_json_file(spec.substr(5));
  if (j.is_object() && j.contains("lengths")) return InitLaw::empirical(j.at("lengths").get<std::vector<double>>());
  std::vector<MetricTree> trees;
  if (j.is_array()) {
    for (const auto& t : j) trees.push_back(tree_from_json(t));
  } else {
    trees.push_back(tree_from_json(j));
  }
  return InitLaw::from_trees(std::move(trees));
}

int run_rde(const RunConfig& cfg) {
  const std::string action = cfg.text("action");
  const int depth = static_cast<int>(cfg.integer("depth"));
  const std::int64_t reps = cfg.integer("reps");
  if (action == "calibrate") {
    XiModel m = xi_from_config(cfg, false);
    if (m.kind != XiModel::Kind::kStable) m.beta = std::numeric_limits<double>::quiet_NaN();
    const Calibration cal = calibrate_beta(m, cfg.number("tol"), reps, cfg.seed);
    Output out(cfg.out);
    out.stream() << json{{"beta", cal.beta}, {"residual", cal.residual}, {"f_at_one", cal.f_at_one}, {"reps", cal.reps}}
                        .dump(1)
                 << '\n';
    summary("rde calibrate: beta = " + std::to_string(cal.beta));
    return 0;
  }
  const XiModel xi = xi_from_config(cfg);
  const InitLaw init = init_from_config(cfg);
  if (action == "iterate") {
    const std::string mode = cfg.text("mode");
    Output out(cfg.out);
    if (mode == "spine") {
      const auto xs = spine_samples(xi, init, depth, reps, cfg.seed);
      out.stream() << "rep,spine\n";
      out.stream().precision(17);
      for (std::size_t r = 0; r < xs.size(); ++r) out.stream() << r << ',' << xs[r] << '\n';
      const MeanVar mv = summarize(xs);
      summary("rde iterate spine: mean " + std::to_string(mv.mean()) + " over " + std::to_string(reps) + " reps -> " +
              out.where());
      return 0;
    }
    const StreamKey root = replicate_key(cfg.seed, 0);
    const IterateTree it = mode == "full" ? iterate_full(xi, init, depth, root)
                                          : iterate_skeleton(xi, init, depth, std::stoi(mode.substr(9)), root);
    write_tree(out.stream(), it.tree);
    summary("rde iterate " + mode + ": " + std::to_string(it.tree.size()) + " nodes -> " + out.where());
    return 0;
  }
  if (action == "string") {
    const MetricTree t = grow_from_string(xi, init, static_cast<int>(cfg.integer("m")),
                                          static_cast<int>(cfg.integer("levels")), replicate_key(cfg.seed, 0));
    Output out(cfg.out);
    write_tree(out.stream(), t);
    summary("rde string: " + std::to_string(t.size()) + " nodes -> " + out.where());
    return 0;
  }
  const StatReport r = action == "martingale" ? spine_martingale(xi, depth, reps, cfg.seed)
                                              : attraction_experiment(xi, init, depth, reps, cfg.seed);
  write_reports(cfg, {r});
  summary("rde " + action + ": " + (r.all_pass() ? "pass" : "fail"));
  return r.all_pass() ? 0 : 1;
}

int run_verify(const RunConfig& cfg) {
  const SuiteResult res = run_suite(parse_suite(cfg.text("suite")), cfg.seed, cfg.flag("retry_once"));
  write_reports(cfg, res.reports);
  int failed = 0;
  for (const auto& r : res.reports) failed += !r.all_pass();
  std::string line = "verify " + cfg.text("suite") + ": " + std::to_string(res.reports.size() - failed) + "/" +
                     std::to_string(res.reports.size()) + " cases pass";
  if (!res.retried.empty()) line += ", " + std::to_string(res.retried.size()) + " retried";
  summary(line);
  return res.all_pass() ? 0 : 1;
}

void apply_threads(const RunConfig& cfg) {
  std::int64_t n = cfg.integer("threads");
  if (n == 0) {
    if (const char* env = std::getenv("RDE_THREADS")) n = std::atoi(env);
  }
  set_threads(static_cast<int>(n));
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> bools;
  std::string config;
  std::string action;
  std::vector<std::string> files;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable trees: Marchal growth, recursive distribution equations and GH distances"};
  app.require_subcommand(1);
  std::map<std::string, Command> commands;
  const std::map<std::string, std::string> descriptions = {
      {"marchal", "Marchal's growth algorithm: grow, shapes, spine, decompose"},
      {"urn", "generalised Polya urn"},
      {"crp", "two-parameter Chinese restaurant process"},
      {"xi", "stable scaling sequences"},
      {"concat", "glue trees along a scaling sequence (concat-input-v1 file)"},
      {"ghdist", "exact rooted/marked Gromov-Hausdorff distance of two small trees"},
      {"rde", "recursive distribution equation: iterate, martingale, attract, string, calibrate"},
      {"verify", "statistical self-check suite"}};
  for (const auto& name : command_names()) {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, descriptions.at(name));
    c.app->add_option("--config", c.config, "JSON config file; explicit flags take precedence")->check(CLI::ExistingFile);
    if (name == "marchal" || name == "rde") c.app->add_option("action", c.action, "sub-action");
    if (name == "ghdist") c.app->add_option("files", c.files, "two rtree-v1 files")->expected(2);
    for (const auto& spec : command_schema(name)) {
      if (spec.key == "action" || (name == "ghdist" && (spec.key == "a" || spec.key == "b"))) continue;
      if (spec.type == ParamType::kBool) {
        c.app->add_flag(flag_name(spec.key), c.bools[spec.key], spec.help);
      } else {
        c.app->add_option(flag_name(spec.key), c.values[spec.key], spec.help);
      }
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [name, c] : commands) {
    if (!c.app->parsed()) continue;
    try {
      json flags = json::object();
      for (const auto& [key, text] : c.values)
        if (c.app->count(flag_name(key)) > 0) flags[key] = parse_flag_value(name, key, text);
      for (const auto& [key, on] : c.bools)
        if (c.app->count(flag_name(key)) > 0) flags[key] = on;
      if (!c.action.empty()) flags["action"] = c.action;
      if (c.files.size() == 2) {
        flags["a"] = c.files[0];
        flags["b"] = c.files[1];
      }
      const RunConfig cfg = load_config(c.config, name, flags);
      apply_threads(cfg);
      if (name == "marchal") return run_marchal(cfg);
      if (name == "urn") return run_urn(cfg);
      if (name == "crp") return run_crp(cfg);
      if (name == "xi") return run_xi(cfg);
      if (name == "concat") return run_concat(cfg);
      if (name == "ghdist") return run_ghdist(cfg);
      if (name == "rde") return run_rde(cfg);
      return run_verify(cfg);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n' << c.app->help();
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
