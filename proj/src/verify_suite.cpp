#include "srt/verify_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "srt/errors.hpp"
#include "srt/gh.hpp"
#include "srt/marchal.hpp"
#include "srt/random_laws.hpp"
#include "srt/rde.hpp"

namespace srt {

namespace {

struct Sizes {
  std::int64_t growth_reps, weight_reps, weight_n;
  std::int64_t urn_reps, urn_n;
  std::int64_t crp_reps, crp_n;
  std::int64_t spine_reps, spine_n;
  int mart_depth;
  std::int64_t mart_reps;
  int mart_long_depth;
  std::int64_t mart_long_reps;
  std::int64_t calib_reps;
  int fix_depth;
  std::int64_t fix_reps;
  int attract_depth;
  std::int64_t attract_reps;
  int concat_inputs;
};

constexpr Sizes kFullSizes{10000, 1000, 1000, 1000, 10000, 400, 100000, 1000, 10000,
                           10, 10000, 20, 16, 200000, 11, 10000, 12, 10000, 1000};
constexpr Sizes kQuickSizes{2000, 100, 300, 300, 2000, 2000, 10000, 2000, 500,
                            8, 2000, 12, 20, 50000, 8, 2000, 8, 3000, 200};

constexpr double kAlphaGrid[] = {1.2, 1.5, 2.0};

std::string fmt(double x) {
  std::string s = std::to_string(x);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

StatReport shape_law_case() {
  StatReport r;
  r.name = "c01_shape_law";
  for (int n : {3, 4}) {
    const auto shapes = enumerate_shapes(n);
    r.compare({"shape_count_n" + std::to_string(n), static_cast<double>(shapes.size()), 0.0, 1},
              {"schroeder_n" + std::to_string(n), n == 3 ? 4.0 : 26.0, Provenance::kDerived}, Rule::exact());
    for (double alpha : kAlphaGrid) {
      double total = 0.0;
      for (const auto& s : shapes) total += shape_prob(s, alpha);
      r.compare({"prob_sum_n" + std::to_string(n) + "_a" + fmt(alpha), total, 0.0, 1},
                {"one", 1.0, Provenance::kPaper}, Rule::absolute(1e-9));
    }
  }
  return r;
}

StatReport growth_shape_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  const double alpha = 1.5;
  const auto shapes = enumerate_shapes(3);
  std::map<std::vector<std::uint64_t>, std::size_t> index;
  std::vector<double> probs;
  std::size_t star = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    index.emplace(shape_key(shapes[i]), i);
    probs.push_back(shape_prob(shapes[i], alpha));
    if (shape_key(shapes[i]).size() == 1) star = i;
  }
  std::vector<std::size_t> which(static_cast<std::size_t>(z.growth_reps));
  for_each_index(which.size(), exec, [&](std::size_t r) {
    CounterRng rng = replicate_key(seed, r).stream();
    which[r] = index.at(shape_key(grow(alpha, 3, rng)));
  });
  std::vector<std::int64_t> counts(shapes.size(), 0);
  MeanVar star_freq;
  for (std::size_t w : which) {
    ++counts[w];
    star_freq.add(w == star ? 1.0 : 0.0);
  }
  StatReport r;
  r.name = "c02_growth_shape";
  const auto gof = multinomial_gof(counts, probs);
  r.compare({"chi_square", gof.statistic, 0.0, z.growth_reps}, {"chi_square_critical_1pct", gof.critical, Provenance::kDerived},
            Rule::critical());
  r.compare({"star_frequency", star_freq.mean(), star_freq.std_error(), star_freq.count()},
            {"star_prob", 0.25, Provenance::kDerived}, Rule::sigma(3.0));
  r.compare({"star_shape_prob", probs[star], 0.0, 1}, {"star_prob_exact", 0.25, Provenance::kDerived},
            Rule::absolute(1e-12));
  return r;
}

StatReport weight_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  StatReport r;
  r.name = "c03_weight_invariant";
  for (std::size_t a = 0; a < std::size(kAlphaGrid); ++a) {
    const double alpha = kAlphaGrid[a];
    std::vector<double> worst(static_cast<std::size_t>(z.weight_reps), 0.0);
    std::vector<char> broken(worst.size(), 0);
    for_each_index(worst.size(), exec, [&](std::size_t i) {
      CounterRng rng = replicate_key(seed, a * 1000003ULL + i).stream();
      try {
        worst[i] = grow(alpha, z.weight_n, rng).max_weight_error;
      } catch (const std::logic_error&) {
        broken[i] = 1;
      }
    });
    std::int64_t violations = 0;
    double max_err = 0.0;
    for (std::size_t i = 0; i < worst.size(); ++i) {
      violations += broken[i] || worst[i] > 1e-9;
      max_err = std::max(max_err, worst[i]);
    }
    const std::string tag = "_a" + fmt(alpha);
    r.compare({"violations" + tag, static_cast<double>(violations), 0.0, z.weight_reps},
              {"zero" + tag, 0.0, Provenance::kPaper}, Rule::exact());
    r.note({"max_rel_weight_error" + tag, max_err, 0.0, z.weight_reps}, {"tolerance" + tag, 1e-9, Provenance::kTrivial});
  }
  return r;
}

StatReport urn_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  const double alpha = 1.5, beta = 1.0 - 1.0 / alpha;
  const std::vector<double> gamma{alpha - 1.0, alpha - 1.0, alpha - 1.0, 2.0 - alpha};
  const std::vector<double> limit{beta, beta, beta, 1.0 - 2.0 * beta};
  const auto reps = static_cast<std::size_t>(z.urn_reps);
  std::vector<std::array<double, 4>> freq(reps), direct(reps);
  for_each_index(reps, exec, [&](std::size_t r) {
    CounterRng rng = replicate_key(seed, r).stream();
    UrnState s = UrnState::make(gamma, alpha);
    for (std::int64_t k = 0; k < z.urn_n; ++k) urn_advance(s, rng);
    // Relative weights (gamma_j + step * draws_j) / total, whose limit is the Dirichlet law.
    for (int j = 0; j < 4; ++j) freq[r][j] = s.weights[j] / s.total();
    CounterRng ref = replicate_key(seed, r).child(tag::kRetry).stream();
    const auto d = dirichlet_sample(limit, ref);
    std::copy(d.begin(), d.end(), direct[r].begin());
  });
  StatReport r;
  r.name = "c04_urn_limit";
  for (int j = 0; j < 4; ++j) {
    std::vector<double> xs(reps);
    for (std::size_t i = 0; i < reps; ++i) xs[i] = freq[i][j];
    const MeanVar mv = summarize(xs);
    r.compare({"mean_weight_share_" + std::to_string(j), mv.mean(), mv.std_error(), mv.count()},
              {"dirichlet_mean_" + std::to_string(j), limit[j] / (3.0 * beta + 1.0 - 2.0 * beta), Provenance::kPaper}, Rule::sigma(3.0));
  }
  for (int j : {0, 3}) {
    std::vector<double> xs(reps), ys(reps);
    for (std::size_t i = 0; i < reps; ++i) {
      xs[i] = freq[i][j];
      ys[i] = direct[i][j];
    }
    const auto ks = ks_test(xs, ys);
    r.compare({"ks_weight_share_" + std::to_string(j), ks.statistic, 0.0, z.urn_reps},
              {"ks_critical_1pct_" + std::to_string(j), ks.critical, Provenance::kDerived}, Rule::critical());
  }
  return r;
}

StatReport crp_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  const double beta = 0.5, theta = 0.5;
  std::vector<double> xs(static_cast<std::size_t>(z.crp_reps));
  for_each_index(xs.size(), exec, [&](std::size_t r) {
    CounterRng rng = replicate_key(seed, r).stream();
    CrpState s(beta, theta);
    while (s.n() < z.crp_n) s.advance(rng);
    xs[r] = static_cast<double>(s.tables()) / std::pow(static_cast<double>(z.crp_n), beta);
  });
  StatReport r;
  r.name = "c05_crp_mittag_leffler";
  const MeanVar mv = summarize(xs);
  r.compare({"mean_tables_scaled", mv.mean(), mv.std_error(), mv.count()},
            {"ml_moment_1", ml_moment(beta, theta, 1.0), Provenance::kDerived}, Rule::relative(0.05));
  return r;
}

StatReport marchal_spine_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  StatReport r;
  r.name = "c06_marchal_spine";
  for (double alpha : {1.5, 2.0}) {
    const StatReport s = spine_scaling_stat(alpha, z.spine_n, z.spine_reps, derive_key(seed, static_cast<std::uint64_t>(alpha * 10)), exec);
    for (std::size_t i = 0; i < s.verdicts.size(); ++i) {
      Estimate e = s.estimate(s.verdicts[i].estimate);
      Target t = s.target(s.verdicts[i].target);
      e.label += "_a" + fmt(alpha);
      t.label += "_a" + fmt(alpha);
      r.compare(e, t, i == 0 ? Rule::relative(0.05) : Rule::relative(0.10));
    }
  }
  return r;
}

StatReport martingale_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  const XiModel xi = XiModel::stable(2.0);
  StatReport r = spine_martingale(xi, z.mart_depth, z.mart_reps, seed, exec);
  r.name = "c07_martingale";
  // Longer, thinner trajectory to watch for blow-up beyond the main depth.
  const MartingaleRun run = martingale_levels(xi, z.mart_long_depth, z.mart_long_reps, derive_key(seed, 20), exec);
  double worst = 0.0;
  for (const auto& lv : run.levels) worst = std::max(worst, lv.variance());
  const double bound = r.target("second_moment_bound_mc").value;
  r.compare({"max_var_L_to_depth" + std::to_string(z.mart_long_depth), worst, 0.0, z.mart_long_reps},
            {"second_moment_bound_mc_long", bound, Provenance::kDerived}, Rule::at_most());
  return r;
}

StatReport calibration_case(const Sizes& z, std::uint64_t seed) {
  const double b = 1.0 / 3.0;
  const XiModel xi = XiModel::dirichlet({b, b, b, 1.0 - 2.0 * b}, std::numeric_limits<double>::quiet_NaN());
  const Calibration cal = calibrate_beta(xi, 1e-5, z.calib_reps, seed);
  StatReport r;
  r.name = "c08_calibration";
  r.compare({"calibrated_beta", cal.beta, 0.0, cal.reps}, {"beta_fixpoint", b, Provenance::kDerived}, Rule::absolute(0.01));
  r.note({"f_hat_at_one", cal.f_at_one, 0.0, cal.reps}, {"f_at_one_exact", xi.power_sum(1.0), Provenance::kDerived});
  return r;
}

StatReport fixpoint_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  const XiModel xi = XiModel::stable(1.5);
  const auto input = spine_samples(xi, InitLaw::constant(1.0), z.fix_depth, z.fix_reps, seed, exec);
  const auto output = spine_samples(xi, InitLaw::empirical(input), 1, z.fix_reps, derive_key(seed, 1), exec);
  const MeanVar in = summarize(input), out = summarize(output);
  StatReport r;
  r.name = "c09_rde_fixpoint";
  r.compare({"one_step_mean", out.mean(), out.std_error(), out.count()},
            {"input_mean", in.mean(), Provenance::kDerived}, Rule::sigma(3.0));
  const auto ks = ks_test(input, output);
  r.compare({"ks_one_step_vs_input", ks.statistic, 0.0, z.fix_reps},
            {"ks_critical_1pct", ks.critical, Provenance::kPaper}, Rule::critical());
  return r;
}

StatReport attraction_case(const Sizes& z, std::uint64_t seed, Exec exec) {
  StatReport r = attraction_experiment(XiModel::stable(2.0), InitLaw::constant(1.0), z.attract_depth, z.attract_reps,
                                       seed, exec);
  r.name = "c10_attraction";
  return r;
}

StatReport gh_case() {
  CounterRng rng = StreamKey{0x6768636f72707573ULL}.stream();
  std::vector<MetricTree> corpus;
  for (int i = 0; i < 24; ++i) corpus.push_back(random_small_tree(rng, 4, false, true));
  const std::size_t n = corpus.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = gh_dist(corpus[i], corpus[j], true, 4, Exec::kSerial);
  double asym = 0.0, diag = 0.0, triangle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag = std::max(diag, d[i * n + i]);
    for (std::size_t j = 0; j < n; ++j) {
      asym = std::max(asym, std::abs(d[i * n + j] - d[j * n + i]));
      for (std::size_t k = 0; k < n; ++k) triangle = std::max(triangle, d[i * n + k] - d[i * n + j] - d[j * n + k]);
    }
  }
  StatReport r;
  r.name = "c11_gh_metric";
  r.compare({"max_asymmetry", asym, 0.0, static_cast<std::int64_t>(n * n)}, {"zero_asym", 0.0, Provenance::kTrivial},
            Rule::exact());
  r.compare({"max_self_distance", diag, 0.0, static_cast<std::int64_t>(n)}, {"zero_self", 0.0, Provenance::kTrivial},
            Rule::exact());
  r.compare({"max_triangle_excess", triangle, 0.0, static_cast<std::int64_t>(n * n * n)},
            {"triangle_slack", 1e-12, Provenance::kTrivial}, Rule::at_most());
  const MetricTree s3 = MetricTree::segment(3.0), s5 = MetricTree::segment(5.0);
  r.compare({"segments_3_5_marked", gh_dist(s3, s5, true), 0.0, 1}, {"half_length_gap", 1.0, Provenance::kDerived},
            Rule::exact());
  r.compare({"segments_3_5_rooted", gh_dist(s3, s5, false), 0.0, 1},
            {"half_length_gap_rooted", 1.0, Provenance::kDerived}, Rule::exact());
  return r;
}

bool bitwise_equal(const MetricTree& a, const MetricTree& b) {
  if (a.size() != b.size() || a.root() != b.root() || a.marked() != b.marked()) return false;
  for (NodeId v = 0; v < static_cast<NodeId>(a.size()); ++v)
    if (a.parent(v) != b.parent(v) || a.edge_len(v) != b.edge_len(v) || a.mass(v) != b.mass(v)) return false;
  return a.mass_total() == b.mass_total();
}

double max_rel_distance_gap(const MetricTree& a, const MetricTree& b) {
  const auto da = distance_matrix(a), db = distance_matrix(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i)
    worst = std::max(worst, std::abs(da[i] - db[i]) / std::max(1.0, std::abs(da[i])));
  return worst;
}

StatReport concat_case(const Sizes& z, std::uint64_t seed) {
  CounterRng rng = StreamKey{seed}.child(tag::kReplicate).stream();
  double formula_err = 0.0, mass_err = 0.0, general_gap = 0.0;
  std::int64_t exact_cases = 0, exact_failures = 0;
  for (int t = 0; t < z.concat_inputs; ++t) {
    const ConcatInput in = random_concat_input(rng, 8, 5, true);
    const ConcatResult res = concat_with_map(in);
    for (std::size_t i = 0; i < in.trees.size(); ++i)
      for (std::size_t j = 0; j < in.trees.size(); ++j)
        for (NodeId u = 0; u < static_cast<NodeId>(in.trees[i].size()); ++u)
          for (NodeId v = 0; v < static_cast<NodeId>(in.trees[j].size()); ++v) {
            const double got = dist(res.tree, res.image[i][u], res.image[j][v]);
            formula_err = std::max(formula_err, std::abs(got - concat_formula_distance(in, i, u, j, v)));
          }
    double total = 0.0;
    for (double m : res.tree.masses()) total += m;
    mass_err = std::max(mass_err, std::abs(total - 1.0));

    // Scaling every input by c scales the output by c.
    const bool exact = in.beta == 0.5 || in.beta == 0.25;
    const double c = exact ? (in.beta == 0.5 ? 4.0 : 16.0) : 0.5 + 3.0 * uniform01(rng);
    ConcatInput scaled = in;
    for (auto& tr : scaled.trees) tr = rescale(tr, c, in.beta);
    const MetricTree lhs = concat(scaled), rhs = rescale(res.tree, c, in.beta);
    if (exact) {
      ++exact_cases;
      exact_failures += !bitwise_equal(lhs, rhs);
    }
    general_gap = std::max(general_gap, max_rel_distance_gap(lhs, rhs));
  }
  StatReport r;
  r.name = "c12_concat_algebra";
  r.compare({"max_formula_error", formula_err, 0.0, z.concat_inputs}, {"formula_tolerance", 1e-9, Provenance::kDerived},
            Rule::at_most());
  r.compare({"max_mass_defect", mass_err, 0.0, z.concat_inputs}, {"mass_tolerance", kMassTolerance, Provenance::kTrivial},
            Rule::at_most());
  r.compare({"equivariance_mismatches", static_cast<double>(exact_failures), 0.0, exact_cases},
            {"zero_mismatch", 0.0, Provenance::kDerived}, Rule::exact());
  r.compare({"equivariance_rel_gap", general_gap, 0.0, z.concat_inputs}, {"rounding_level", 1e-12, Provenance::kDerived},
            Rule::at_most());
  return r;
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "quick") return Suite::kQuick;
  if (name == "full") return Suite::kFull;
  throw DomainError("unknown suite '" + name + "' (expected quick or full)");
}

std::uint64_t retry_seed(std::uint64_t seed) { return derive_key(seed, tag::kRetry); }

std::vector<SuiteCase> suite_cases(Suite suite) {
  const Sizes z = suite == Suite::kFull ? kFullSizes : kQuickSizes;
  std::vector<SuiteCase> cases;
  cases.push_back({"c01_shape_law", [](std::uint64_t, Exec) { return shape_law_case(); }, false});
  cases.push_back({"c02_growth_shape", [z](std::uint64_t s, Exec e) { return growth_shape_case(z, s, e); }});
  cases.push_back({"c03_weight_invariant", [z](std::uint64_t s, Exec e) { return weight_case(z, s, e); }, false});
  cases.push_back({"c04_urn_limit", [z](std::uint64_t s, Exec e) { return urn_case(z, s, e); }});
  cases.push_back({"c05_crp_mittag_leffler", [z](std::uint64_t s, Exec e) { return crp_case(z, s, e); }});
  cases.push_back({"c06_marchal_spine", [z](std::uint64_t s, Exec e) { return marchal_spine_case(z, s, e); }});
  cases.push_back({"c07_martingale", [z](std::uint64_t s, Exec e) { return martingale_case(z, s, e); }});
  cases.push_back({"c08_calibration", [z](std::uint64_t s, Exec) { return calibration_case(z, s); }});
  cases.push_back({"c09_rde_fixpoint", [z](std::uint64_t s, Exec e) { return fixpoint_case(z, s, e); }});
  cases.push_back({"c10_attraction", [z](std::uint64_t s, Exec e) { return attraction_case(z, s, e); }});
  cases.push_back({"c11_gh_metric", [](std::uint64_t, Exec) { return gh_case(); }, false});
  cases.push_back({"c12_concat_algebra", [z](std::uint64_t s, Exec) { return concat_case(z, s); }, false});
  return cases;
}

bool SuiteResult::all_pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const StatReport& r) { return r.all_pass(); });
}

SuiteResult run_suite(Suite suite, std::uint64_t seed, bool retry_once, Exec exec) {
  const auto cases = suite_cases(suite);
  auto run_case = [&](const SuiteCase& c, std::uint64_t s) {
    const auto start = std::chrono::steady_clock::now();
    StatReport r = c.run(s, exec);
    r.name = c.name;
    r.seed = s;
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  SuiteResult out;
  out.reports.resize(cases.size());
  for_each_index(cases.size(), exec, [&](std::size_t i) { out.reports[i] = run_case(cases[i], seed); });
  if (retry_once) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (out.reports[i].all_pass() || !cases[i].monte_carlo) continue;
      out.retried.push_back(cases[i].name);
      out.reports[i] = run_case(cases[i], retry_seed(seed));
    }
  }
  std::sort(out.reports.begin(), out.reports.end(),
            [](const StatReport& a, const StatReport& b) { return a.name < b.name; });
  return out;
}

MetricTree random_small_tree(CounterRng& rng, int max_nodes, bool with_mass, bool marked) {
  if (max_nodes < 1) throw DomainError("random_small_tree: max_nodes must be positive");
  const auto n = static_cast<NodeId>(1 + uniform_index(rng, static_cast<std::uint64_t>(max_nodes)));
  TreeBuilder b;
  b.add_node(kNoNode, 0.0);
  for (NodeId v = 1; v < n; ++v)
    b.add_node(static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(v))), 0.25 + 2.0 * uniform01(rng));
  b.set_root(0);
  b.set_marked(marked ? std::optional<NodeId>(static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n))))
                      : std::nullopt);
  if (with_mass) {
    MetricTree shape = std::move(TreeBuilder(b)).build();
    std::vector<NodeId> holders = n == 1 ? std::vector<NodeId>{0} : shape.leaves();
    std::vector<double> ones(holders.size(), 1.0);
    const auto w = dirichlet_sample(ones, rng);
    for (std::size_t i = 0; i < holders.size(); ++i) b.set_mass(holders[i], w[i]);
  }
  return std::move(b).build();
}

ConcatInput random_concat_input(CounterRng& rng, int max_atoms, int max_nodes, bool with_mass) {
  static constexpr double kBetas[] = {0.5, 0.25, 1.0 / 3.0};
  ConcatInput in;
  const std::uint64_t pick = uniform_index(rng, 4);
  in.beta = pick < 3 ? kBetas[pick] : 0.05 + 0.9 * uniform01(rng);
  const std::size_t tail = max_atoms > 3 ? uniform_index(rng, static_cast<std::uint64_t>(max_atoms - 2)) : 0;
  std::vector<double> params{1.0, 1.0, 1.0, 1.0};
  auto x = dirichlet_sample(params, rng);
  // Occasionally zero out x2 or the tail to exercise empty atoms.
  const std::uint64_t zero = uniform_index(rng, 4);
  if (zero == 0) x[2] = 0.0;
  if (zero == 1 || tail == 0) x[3] = 0.0;
  double sum = x[0] + x[1] + x[2] + x[3];
  for (double& v : x) v /= sum;
  in.xi.x = {x[0], x[1], x[2], x[3]};
  if (x[3] > 0.0) {
    std::vector<double> ones(tail, 1.0);
    in.xi.p = tail == 1 ? std::vector<double>{1.0} : dirichlet_sample(ones, rng);
    std::sort(in.xi.p.begin(), in.xi.p.end(), std::greater<>());
  }
  for (std::size_t i = 0; i < in.xi.size(); ++i) in.trees.push_back(random_small_tree(rng, max_nodes, with_mass, true));
  return in;
}

}  // namespace srt
