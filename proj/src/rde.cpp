#include "srt/rde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "srt/errors.hpp"
#include "srt/random_laws.hpp"

namespace srt {

namespace {

double neumaier(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

void check_unit_sum(std::span<const double> v, const std::string& what) {
  for (double x : v)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(what + ": entries must lie in [0,1]");
  if (std::abs(neumaier(v) - 1.0) > kMassTolerance) throw DomainError(what + ": entries must sum to 1");
}

// Raw atom vector drawn from the node's kXi stream.
std::vector<double> draw_head(const XiModel& m, StreamKey node) {
  CounterRng rng = node.child(tag::kXi).stream();
  switch (m.kind) {
    case XiModel::Kind::kStable: {
      const auto x = stable_dirichlet_part(m.alpha, rng);
      return {x.begin(), x.end()};
    }
    case XiModel::Kind::kDirichlet: return dirichlet_sample(m.params, rng);
    case XiModel::Kind::kDiscrete: {
      const double u = uniform01(rng);
      double acc = 0.0;
      for (std::size_t k = 0; k < m.probs.size(); ++k) {
        acc += m.probs[k];
        if (u < acc) return m.table[k];
      }
      return m.table.back();
    }
  }
  return {};
}

std::vector<double> stable_params(double alpha) {
  if (alpha == 2.0) return {0.5, 0.5, 0.5};
  const double beta = 1.0 - 1.0 / alpha;
  return {beta, beta, beta, 1.0 - 2.0 * beta};
}

void require_beta(const XiModel& m) {
  if (!(m.beta > 0.0 && m.beta < 1.0))
    throw DomainError("xi model has no usable beta (calibrate it first): " + m.describe());
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

XiModel XiModel::stable(double alpha, double eps, std::size_t max_atoms) {
  XiModel m;
  m.kind = Kind::kStable;
  m.alpha = alpha;
  m.beta = 1.0 - 1.0 / alpha;
  m.eps = eps;
  m.max_atoms = max_atoms;
  m.validate();
  return m;
}

XiModel XiModel::dirichlet(std::vector<double> params, double beta) {
  XiModel m;
  m.kind = Kind::kDirichlet;
  m.params = std::move(params);
  m.beta = beta;
  m.validate();
  return m;
}

XiModel XiModel::discrete(std::vector<std::vector<double>> table, std::vector<double> probs, double beta) {
  XiModel m;
  m.kind = Kind::kDiscrete;
  m.table = std::move(table);
  m.probs = std::move(probs);
  m.beta = beta;
  m.validate();
  return m;
}

std::string XiModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kStable: os << "stable(" << alpha << ")"; break;
    case Kind::kDirichlet: {
      os << "dirichlet(";
      for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
      os << ")";
      break;
    }
    case Kind::kDiscrete: os << "discrete(" << table.size() << " vectors)"; break;
  }
  return os.str();
}

void XiModel::validate() const {
  if (!std::isnan(beta) && !(beta > 0.0 && beta < 1.0)) throw DomainError("xi model: beta must lie in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("xi model: eps must lie in (0,1)");
  if (max_atoms == 0) throw DomainError("xi model: max_atoms must be positive");
  switch (kind) {
    case Kind::kStable:
      if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("xi model: alpha must lie in (1,2]");
      break;
    case Kind::kDirichlet:
      if (params.size() < 2) throw DomainError("xi model: Dirichlet needs at least two parameters");
      for (double a : params)
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("xi model: Dirichlet parameters must be positive");
      break;
    case Kind::kDiscrete: {
      if (table.empty() || table.size() != probs.size())
        throw DomainError("xi model: discrete law needs one probability per atom vector");
      for (const auto& v : table) {
        if (v.size() < 2) throw DomainError("xi model: atom vectors need at least two entries");
        check_unit_sum(v, "xi model atom vector");
        if (!(v[0] > 0.0 && v[1] > 0.0)) throw DomainError("xi model: xi_0 and xi_1 must be positive");
      }
      for (double p : probs)
        if (!(p > 0.0)) throw DomainError("xi model: probabilities must be positive");
      check_unit_sum(probs, "xi model probabilities");
      break;
    }
  }
}

std::pair<double, double> XiModel::sample_pair(StreamKey node) const {
  const auto v = draw_head(*this, node);
  return {v[0], v[1]};
}

ScalingSeq XiModel::sample(StreamKey node) const {
  const auto v = draw_head(*this, node);
  ScalingSeq xi;
  if (kind == Kind::kStable) {
    xi.x = {v[0], v[1], v[2], v[3]};
    if (alpha < 2.0) {
      CounterRng rng = node.child(tag::kXiPd).stream();
      StickSeq pd = stable_pd_part(alpha, eps, rng, max_atoms);
      xi.p = std::move(pd.weights);
      xi.residual = pd.residual;
    }
    return xi;
  }
  xi.x = {v[0], v[1], v.size() > 2 ? v[2] : 0.0, 0.0};
  std::vector<double> tail;
  for (std::size_t i = 3; i < v.size(); ++i)
    if (v[i] > 0.0) tail.push_back(v[i]);
  if (!tail.empty()) {
    std::sort(tail.begin(), tail.end(), std::greater<>());
    const double x3 = neumaier(tail);
    xi.x[3] = x3;
    for (double& t : tail) t /= x3;
    xi.p = std::move(tail);
  }
  return xi;
}

double XiModel::power_sum(double s) const {
  switch (kind) {
    case Kind::kStable: {
      const auto p = stable_params(alpha);
      const double e[1] = {s};
      return 2.0 * dirichlet_power_moment(p, e);
    }
    case Kind::kDirichlet: {
      const double e0[1] = {s};
      const double e1[2] = {0.0, s};
      return dirichlet_power_moment(params, e0) + dirichlet_power_moment(params, e1);
    }
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (std::size_t k = 0; k < table.size(); ++k)
        acc += probs[k] * (std::pow(table[k][0], s) + std::pow(table[k][1], s));
      return acc;
    }
  }
  return 0.0;
}

double XiModel::cross_moment(double s) const {
  const double e[2] = {s, s};
  switch (kind) {
    case Kind::kStable: return dirichlet_power_moment(stable_params(alpha), e);
    case Kind::kDirichlet: return dirichlet_power_moment(params, e);
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (std::size_t k = 0; k < table.size(); ++k)
        acc += probs[k] * std::pow(table[k][0], s) * std::pow(table[k][1], s);
      return acc;
    }
  }
  return 0.0;
}

InitLaw InitLaw::constant(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("init: segment length must be positive");
  InitLaw l;
  l.kind = Kind::kConstant;
  l.value = length;
  return l;
}

InitLaw InitLaw::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw DomainError("init: exponential mean must be positive");
  InitLaw l;
  l.kind = Kind::kExponential;
  l.value = mean;
  return l;
}

InitLaw InitLaw::empirical(std::vector<double> lengths) {
  if (lengths.empty()) throw DomainError("init: empirical law needs samples");
  for (double y : lengths)
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("init: sample lengths must be positive");
  InitLaw l;
  l.kind = Kind::kSamples;
  l.samples = std::move(lengths);
  return l;
}

InitLaw InitLaw::from_trees(std::vector<MetricTree> trees) {
  if (trees.empty()) throw DomainError("init: tree law needs at least one tree");
  for (const auto& t : trees)
    if (!t.marked()) throw DomainError("init: trees must be marked");
  InitLaw l;
  l.kind = Kind::kTrees;
  l.trees = std::move(trees);
  return l;
}

std::string InitLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kConstant: os << "segment(" << value << ")"; break;
    case Kind::kExponential: os << "exp(" << value << ")"; break;
    case Kind::kSamples: os << "empirical(" << samples.size() << " lengths)"; break;
    case Kind::kTrees: os << "trees(" << trees.size() << ")"; break;
  }
  return os.str();
}

MetricTree InitLaw::sample(CounterRng& rng) const {
  switch (kind) {
    case Kind::kConstant: return MetricTree::segment(value, true);
    case Kind::kExponential: return MetricTree::segment(-value * std::log(uniform_open(rng)), true);
    case Kind::kSamples: return MetricTree::segment(samples[uniform_index(rng, samples.size())], true);
    case Kind::kTrees: return trees.size() > 1 ? trees[uniform_index(rng, trees.size())] : trees.front();
  }
  return MetricTree();
}

double InitLaw::sample_spine(CounterRng& rng) const {
  switch (kind) {
    case Kind::kConstant: return value;
    case Kind::kExponential: return -value * std::log(uniform_open(rng));
    case Kind::kSamples: return samples[uniform_index(rng, samples.size())];
    case Kind::kTrees: {
      const MetricTree& t = trees.size() > 1 ? trees[uniform_index(rng, trees.size())] : trees.front();
      return t.root_dist(*t.marked());
    }
  }
  return 0.0;
}

double InitLaw::mean_spine() const {
  switch (kind) {
    case Kind::kConstant:
    case Kind::kExponential: return value;
    case Kind::kSamples: return neumaier(samples) / static_cast<double>(samples.size());
    case Kind::kTrees: {
      double acc = 0.0;
      for (const auto& t : trees) acc += t.root_dist(*t.marked());
      return acc / static_cast<double>(trees.size());
    }
  }
  return 0.0;
}

StreamKey node_key(StreamKey root, const Word& u) { return root.word(u); }

StreamKey replicate_key(std::uint64_t seed, std::uint64_t r) {
  return StreamKey{seed}.child(tag::kReplicate).child(r);
}

namespace {

// Shared recursion for full and skeleton modes: levels [0, cut) concatenate
// full scaling sequences; at level cut the leaf callback supplies the tree.
class TreeRecursion {
 public:
  using LeafFn = std::function<MetricTree(StreamKey)>;

  TreeRecursion(const XiModel& xi, int cut, LeafFn leaf, std::size_t limit)
      : xi_(xi), cut_(cut), leaf_(std::move(leaf)), limit_(limit) {}

  IterateTree run(StreamKey root) {
    Word u;
    return build(root, u, 0);
  }

 private:
  IterateTree build(StreamKey key, Word& u, int level) {
    IterateTree out;
    if (level == cut_) {
      out.tree = leaf_(key);
      produced_ += out.tree.size();
      if (produced_ > limit_) throw SizeError("full iteration exceeds the node limit of " + std::to_string(limit_));
      out.marks.emplace(u, *out.tree.marked());
      return out;
    }
    ConcatInput in;
    in.xi = xi_.sample(key);
    in.beta = xi_.beta;
    const std::size_t atoms = in.xi.size();
    std::size_t live = 0;
    for (std::size_t i = 0; i < atoms; ++i) live += in.xi.atom(i) > 0.0;
    // Every live child contributes at least two nodes per remaining level.
    const double estimate = static_cast<double>(produced_) +
                            2.0 * std::pow(static_cast<double>(live), static_cast<double>(cut_ - level));
    if (estimate > static_cast<double>(limit_))
      throw SizeError("full iteration would exceed the node limit of " + std::to_string(limit_));
    in.trees.resize(atoms);
    std::vector<std::map<Word, NodeId>> child_marks(atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
      if (in.xi.atom(i) <= 0.0) continue;
      u.push_back(static_cast<std::uint32_t>(i));
      IterateTree child = build(key.child(i), u, level + 1);
      u.pop_back();
      in.trees[i] = std::move(child.tree);
      child_marks[i] = std::move(child.marks);
    }
    ConcatResult res = concat_with_map(in);
    for (std::size_t i = 0; i < atoms; ++i)
      for (const auto& [w, node] : child_marks[i]) out.marks.emplace(w, res.image[i][node]);
    out.tree = std::move(res.tree);
    return out;
  }

  const XiModel& xi_;
  int cut_;
  LeafFn leaf_;
  std::size_t limit_;
  std::size_t produced_ = 0;
};

double spine_rec(const XiModel& xi, const InitLaw& init, int remaining, StreamKey key) {
  if (remaining == 0) {
    CounterRng rng = key.child(tag::kInit).stream();
    return init.sample_spine(rng);
  }
  const auto [a, b] = xi.sample_pair(key);
  return std::pow(a, xi.beta) * spine_rec(xi, init, remaining - 1, key.child(0)) +
         std::pow(b, xi.beta) * spine_rec(xi, init, remaining - 1, key.child(1));
}

}  // namespace

IterateTree iterate_full(const XiModel& xi, const InitLaw& init, int depth, StreamKey root, std::size_t node_limit) {
  if (depth < 0) throw DomainError("iterate: depth must be nonnegative");
  require_beta(xi);
  if (depth > 0 && std::ldexp(2.0, depth) > static_cast<double>(node_limit))
    throw SizeError("full iteration at depth " + std::to_string(depth) + " exceeds the node limit");
  TreeRecursion rec(
      xi, depth,
      [&](StreamKey key) {
        CounterRng rng = key.child(tag::kInit).stream();
        return init.sample(rng);
      },
      node_limit);
  return rec.run(root);
}

double iterate_spine(const XiModel& xi, const InitLaw& init, int depth, StreamKey root) {
  if (depth < 0 || depth > 30) throw DomainError("iterate: spine depth must lie in [0,30]");
  require_beta(xi);
  return spine_rec(xi, init, depth, root);
}

IterateTree iterate_skeleton(const XiModel& xi, const InitLaw& init, int depth, int k, StreamKey root,
                             std::size_t node_limit) {
  if (k < 0 || k > depth) throw DomainError("iterate: skeleton level must lie in [0, depth]");
  if (depth - k > 30) throw DomainError("iterate: spine depth below the skeleton must be at most 30");
  require_beta(xi);
  TreeRecursion rec(
      xi, k, [&](StreamKey key) { return MetricTree::segment(spine_rec(xi, init, depth - k, key), true); },
      node_limit);
  return rec.run(root);
}

std::vector<double> spine_samples(const XiModel& xi, const InitLaw& init, int depth, std::int64_t reps,
                                  std::uint64_t seed, Exec exec) {
  if (reps < 1) throw DomainError("spine_samples: reps must be positive");
  require_beta(xi);
  std::vector<double> out(static_cast<std::size_t>(reps));
  for_each_index(out.size(), exec, [&](std::size_t r) { out[r] = iterate_spine(xi, init, depth, replicate_key(seed, r)); });
  return out;
}

namespace {

void martingale_rec(const XiModel& xi, int depth, int level, double weight, StreamKey key, std::vector<double>& acc) {
  acc[level] += weight;
  if (level == depth) return;
  const auto [a, b] = xi.sample_pair(key);
  martingale_rec(xi, depth, level + 1, weight * std::pow(a, xi.beta), key.child(0), acc);
  martingale_rec(xi, depth, level + 1, weight * std::pow(b, xi.beta), key.child(1), acc);
}

}  // namespace

MartingaleRun martingale_levels(const XiModel& xi, int depth, std::int64_t reps, std::uint64_t seed, Exec exec) {
  if (depth < 0 || depth > 25) throw DomainError("martingale: depth must lie in [0,25]");
  if (reps < 1) throw DomainError("martingale: reps must be positive");
  require_beta(xi);
  const auto width = static_cast<std::size_t>(depth + 1);
  std::vector<double> table(static_cast<std::size_t>(reps) * width, 0.0);
  for_each_index(static_cast<std::size_t>(reps), exec, [&](std::size_t r) {
    std::vector<double> acc(width, 0.0);
    martingale_rec(xi, depth, 0, 1.0, replicate_key(seed, r), acc);
    std::copy(acc.begin(), acc.end(), table.begin() + static_cast<std::ptrdiff_t>(r * width));
  });
  MartingaleRun run;
  run.levels.resize(width);
  run.last.resize(static_cast<std::size_t>(reps));
  for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r) {
    for (std::size_t k = 0; k < width; ++k) run.levels[k].add(table[r * width + k]);
    run.last[r] = table[r * width + width - 1];
  }
  return run;
}

StatReport spine_martingale(const XiModel& xi, int depth, std::int64_t reps, std::uint64_t seed, Exec exec) {
  const auto start = std::chrono::steady_clock::now();
  const MartingaleRun run = martingale_levels(xi, depth, reps, seed, exec);
  StatReport r;
  r.name = "spine_martingale";
  r.seed = seed;
  const double b = xi.beta;

  // Monte Carlo a and c from the root scaling factors of independent replicates.
  MeanVar a_hat, c_hat;
  for (std::int64_t i = 0; i < reps; ++i) {
    const auto [x0, x1] = xi.sample_pair(replicate_key(seed, static_cast<std::uint64_t>(i)));
    a_hat.add(std::pow(x0, 2.0 * b) + std::pow(x1, 2.0 * b));
    c_hat.add(std::pow(x0, b) * std::pow(x1, b));
  }
  const double a = xi.power_sum(2.0 * b), c = xi.cross_moment(b);
  r.note({"a_mc", a_hat.mean(), a_hat.std_error(), a_hat.count()}, {"a_exact", a, Provenance::kDerived});
  r.note({"c_mc", c_hat.mean(), c_hat.std_error(), c_hat.count()}, {"c_exact", c, Provenance::kDerived});
  const double bound = 2.0 * c_hat.mean() / (1.0 - a_hat.mean());

  const auto& last = run.levels.back();
  r.compare({"mean_L" + std::to_string(depth), last.mean(), last.std_error(), last.count()},
            {"mean_one", 1.0, Provenance::kPaper}, Rule::sigma(3.0));

  double second = 1.0, worst = 0.0;
  for (std::size_t k = 0; k < run.levels.size(); ++k) {
    const auto& lv = run.levels[k];
    if (k > 0) second = a * second + 2.0 * c;
    r.note({"var_L" + std::to_string(k), lv.variance(), 0.0, lv.count()},
           {"exact_var_L" + std::to_string(k), second - 1.0, Provenance::kDerived});
    worst = std::max(worst, lv.variance());
  }
  r.compare({"max_var_L", worst, 0.0, reps}, {"second_moment_bound_mc", bound, Provenance::kDerived}, Rule::at_most());
  r.runtime_s = elapsed(start);
  return r;
}

Calibration calibrate_beta(const XiModel& xi, double tol, std::int64_t reps, std::uint64_t seed) {
  Calibration cal;
  if (xi.kind == XiModel::Kind::kStable) {
    cal.beta = 1.0 - 1.0 / xi.alpha;
    cal.f_at_one = xi.power_sum(1.0);
    return cal;
  }
  if (!(tol > 0.0 && tol < 0.5)) throw DomainError("calibrate: tol must lie in (0,0.5)");
  if (reps < 30) throw DomainError("calibrate: need at least 30 draws");
  std::vector<double> x0(static_cast<std::size_t>(reps)), x1(static_cast<std::size_t>(reps));
  for (std::size_t r = 0; r < x0.size(); ++r) std::tie(x0[r], x1[r]) = xi.sample_pair(replicate_key(seed, r));
  auto f = [&](double b) {
    double acc = 0.0;
    for (std::size_t r = 0; r < x0.size(); ++r) acc += std::pow(x0[r], b) + std::pow(x1[r], b);
    return acc / static_cast<double>(x0.size());
  };
  cal.reps = reps;
  cal.f_at_one = f(1.0);
  if (cal.f_at_one >= 1.0) throw NoRootError("calibrate: estimated f(1) >= 1, no root on (0,1)");
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  cal.beta = 0.5 * (lo + hi);
  cal.residual = std::abs(f(cal.beta) - 1.0);
  return cal;
}

namespace {

void string_rec(const XiModel& xi, const InitLaw& init, int levels, int level, double mass, double scale,
                StreamKey key, GenString& s) {
  if (level == levels) {
    CounterRng rng = key.child(tag::kInit).stream();
    const double frag = scale * init.sample_spine(rng);
    s.atoms.emplace_back(s.length + 0.5 * frag, mass);
    s.length += frag;
    return;
  }
  const auto [a, b] = xi.sample_pair(key);
  string_rec(xi, init, levels, level + 1, mass * a, scale * std::pow(a, xi.beta), key.child(0), s);
  const double merged = mass * (1.0 - a - b);
  if (merged > 0.0) s.atoms.emplace_back(s.length, merged);
  string_rec(xi, init, levels, level + 1, mass * b, scale * std::pow(b, xi.beta), key.child(1), s);
}

}  // namespace

GenString build_string(const XiModel& xi, const InitLaw& init, int m, StreamKey root) {
  if (m < 0 || m > 20) throw DomainError("build_string: m must lie in [0,20]");
  require_beta(xi);
  GenString s;
  string_rec(xi, init, m + 1, 0, 1.0, 1.0, root, s);
  return s;
}

MetricTree grow_from_string(const XiModel& xi, const InitLaw& init, int m, int levels, StreamKey root,
                            std::size_t node_limit) {
  if (levels < 0) throw DomainError("grow_from_string: levels must be nonnegative");
  require_beta(xi);
  struct Bead {
    NodeId node;
    double mass;
    StreamKey key;
  };
  TreeBuilder b;
  std::vector<double> mass;
  auto add = [&](NodeId parent, double len, bool junction) {
    if (mass.size() >= node_limit) throw SizeError("string construction exceeds the node limit");
    mass.push_back(0.0);
    return b.add_node(parent, len, junction);
  };
  // Hangs a scaled copy of the string at `from`; returns its endpoint.
  auto hang = [&](NodeId from, double q, StreamKey key, std::vector<Bead>& beads) {
    const GenString s = build_string(xi, init, m, key);
    const double scale = std::pow(q, xi.beta);
    NodeId prev = from;
    double prev_pos = 0.0;
    for (std::size_t j = 0; j < s.atoms.size(); ++j) {
      const double pos = scale * s.atoms[j].first;
      const double len = std::max(0.0, pos - prev_pos);
      prev = add(prev, len, true);
      prev_pos = pos;
      mass[prev] = q * s.atoms[j].second;
      beads.push_back({prev, mass[prev], key.child(tag::kString).child(j)});
    }
    const double end = scale * s.length;
    const double len = std::max(0.0, end - prev_pos);
    return add(prev, len, len == 0.0);
  };

  const NodeId r = add(kNoNode, 0.0, false);
  std::vector<Bead> beads;
  const NodeId tip = hang(r, 1.0, root, beads);
  for (int level = 0; level < levels; ++level) {
    std::vector<Bead> next;
    for (const Bead& bead : beads) {
      mass[bead.node] = 0.0;
      hang(bead.node, bead.mass, bead.key, next);
    }
    beads = std::move(next);
  }
  b.set_root(r);
  b.set_marked(tip);
  for (std::size_t v = 0; v < mass.size(); ++v)
    if (mass[v] > 0.0) b.set_mass(static_cast<NodeId>(v), mass[v]);
  return std::move(b).build();
}

std::vector<MeanVar> string_height_profile(const XiModel& xi, const InitLaw& init, int m, int levels,
                                           std::int64_t reps, std::uint64_t seed, Exec exec) {
  if (reps < 1) throw DomainError("string_height_profile: reps must be positive");
  const auto width = static_cast<std::size_t>(levels + 1);
  std::vector<double> table(static_cast<std::size_t>(reps) * width);
  for_each_index(static_cast<std::size_t>(reps), exec, [&](std::size_t r) {
    for (std::size_t l = 0; l < width; ++l)
      table[r * width + l] =
          stats(grow_from_string(xi, init, m, static_cast<int>(l), replicate_key(seed, r))).height;
  });
  std::vector<MeanVar> out(width);
  for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r)
    for (std::size_t l = 0; l < width; ++l) out[l].add(table[r * width + l]);
  return out;
}

StatReport attraction_experiment(const XiModel& xi, const InitLaw& init, int depth, std::int64_t reps,
                                 std::uint64_t seed, Exec exec, AttractionOptions opt) {
  const auto start = std::chrono::steady_clock::now();
  require_beta(xi);
  StatReport r;
  r.name = "attraction";
  r.seed = seed;
  const double h = init.mean_spine();
  const auto xs = spine_samples(xi, init, depth, reps, seed, exec);
  const MeanVar mv = summarize(xs);
  const Provenance conservation = depth == 0 ? Provenance::kTrivial : Provenance::kDerived;
  r.compare({"mean_spine_depth" + std::to_string(depth), mv.mean(), mv.std_error(), mv.count()},
            {"h", h, conservation}, Rule::sigma(3.0));

  if (xi.kind == XiModel::Kind::kStable && depth > 0) {
    const double alpha = xi.alpha, b = xi.beta;
    const double m1 = alpha * std::exp(std::lgamma(b) - std::lgamma(2.0 * b));
    r.compare({"normalized_mean_ratio", mv.mean() / h, mv.std_error() / h, mv.count()},
              {"ratio_one", 1.0, Provenance::kPaper}, Rule::relative(opt.mean_tol));
    const auto m2 = moment_test(xs, 2.0, 0.0, Rule::relative(opt.second_tol), "second_moment_spine");
    const double target2 = alpha * alpha * ml_moment(b, b, 2.0) * (h / m1) * (h / m1);
    r.compare(m2.estimate, {"ml_second_moment", target2, Provenance::kDerived}, Rule::relative(opt.second_tol));
  }
  if (depth >= 2 && reps >= 100) {
    const auto ys = spine_samples(xi, init, depth - 2, reps, derive_key(seed, tag::kReplicate + 1), exec);
    const auto ks = ks_test(ys, xs);
    r.compare({"ks_depth" + std::to_string(depth - 2) + "_vs_" + std::to_string(depth), ks.statistic, 0.0, reps},
              {"ks_critical_1pct", ks.critical, Provenance::kDerived}, Rule::critical());
  }
  r.runtime_s = elapsed(start);
  return r;
}

}  // namespace srt
