#include "srt/concat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srt/errors.hpp"

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

double scale_of(double atom, double beta) { return atom > 0.0 ? std::pow(atom, beta) : 0.0; }

}  // namespace

std::vector<double> ScalingSeq::atoms() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = atom(i);
  return out;
}

void ScalingSeq::validate() const {
  for (std::size_t i = 0; i < 4; ++i)
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) throw DomainError("scaling sequence: x" + std::to_string(i) + " outside [0,1]");
  if (std::abs(neumaier(x) - 1.0) > kMassTolerance) throw DomainError("scaling sequence: x does not sum to 1");
  if (x[3] > 0.0 && p.empty()) throw DomainError("scaling sequence: x3 > 0 needs a nonempty p");
  if (!p.empty()) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!(p[j] > 0.0 && p[j] <= 1.0)) throw DomainError("scaling sequence: p must be positive");
      if (j > 0 && p[j] > p[j - 1]) throw DomainError("scaling sequence: p must be decreasing");
    }
    if (std::abs(neumaier(p) - 1.0) > kMassTolerance) throw DomainError("scaling sequence: p does not sum to 1");
  }
}

ConcatResult concat_with_map(const ConcatInput& in) {
  in.xi.validate();
  if (!(in.beta > 0.0 && in.beta <= 1.0)) throw DomainError("concat: beta must lie in (0,1]");
  const std::size_t atoms = in.xi.size();
  bool all_mass = true;
  for (std::size_t i = 0; i < atoms; ++i) {
    if (in.xi.atom(i) <= 0.0) continue;
    if (i >= in.trees.size()) throw DomainError("concat: no tree for atom " + std::to_string(i));
    if (!in.trees[i].marked()) throw DomainError("concat: tree " + std::to_string(i) + " has no marked point");
    all_mass = all_mass && in.trees[i].has_mass();
  }

  ConcatResult out;
  out.image.resize(std::min(atoms, in.trees.size()));
  TreeBuilder b;
  std::vector<double> mass;
  double mass_total = 0.0;
  auto add = [&](NodeId parent, double len, bool junction) {
    mass.push_back(0.0);
    return b.add_node(parent, len, junction);
  };

  auto copy_tree = [&](std::size_t i, NodeId attach_root_to) {
    const MetricTree& t = in.trees[i];
    const double a = in.xi.atom(i);
    const double s = std::pow(a, in.beta);
    auto& img = out.image[i];
    img.assign(t.size(), kNoNode);
    for (NodeId v : t.preorder()) {
      if (v == t.root()) {
        img[v] = attach_root_to == kNoNode ? add(kNoNode, 0.0, false) : attach_root_to;
        continue;
      }
      img[v] = add(img[t.parent(v)], s * t.edge_len(v), t.junction(v));
    }
    if (all_mass) {
      for (std::size_t v = 0; v < t.size(); ++v) mass[img[v]] += a * t.mass(static_cast<NodeId>(v));
      mass_total += a * t.mass_total();
    }
  };

  NodeId root;
  if (in.xi.atom(0) > 0.0) {
    copy_tree(0, kNoNode);
    root = out.image[0][in.trees[0].root()];
    out.junction = out.image[0][*in.trees[0].marked()];
  } else {
    root = add(kNoNode, 0.0, false);
    out.junction = root;
  }
  b.set_junction(out.junction);
  for (std::size_t i = 1; i < atoms; ++i)
    if (in.xi.atom(i) > 0.0) copy_tree(i, out.junction);
  for (std::size_t i = 0; i < out.image.size(); ++i)
    if (in.xi.atom(i) <= 0.0) out.image[i].assign(in.trees[i].size(), out.junction);

  b.set_root(root);
  if (in.xi.atom(1) > 0.0)
    b.set_marked(out.image[1][*in.trees[1].marked()]);
  else
    b.set_marked(out.junction);
  if (all_mass) {
    for (std::size_t v = 0; v < mass.size(); ++v) b.set_mass(static_cast<NodeId>(v), mass[v]);
    b.set_mass_total(mass_total);
  }
  out.tree = std::move(b).build();
  return out;
}

MetricTree concat(const ConcatInput& input) { return concat_with_map(input).tree; }

double concat_formula_distance(const ConcatInput& in, std::size_t i, NodeId u, std::size_t j, NodeId v) {
  const double si = scale_of(in.xi.atom(i), in.beta);
  const double sj = scale_of(in.xi.atom(j), in.beta);
  const MetricTree& ti = in.trees[i];
  const MetricTree& tj = in.trees[j];
  if (i == j) return si * dist(ti, u, v);
  if (i == 0) return si * dist(ti, u, *ti.marked()) + sj * dist(tj, tj.root(), v);
  if (j == 0) return sj * dist(tj, v, *tj.marked()) + si * dist(ti, ti.root(), u);
  return si * dist(ti, u, ti.root()) + sj * dist(tj, tj.root(), v);
}

std::array<double, 4> stable_dirichlet_part(double alpha, CounterRng& rng) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("stable_xi: alpha must lie in (1,2]");
  const double beta = 1.0 - 1.0 / alpha;
  if (alpha == 2.0) {
    const double params[3] = {0.5, 0.5, 0.5};
    const auto d = dirichlet_sample(params, rng);
    return {d[0], d[1], d[2], 0.0};
  }
  const double params[4] = {beta, beta, beta, 1.0 - 2.0 * beta};
  const auto d = dirichlet_sample(params, rng);
  return {d[0], d[1], d[2], d[3]};
}

StickSeq stable_pd_part(double alpha, double eps, CounterRng& rng, std::size_t max_atoms) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("stable_xi: alpha must lie in (1,2]");
  if (alpha == 2.0) return {};
  const double beta = 1.0 - 1.0 / alpha;
  return gem_sample(1.0 - beta, 1.0 - 2.0 * beta, eps, rng, max_atoms);
}

ScalingSeq stable_xi(double alpha, double eps, CounterRng& rng, std::size_t max_atoms) {
  ScalingSeq xi;
  xi.x = stable_dirichlet_part(alpha, rng);
  if (alpha < 2.0) {
    StickSeq pd = stable_pd_part(alpha, eps, rng, max_atoms);
    xi.p = std::move(pd.weights);
    xi.residual = pd.residual;
  }
  return xi;
}

DBetaResult d_beta(const ConcatInput& k1, const ConcatInput& k2, std::size_t max_nodes, Exec exec) {
  if (k1.beta != k2.beta) throw DomainError("d_beta: inputs use different beta");
  const double beta = k1.beta;
  const MetricTree point;
  auto tree_at = [&](const ConcatInput& k, std::size_t i) -> const MetricTree& {
    return k.xi.atom(i) > 0.0 && i < k.trees.size() ? k.trees[i] : point;
  };
  auto scaled = [&](const MetricTree& t, double atom) {
    return atom > 0.0 && t.size() > 1 ? scale_distances(t, std::pow(atom, beta)) : (atom > 0.0 ? t : point);
  };
  DBetaResult r;
  const std::size_t coords = std::max(k1.xi.size(), k2.xi.size());
  for (std::size_t i = 0; i < coords; ++i) {
    const double a = k1.xi.atom(i), b = k2.xi.atom(i);
    const MetricTree& t1 = tree_at(k1, i);
    const MetricTree& t2 = tree_at(k2, i);
    double term = std::abs(scale_of(a, beta) - scale_of(b, beta));
    term = std::max(term, gh_dist(t1, t2, true, max_nodes, exec));
    term = std::max(term, gh_dist(scaled(t1, a), scaled(t2, b), true, max_nodes, exec));
    r.value = std::max(r.value, term);
  }
  const double tail = std::max(k1.xi.x[3] * k1.xi.residual, k2.xi.x[3] * k2.xi.residual);
  r.tail_bound = scale_of(tail, beta);
  return r;
}

}  // namespace srt
