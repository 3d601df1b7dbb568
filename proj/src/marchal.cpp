#include "srt/marchal.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "srt/errors.hpp"
#include "srt/random_laws.hpp"

namespace srt {

namespace {

constexpr double kWeightTolerance = 1e-9;

void check_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw DomainError("alpha must lie in (1,2], got " + std::to_string(alpha));
}

std::int32_t add_node(DiscreteTree& t, std::int32_t parent, std::int32_t degree, std::int32_t leaf,
                      std::int32_t branch) {
  t.parent.push_back(parent);
  t.degree.push_back(degree);
  t.leaf_label.push_back(leaf);
  t.branch_label.push_back(branch);
  return static_cast<std::int32_t>(t.parent.size() - 1);
}

std::vector<std::vector<std::int32_t>> adjacency(const DiscreteTree& t) {
  std::vector<std::vector<std::int32_t>> adj(t.size());
  for (std::size_t v = 0; v < t.size(); ++v)
    if (t.parent[v] >= 0) {
      adj[v].push_back(t.parent[v]);
      adj[t.parent[v]].push_back(static_cast<std::int32_t>(v));
    }
  return adj;
}

}  // namespace

std::int32_t DiscreteTree::hops_to_root(std::int32_t v) const {
  std::int32_t h = 0;
  for (; parent[v] >= 0; v = parent[v]) ++h;
  return h;
}

std::string DiscreteTree::node_name(std::int32_t v) const {
  if (leaf_label[v] >= 0) return "A" + std::to_string(leaf_label[v]);
  if (branch_label[v] >= 0) return "V" + std::to_string(branch_label[v]);
  return "B" + std::to_string(v);
}

void grow_step(DiscreteTree& t, CounterRng& rng) {
  const double alpha = t.alpha;
  const auto step = static_cast<std::int32_t>(t.n_leaves() + 1);
  const double edges = static_cast<double>(t.size() - 1);
  const double w_edges = edges * (alpha - 1.0);
  const double w_branch = static_cast<double>(t.branch_nodes.size()) * (2.0 - alpha);
  const double total = w_edges + w_branch + static_cast<double>(t.extra_slots.size());
  const double expected = static_cast<double>(step - 1) * alpha - 1.0;
  const double err = std::abs(total - expected) / expected;
  t.max_weight_error = std::max(t.max_weight_error, err);
  if (err > kWeightTolerance)
    throw std::logic_error("Marchal weight invariant violated at step " + std::to_string(step));

  const double u = uniform01(rng) * total;
  std::int32_t attach;
  if (u < w_edges) {
    const auto e = static_cast<std::int32_t>(1 + uniform_index(rng, t.size() - 1));
    const std::int32_t b = add_node(t, t.parent[e], 3, -1, step);
    t.parent[e] = b;
    t.branch_nodes.push_back(b);
    attach = b;
  } else {
    if (u < w_edges + w_branch || t.extra_slots.empty())
      attach = t.branch_nodes[uniform_index(rng, t.branch_nodes.size())];
    else
      attach = t.extra_slots[uniform_index(rng, t.extra_slots.size())];
    ++t.degree[attach];
    t.extra_slots.push_back(attach);
  }
  t.leaf_node.push_back(add_node(t, attach, 1, step, -1));
}

DiscreteTree grow(double alpha, std::int64_t n, CounterRng& rng) {
  check_alpha(alpha);
  if (n < 1) throw DomainError("grow: n must be at least 1");
  DiscreteTree t;
  t.alpha = alpha;
  const auto cap = static_cast<std::size_t>(2 * n + 1);
  t.parent.reserve(cap);
  t.degree.reserve(cap);
  t.leaf_label.reserve(cap);
  t.branch_label.reserve(cap);
  t.leaf_node.reserve(static_cast<std::size_t>(n + 1));
  t.leaf_node.push_back(add_node(t, -1, 1, 0, -1));
  t.leaf_node.push_back(add_node(t, 0, 1, 1, -1));
  while (t.n_leaves() < n) grow_step(t, rng);
  return t;
}

double weight(const DiscreteTree& t, double alpha) {
  double w = static_cast<double>(t.size() - 1) * (alpha - 1.0);
  for (std::size_t v = 0; v < t.size(); ++v)
    if (t.is_branch(static_cast<std::int32_t>(v))) w += t.degree[v] - 1.0 - alpha;
  return w;
}

double shape_prob(const DiscreteTree& t, double alpha) {
  check_alpha(alpha);
  double p = 1.0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const int d = t.degree[v];
    if (d == 2) return 0.0;
    for (int i = 1; i <= d - 2; ++i) p *= std::abs(alpha - i);
  }
  for (std::int64_t i = 1; i <= t.n_leaves() - 1; ++i) p /= static_cast<double>(i) * alpha - 1.0;
  return p;
}

namespace {

using Mask = std::uint64_t;

// All ways to split mask into at least two nonempty blocks.
void set_partitions(Mask mask, std::vector<Mask>& blocks, std::vector<std::vector<Mask>>& out) {
  if (mask == 0) {
    if (blocks.size() >= 2) out.push_back(blocks);
    return;
  }
  const Mask low = mask & (~mask + 1);
  const Mask rest = mask ^ low;
  // Enumerate subsets of rest to join the lowest element.
  for (Mask sub = rest;; sub = (sub - 1) & rest) {
    blocks.push_back(low | sub);
    set_partitions(rest ^ sub, blocks, out);
    blocks.pop_back();
    if (sub == 0) break;
  }
}

// Cluster families (clusters of size >= 2) of all hierarchies on mask.
std::vector<std::vector<Mask>> hierarchies(Mask mask) {
  if (std::popcount(mask) == 1) return {{}};
  std::vector<std::vector<Mask>> parts;
  std::vector<Mask> scratch;
  set_partitions(mask, scratch, parts);
  std::vector<std::vector<Mask>> out;
  for (const auto& blocks : parts) {
    std::vector<std::vector<Mask>> acc{{mask}};
    for (Mask b : blocks) {
      const auto sub = hierarchies(b);
      std::vector<std::vector<Mask>> next;
      for (const auto& a : acc)
        for (const auto& s : sub) {
          auto merged = a;
          merged.insert(merged.end(), s.begin(), s.end());
          next.push_back(std::move(merged));
        }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

}  // namespace

std::vector<DiscreteTree> enumerate_shapes(int n) {
  if (n < 1 || n > 10) throw DomainError("enumerate_shapes: n must lie in [1,10]");
  const Mask full = (Mask{1} << n) - 1;
  std::vector<DiscreteTree> out;
  for (auto clusters : hierarchies(full)) {
    std::sort(clusters.begin(), clusters.end(),
              [](Mask a, Mask b) { return std::popcount(a) > std::popcount(b); });
    DiscreteTree t;
    t.leaf_node.assign(static_cast<std::size_t>(n + 1), -1);
    t.leaf_node[0] = add_node(t, -1, 1, 0, -1);
    std::vector<std::int32_t> cluster_node;
    auto smallest_container = [&](Mask m, std::size_t limit) {
      std::int32_t best = t.leaf_node[0];
      for (std::size_t c = 0; c < limit; ++c)
        if ((clusters[c] & m) == m && clusters[c] != m) best = cluster_node[c];
      return best;
    };
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const std::int32_t p = smallest_container(clusters[c], c);
      cluster_node.push_back(add_node(t, p, 1, -1, -1));
      ++t.degree[p];
    }
    for (int i = 1; i <= n; ++i) {
      const std::int32_t p = smallest_container(Mask{1} << (i - 1), clusters.size());
      t.leaf_node[i] = add_node(t, p, 1, i, -1);
      ++t.degree[p];
    }
    t.degree[0] = 1;
    for (std::size_t v = 0; v < t.size(); ++v) {
      if (!t.is_branch(static_cast<std::int32_t>(v))) continue;
      t.branch_nodes.push_back(static_cast<std::int32_t>(v));
      for (int extra = 3; extra < t.degree[v]; ++extra) t.extra_slots.push_back(static_cast<std::int32_t>(v));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::uint64_t> shape_key(const DiscreteTree& t) {
  if (t.n_leaves() > 63) throw DomainError("shape_key: at most 63 leaves");
  std::vector<Mask> below(t.size(), 0);
  for (std::int64_t i = 1; i <= t.n_leaves(); ++i)
    for (std::int32_t v = t.leaf_node[i]; v >= 0; v = t.parent[v]) below[v] |= Mask{1} << (i - 1);
  std::vector<std::uint64_t> key;
  for (std::size_t v = 0; v < t.size(); ++v)
    if (t.is_branch(static_cast<std::int32_t>(v))) key.push_back(below[v]);
  std::sort(key.begin(), key.end());
  return key;
}

MetricTree to_metric(const DiscreteTree& t, double alpha) {
  check_alpha(alpha);
  const auto n = static_cast<double>(t.n_leaves());
  const double beta = 1.0 - 1.0 / alpha;
  const double len = 1.0 / (alpha * std::pow(n, beta));
  TreeBuilder b;
  for (std::size_t v = 0; v < t.size(); ++v) b.add_node(t.parent[v], t.parent[v] < 0 ? 0.0 : len);
  b.set_root(t.leaf_node[0]);
  b.set_marked(t.leaf_node[1]);
  for (std::int64_t i = 1; i <= t.n_leaves(); ++i) b.set_mass(t.leaf_node[i], 1.0 / n);
  for (std::size_t v = 0; v < t.size(); ++v) b.set_label(static_cast<NodeId>(v), t.node_name(static_cast<std::int32_t>(v)));
  return std::move(b).build();
}

std::vector<double> Decomposition::fractions() const {
  return {parts[0].weight / total_weight, parts[1].weight / total_weight, parts[2].weight / total_weight,
          rest_weight / total_weight};
}

Decomposition decompose_at_v2(const DiscreteTree& t) {
  const double alpha = t.alpha;
  Decomposition d;
  for (std::size_t v = 0; v < t.size(); ++v)
    if (t.branch_label[v] == 2) d.v2 = static_cast<std::int32_t>(v);
  if (d.v2 < 0) throw DomainError("decompose_at_v2: tree has no vertex V2");

  const auto adj = adjacency(t);
  std::vector<char> seen(t.size(), 0);
  seen[d.v2] = 1;
  for (std::int32_t start : adj[d.v2]) {
    Component c;
    c.least_leaf = std::numeric_limits<std::int32_t>::max();
    std::vector<std::int32_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const std::int32_t v = stack.back();
      stack.pop_back();
      c.nodes.push_back(v);
      if (t.leaf_label[v] >= 0) {
        ++c.leaves;
        c.least_leaf = std::min(c.least_leaf, t.leaf_label[v]);
      } else {
        c.weight += t.degree[v] - 1.0 - alpha;
      }
      for (std::int32_t w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    // One edge per component node: its edge towards V2.
    c.weight += static_cast<double>(c.nodes.size()) * (alpha - 1.0);
    const double expected = alpha * static_cast<double>(c.leaves) - 1.0;
    if (std::abs(c.weight - expected) > kWeightTolerance * std::max(1.0, expected))
      throw std::logic_error("component weight differs from alpha N - 1");
    d.parts.push_back(std::move(c));
  }
  std::sort(d.parts.begin(), d.parts.end(),
            [](const Component& a, const Component& b) { return a.least_leaf < b.least_leaf; });
  d.k = static_cast<std::int64_t>(d.parts.size()) - 3;
  if (alpha == 2.0 && d.k != 0) throw std::logic_error("binary growth produced extra components at V2");
  d.total_weight = weight(t, alpha);
  d.v2_weight = t.degree[d.v2] - 1.0 - alpha;
  d.rest_weight = d.v2_weight;
  for (std::size_t j = 3; j < d.parts.size(); ++j) {
    d.rest_weight += d.parts[j].weight;
    d.rest_leaves += d.parts[j].leaves;
  }
  const double expected = alpha * static_cast<double>(d.rest_leaves) + 2.0 - alpha;
  if (std::abs(d.rest_weight - expected) > kWeightTolerance * std::max(1.0, expected))
    throw std::logic_error("weight of the extra components and V2 differs from alpha N + 2 - alpha");
  return d;
}

std::vector<double> spine_scaling_samples(double alpha, std::int64_t n, std::int64_t reps, StreamKey key,
                                          Exec exec) {
  check_alpha(alpha);
  if (reps < 1) throw DomainError("spine_scaling_samples: reps must be positive");
  const double beta = 1.0 - 1.0 / alpha;
  const double scale = std::pow(static_cast<double>(n), -beta);
  std::vector<double> out(static_cast<std::size_t>(reps));
  for_each_index(out.size(), exec, [&](std::size_t r) {
    CounterRng rng = key.child(r).stream();
    const DiscreteTree t = grow(alpha, n, rng);
    out[r] = t.hops_to_root(t.leaf_node[1]) * scale;
  });
  return out;
}

StatReport spine_scaling_stat(double alpha, std::int64_t n, std::int64_t reps, std::uint64_t seed, Exec exec) {
  const auto start = std::chrono::steady_clock::now();
  const double beta = 1.0 - 1.0 / alpha;
  const auto xs = spine_scaling_samples(alpha, n, reps, StreamKey{seed}, exec);
  StatReport r;
  r.name = "marchal_spine";
  r.seed = seed;
  const auto m1 = moment_test(xs, 1.0, ml_moment(beta, beta, 1.0), Rule::relative(0.05), "mean_scaled_spine");
  r.compare(m1.estimate, {"ml_moment_1", ml_moment(beta, beta, 1.0), Provenance::kDerived}, Rule::relative(0.05));
  const auto m2 = moment_test(xs, 2.0, ml_moment(beta, beta, 2.0), Rule::relative(0.10), "second_moment_scaled_spine");
  r.compare(m2.estimate, {"ml_moment_2", ml_moment(beta, beta, 2.0), Provenance::kDerived}, Rule::relative(0.10));
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace srt
