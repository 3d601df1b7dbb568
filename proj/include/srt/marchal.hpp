#pragma once

// Marchal's growth algorithm for leaf-labelled trees with parameter alpha in
// (1,2]: each edge carries weight alpha - 1, each branch point of degree d
// carries d - 1 - alpha, and a new leaf attaches to an edge (splitting it) or a
// branch point chosen proportionally to weight.

#include <cstdint>
#include <string>
#include <vector>

#include "srt/exec.hpp"
#include "srt/metric_tree.hpp"
#include "srt/rng.hpp"
#include "srt/stats.hpp"

namespace srt {

// Node 0 is the root A0. Leaf A_i and branch point V_i are both created at
// step i (V_i only when a leaf splits an edge).
struct DiscreteTree {
  double alpha = 2.0;
  std::vector<std::int32_t> parent;        // -1 for the root
  std::vector<std::int32_t> degree;
  std::vector<std::int32_t> leaf_label;    // i for A_i, -1 for branch points
  std::vector<std::int32_t> branch_label;  // k for V_k, -1 otherwise
  std::vector<std::int32_t> leaf_node;     // A_i -> node id
  double max_weight_error = 0.0;           // worst relative deviation from n alpha - 1

  // Selection index: branch points get weight 2 - alpha each through a uniform
  // pick from branch_nodes, and the remaining d - 3 through extra_slots, which
  // lists a branch point once per leaf attached to it directly.
  std::vector<std::int32_t> branch_nodes;
  std::vector<std::int32_t> extra_slots;

  std::int64_t n_leaves() const { return static_cast<std::int64_t>(leaf_node.size()) - 1; }
  std::size_t size() const { return parent.size(); }
  bool is_branch(std::int32_t v) const { return leaf_label[v] < 0; }
  std::int32_t hops_to_root(std::int32_t v) const;
  std::string node_name(std::int32_t v) const;
};

DiscreteTree grow(double alpha, std::int64_t n, CounterRng& rng);

// Continues an existing growth by one leaf.
void grow_step(DiscreteTree& t, CounterRng& rng);

// Sum of edge and branch point weights; equals n alpha - 1 for a grown tree.
double weight(const DiscreteTree& t, double alpha);

// Probability that Marchal's algorithm produces this leaf-labelled shape.
double shape_prob(const DiscreteTree& t, double alpha);

// Every leaf-labelled rooted shape with n leaves and no degree-2 vertices.
std::vector<DiscreteTree> enumerate_shapes(int n);

// Canonical key: sorted leaf-label bitmasks of the branch points (n <= 63).
std::vector<std::uint64_t> shape_key(const DiscreteTree& t);

// Unit edges scaled by 1/(alpha n^beta), masses 1/n on A1..An, marked A1.
MetricTree to_metric(const DiscreteTree& t, double alpha);

struct Component {
  std::vector<std::int32_t> nodes;
  std::int64_t leaves = 0;  // leaves of the component, V2 excluded
  std::int32_t least_leaf = 0;
  double weight = 0.0;
};

// Components of the tree cut at V2: tau_0 holds A0, tau_1 holds A1, tau_2
// holds A2, and the remaining ones follow in order of least leaf label.
struct Decomposition {
  std::int32_t v2 = -1;
  std::vector<Component> parts;
  std::int64_t k = 0;             // number of components beyond the first three
  double total_weight = 0.0;      // n alpha - 1
  double v2_weight = 0.0;         // 2 + k - alpha
  double rest_weight = 0.0;       // weight of the extra components plus V2
  std::int64_t rest_leaves = 0;

  // Weight fractions (X0, X1, X2, X3).
  std::vector<double> fractions() const;
};

Decomposition decompose_at_v2(const DiscreteTree& t);

// Graph distance A0 -> A1 after n leaves, divided by n^beta; replicate r uses
// the stream key.child(r).
std::vector<double> spine_scaling_samples(double alpha, std::int64_t n, std::int64_t reps,
                                          StreamKey key, Exec exec = Exec::kParallel);

// Empirical first two moments of the rescaled spine against ML(beta, beta)
// moments (relative 5% for p = 1, 10% for p = 2).
StatReport spine_scaling_stat(double alpha, std::int64_t n, std::int64_t reps, std::uint64_t seed,
                              Exec exec = Exec::kParallel);

}  // namespace srt
