#pragma once

// Finite rooted metric trees with an optional marked vertex and an optional
// atomic mass measure. A MetricTree is immutable once built; all operations
// return new values.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srt/rng.hpp"

namespace srt {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TreeStats {
  double height = 0.0;
  double spine_len = 0.0;
  std::int64_t n_leaves = 0;
  double total_length = 0.0;
};

class MetricTree;

// Accumulates nodes in any order; build() validates and freezes.
class TreeBuilder {
 public:
  NodeId add_node(NodeId parent, double edge_len, bool junction = false);
  void set_parent(NodeId v, NodeId parent, double edge_len);
  void set_junction(NodeId v, bool junction = true);
  void set_root(NodeId r) { root_ = r; }
  void set_marked(std::optional<NodeId> m) { marked_ = m; }
  void set_mass(NodeId v, double mass);
  void set_mass_total(double total) { mass_total_ = total; }
  void set_label(NodeId v, std::string label) { labels_[v] = std::move(label); }
  std::size_t size() const { return parent_.size(); }

  MetricTree build() &&;

 private:
  friend class MetricTree;
  std::vector<NodeId> parent_;
  std::vector<double> edge_len_;
  std::vector<char> junction_;
  NodeId root_ = 0;
  std::optional<NodeId> marked_;
  std::vector<double> mass_;
  bool has_mass_ = false;
  double mass_total_ = 1.0;
  std::map<NodeId, std::string> labels_;
};

class MetricTree {
 public:
  // One-point tree: root only, marked at the root.
  MetricTree();

  static MetricTree segment(double length, bool with_mass = false);

  std::size_t size() const { return parent_.size(); }
  NodeId root() const { return root_; }
  std::optional<NodeId> marked() const { return marked_; }
  NodeId parent(NodeId v) const { return parent_[check(v)]; }
  double edge_len(NodeId v) const { return edge_len_[check(v)]; }
  bool junction(NodeId v) const { return junction_[check(v)] != 0; }
  std::int32_t degree(NodeId v) const;
  std::span<const NodeId> children(NodeId v) const;
  bool is_leaf(NodeId v) const { return v != root_ && degree(v) == 1; }
  double root_dist(NodeId v) const { return root_dist_[check(v)]; }
  std::int32_t hops(NodeId v) const { return hops_[check(v)]; }

  bool has_mass() const { return !mass_.empty(); }
  double mass(NodeId v) const { return mass_.empty() ? 0.0 : mass_[check(v)]; }
  std::span<const double> masses() const { return mass_; }
  double mass_total() const { return mass_total_; }

  const std::map<NodeId, std::string>& labels() const { return labels_; }
  std::optional<std::string> label(NodeId v) const;

  // Nodes in breadth-first order from the root (parents before children).
  std::span<const NodeId> preorder() const { return order_; }
  std::vector<NodeId> leaves() const;

  NodeId lca(NodeId u, NodeId v) const;

  // Copy with a different root-to-edge structure is not offered; use TreeBuilder.
  TreeBuilder to_builder() const;

 private:
  friend class TreeBuilder;
  NodeId check(NodeId v) const;
  void finalize();

  std::vector<NodeId> parent_;
  std::vector<double> edge_len_;
  std::vector<char> junction_;
  NodeId root_ = 0;
  std::optional<NodeId> marked_;
  std::vector<double> mass_;
  double mass_total_ = 1.0;
  std::map<NodeId, std::string> labels_;

  std::vector<double> root_dist_;
  std::vector<std::int32_t> hops_;
  std::vector<std::int32_t> child_offset_;
  std::vector<NodeId> child_list_;
  std::vector<NodeId> order_;
};

// Length of the unique u-v path.
double dist(const MetricTree& t, NodeId u, NodeId v);

// Full pairwise distance matrix, row-major.
std::vector<double> distance_matrix(const MetricTree& t);

struct ReducedTree {
  MetricTree tree;
  std::vector<NodeId> new_id;  // old id -> new id, or kNoNode if dropped
};

// Subtree spanned by pts and the root, degree-2 vertices suppressed. The marked
// vertex survives iff it lies in the spanned set. Masses are not carried over.
ReducedTree reduce_with_map(const MetricTree& t, std::span<const NodeId> pts);
MetricTree reduce(const MetricTree& t, std::span<const NodeId> pts);

TreeStats stats(const MetricTree& t);

enum class MassScaling { kScale, kKeepNormalized };

// Distances by mass_factor^beta; masses by mass_factor unless kept normalized.
MetricTree rescale(const MetricTree& t, double mass_factor, double beta,
                   MassScaling mode = MassScaling::kScale);

// Multiply all edge lengths by factor > 0, leaving masses alone.
MetricTree scale_distances(const MetricTree& t, double factor);

// Draws leaves proportional to mass, or uniformly over leaves when massless.
class LeafSampler {
 public:
  explicit LeafSampler(const MetricTree& t);
  NodeId operator()(CounterRng& rng) const;

 private:
  std::vector<NodeId> nodes_;
  std::vector<double> cumulative_;
};

NodeId sample_leaf(const MetricTree& t, CounterRng& rng);

// Relative tolerance used for the mass normalisation invariant.
inline constexpr double kMassTolerance = 1e-12;

}  // namespace srt
