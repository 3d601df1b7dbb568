#include "srt/metric_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srt/errors.hpp"

namespace srt {

namespace {

// Neumaier summation; masses over ~1e6 leaves must still sum to 1 at 1e-12.
double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

NodeId TreeBuilder::add_node(NodeId parent, double edge_len, bool junction) {
  parent_.push_back(parent);
  edge_len_.push_back(edge_len);
  junction_.push_back(junction ? 1 : 0);
  if (has_mass_) mass_.push_back(0.0);
  return static_cast<NodeId>(parent_.size() - 1);
}

void TreeBuilder::set_parent(NodeId v, NodeId parent, double edge_len) {
  if (v < 0 || static_cast<std::size_t>(v) >= parent_.size())
    throw DomainError("set_parent: node " + std::to_string(v) + " out of range");
  parent_[v] = parent;
  edge_len_[v] = edge_len;
}

void TreeBuilder::set_junction(NodeId v, bool junction) {
  if (v < 0 || static_cast<std::size_t>(v) >= parent_.size())
    throw DomainError("set_junction: node " + std::to_string(v) + " out of range");
  junction_[v] = junction ? 1 : 0;
}

void TreeBuilder::set_mass(NodeId v, double mass) {
  if (v < 0 || static_cast<std::size_t>(v) >= parent_.size())
    throw DomainError("set_mass: node " + std::to_string(v) + " out of range");
  if (!has_mass_) {
    mass_.assign(parent_.size(), 0.0);
    has_mass_ = true;
  }
  mass_[v] = mass;
}

MetricTree TreeBuilder::build() && {
  const auto n = parent_.size();
  if (n == 0) throw DomainError("tree has no nodes");
  if (root_ < 0 || static_cast<std::size_t>(root_) >= n)
    throw DomainError("root " + std::to_string(root_) + " out of range");
  if (parent_[root_] != kNoNode) throw DomainError("root has a parent");
  if (edge_len_[root_] != 0.0) throw DomainError("root edge length must be 0");
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<NodeId>(v) == root_) continue;
    const NodeId p = parent_[v];
    if (p < 0 || static_cast<std::size_t>(p) >= n || p == static_cast<NodeId>(v))
      throw DomainError("node " + std::to_string(v) + " has invalid parent");
    const double len = edge_len_[v];
    if (!std::isfinite(len) || len < 0.0)
      throw DomainError("node " + std::to_string(v) + " has negative or non-finite edge length");
    if (len == 0.0 && !junction_[v])
      throw DomainError("node " + std::to_string(v) + " has zero edge length without junction flag");
  }
  if (marked_ && (*marked_ < 0 || static_cast<std::size_t>(*marked_) >= n))
    throw DomainError("marked node out of range");
  for (const auto& [id, _] : labels_)
    if (id < 0 || static_cast<std::size_t>(id) >= n)
      throw DomainError("label on node " + std::to_string(id) + " out of range");

  MetricTree t;
  t.parent_ = std::move(parent_);
  t.edge_len_ = std::move(edge_len_);
  t.junction_ = std::move(junction_);
  t.root_ = root_;
  t.marked_ = marked_;
  t.labels_ = std::move(labels_);
  t.mass_total_ = mass_total_;
  t.finalize();

  if (has_mass_) {
    if (!(mass_total_ > 0.0) || !std::isfinite(mass_total_))
      throw DomainError("mass total must be positive");
    for (std::size_t v = 0; v < n; ++v) {
      const double m = mass_[v];
      if (!std::isfinite(m) || m < 0.0)
        throw DomainError("node " + std::to_string(v) + " has negative mass");
      if (m > 0.0 && n > 1 && !t.is_leaf(static_cast<NodeId>(v)) && !t.junction_[v])
        throw DomainError("mass on node " + std::to_string(v) + " which is neither a leaf nor a junction");
    }
    const double sum = compensated_sum(mass_);
    if (std::abs(sum - mass_total_) > kMassTolerance * std::max(1.0, mass_total_))
      throw DomainError("leaf masses sum to " + std::to_string(sum) + ", expected " +
                        std::to_string(mass_total_));
    t.mass_ = std::move(mass_);
  }
  return t;
}

MetricTree::MetricTree() : parent_{kNoNode}, edge_len_{0.0}, junction_{0}, root_(0), marked_(0) {
  finalize();
}

MetricTree MetricTree::segment(double length, bool with_mass) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw DomainError("segment length must be positive");
  TreeBuilder b;
  b.add_node(kNoNode, 0.0);
  const NodeId tip = b.add_node(0, length);
  b.set_root(0);
  b.set_marked(tip);
  if (with_mass) b.set_mass(tip, 1.0);
  return std::move(b).build();
}

NodeId MetricTree::check(NodeId v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= parent_.size())
    throw DomainError("node " + std::to_string(v) + " out of range");
  return v;
}

void MetricTree::finalize() {
  const auto n = parent_.size();
  child_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (parent_[v] != kNoNode) ++child_offset_[parent_[v] + 1];
  for (std::size_t v = 0; v < n; ++v) child_offset_[v + 1] += child_offset_[v];
  child_list_.assign(n == 0 ? 0 : n - 1, kNoNode);
  std::vector<std::int32_t> fill(child_offset_.begin(), child_offset_.end() - 1);
  for (std::size_t v = 0; v < n; ++v)
    if (parent_[v] != kNoNode) child_list_[fill[parent_[v]]++] = static_cast<NodeId>(v);

  order_.clear();
  order_.reserve(n);
  root_dist_.assign(n, 0.0);
  hops_.assign(n, 0);
  order_.push_back(root_);
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const NodeId v = order_[head];
    for (auto i = child_offset_[v]; i < child_offset_[v + 1]; ++i) {
      const NodeId c = child_list_[i];
      root_dist_[c] = root_dist_[v] + edge_len_[c];
      hops_[c] = hops_[v] + 1;
      order_.push_back(c);
    }
  }
  if (order_.size() != n) throw DomainError("parent pointers do not form a single tree");
}

std::int32_t MetricTree::degree(NodeId v) const {
  check(v);
  return (child_offset_[v + 1] - child_offset_[v]) + (v == root_ ? 0 : 1);
}

std::span<const NodeId> MetricTree::children(NodeId v) const {
  check(v);
  return std::span<const NodeId>(child_list_).subspan(
      child_offset_[v], child_offset_[v + 1] - child_offset_[v]);
}

std::optional<std::string> MetricTree::label(NodeId v) const {
  auto it = labels_.find(check(v));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> MetricTree::leaves() const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (is_leaf(static_cast<NodeId>(v))) out.push_back(static_cast<NodeId>(v));
  return out;
}

NodeId MetricTree::lca(NodeId u, NodeId v) const {
  check(u);
  check(v);
  while (hops_[u] > hops_[v]) u = parent_[u];
  while (hops_[v] > hops_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

TreeBuilder MetricTree::to_builder() const {
  TreeBuilder b;
  b.parent_ = parent_;
  b.edge_len_ = edge_len_;
  b.junction_ = junction_;
  b.root_ = root_;
  b.marked_ = marked_;
  b.mass_ = mass_;
  b.has_mass_ = !mass_.empty();
  b.mass_total_ = mass_total_;
  b.labels_ = labels_;
  return b;
}

double dist(const MetricTree& t, NodeId u, NodeId v) {
  if (u == v) {
    t.root_dist(u);
    return 0.0;
  }
  const NodeId w = t.lca(u, v);
  // Walk the path so the result is a plain sum of edge lengths.
  double a = 0.0;
  for (NodeId x = u; x != w; x = t.parent(x)) a += t.edge_len(x);
  double b = 0.0;
  for (NodeId x = v; x != w; x = t.parent(x)) b += t.edge_len(x);
  return a + b;
}

std::vector<double> distance_matrix(const MetricTree& t) {
  const auto n = t.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double x = dist(t, static_cast<NodeId>(u), static_cast<NodeId>(v));
      d[u * n + v] = x;
      d[v * n + u] = x;
    }
  return d;
}

ReducedTree reduce_with_map(const MetricTree& t, std::span<const NodeId> pts) {
  if (pts.empty()) throw DomainError("reduce: empty point set");
  const auto n = t.size();
  std::vector<char> spanned(n, 0), wanted(n, 0);
  spanned[t.root()] = 1;
  for (NodeId p : pts) {
    if (p < 0 || static_cast<std::size_t>(p) >= n)
      throw DomainError("reduce: node " + std::to_string(p) + " out of range");
    wanted[p] = 1;
    for (NodeId x = p; x != kNoNode && !spanned[x]; x = t.parent(x)) spanned[x] = 1;
  }
  const auto marked = t.marked();
  if (marked && spanned[*marked]) wanted[*marked] = 1;

  std::vector<std::int32_t> spanned_children(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (spanned[v] && static_cast<NodeId>(v) != t.root()) ++spanned_children[t.parent(static_cast<NodeId>(v))];

  ReducedTree out;
  out.new_id.assign(n, kNoNode);
  TreeBuilder b;
  for (NodeId v : t.preorder()) {
    if (!spanned[v]) continue;
    const bool keep = v == t.root() || wanted[v] || spanned_children[v] != 1;
    if (!keep) continue;
    if (v == t.root()) {
      out.new_id[v] = b.add_node(kNoNode, 0.0);
      continue;
    }
    double len = 0.0;
    NodeId x = v;
    for (; out.new_id[t.parent(x)] == kNoNode; x = t.parent(x)) len += t.edge_len(x);
    len += t.edge_len(x);
    const NodeId up = out.new_id[t.parent(x)];
    out.new_id[v] = b.add_node(up, len, t.junction(v) || len == 0.0);
  }
  b.set_root(out.new_id[t.root()]);
  b.set_marked(marked && spanned[*marked] ? std::optional<NodeId>(out.new_id[*marked]) : std::nullopt);
  for (const auto& [id, text] : t.labels())
    if (out.new_id[id] != kNoNode) b.set_label(out.new_id[id], text);
  out.tree = std::move(b).build();
  return out;
}

MetricTree reduce(const MetricTree& t, std::span<const NodeId> pts) {
  return reduce_with_map(t, pts).tree;
}

TreeStats stats(const MetricTree& t) {
  TreeStats s;
  std::vector<double> lens;
  lens.reserve(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    s.height = std::max(s.height, t.root_dist(id));
    if (t.is_leaf(id)) ++s.n_leaves;
    lens.push_back(t.edge_len(id));
  }
  s.total_length = compensated_sum(lens);
  if (t.marked()) s.spine_len = t.root_dist(*t.marked());
  return s;
}

MetricTree rescale(const MetricTree& t, double mass_factor, double beta, MassScaling mode) {
  if (!(mass_factor > 0.0) || !std::isfinite(mass_factor))
    throw DomainError("rescale: mass factor must be positive");
  const double c = std::pow(mass_factor, beta);
  TreeBuilder b = t.to_builder();
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    if (id != t.root()) b.set_parent(id, t.parent(id), t.edge_len(id) * c);
  }
  if (t.has_mass() && mode == MassScaling::kScale) {
    for (std::size_t v = 0; v < t.size(); ++v) b.set_mass(static_cast<NodeId>(v), t.mass(static_cast<NodeId>(v)) * mass_factor);
    b.set_mass_total(t.mass_total() * mass_factor);
  }
  return std::move(b).build();
}

MetricTree scale_distances(const MetricTree& t, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw DomainError("scale_distances: factor must be positive");
  TreeBuilder b = t.to_builder();
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    if (id != t.root()) b.set_parent(id, t.parent(id), t.edge_len(id) * factor);
  }
  return std::move(b).build();
}

LeafSampler::LeafSampler(const MetricTree& t) {
  double acc = 0.0;
  if (t.has_mass()) {
    for (std::size_t v = 0; v < t.size(); ++v) {
      const double m = t.mass(static_cast<NodeId>(v));
      if (m <= 0.0) continue;
      acc += m;
      nodes_.push_back(static_cast<NodeId>(v));
      cumulative_.push_back(acc);
    }
  } else {
    for (NodeId v : t.leaves()) {
      acc += 1.0;
      nodes_.push_back(v);
      cumulative_.push_back(acc);
    }
  }
  if (nodes_.empty()) throw DomainError("sample_leaf: tree has no leaves");
}

NodeId LeafSampler::operator()(CounterRng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return nodes_[static_cast<std::size_t>(it - cumulative_.begin())];
}

NodeId sample_leaf(const MetricTree& t, CounterRng& rng) { return LeafSampler(t)(rng); }

}  // namespace srt
