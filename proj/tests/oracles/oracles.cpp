#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

using srt::MetricTree;
using srt::NodeId;

double ml_moment(double beta, double theta, double p) {
  using boost::math::tgamma;
  return tgamma(theta + 1.0) * tgamma(theta / beta + 1.0 + p) / (tgamma(theta / beta + 1.0) * tgamma(theta + beta * p + 1.0));
}

double dirichlet_moment(const std::vector<double>& params, const std::vector<double>& s) {
  using boost::math::tgamma;
  double a = 0.0, as = 0.0, r = 1.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double si = i < s.size() ? s[i] : 0.0;
    a += params[i];
    as += params[i] + si;
    r *= tgamma(params[i] + si) / tgamma(params[i]);
  }
  return r * tgamma(a) / tgamma(as);
}

double marchal_mean_hops(double alpha, std::int64_t n) {
  double d = 1.0;
  for (std::int64_t k = 1; k < n; ++k) d *= 1.0 + (alpha - 1.0) / (static_cast<double>(k) * alpha - 1.0);
  return d;
}

std::vector<double> floyd_distances(const MetricTree& t) {
  const std::size_t n = t.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n * n, inf);
  for (std::size_t v = 0; v < n; ++v) {
    d[v * n + v] = 0.0;
    const NodeId p = t.parent(static_cast<NodeId>(v));
    if (p >= 0) {
      d[v * n + static_cast<std::size_t>(p)] = t.edge_len(static_cast<NodeId>(v));
      d[static_cast<std::size_t>(p) * n + v] = t.edge_len(static_cast<NodeId>(v));
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

double gh_superset(const MetricTree& a, const MetricTree& b, bool marked) {
  const std::size_t na = a.size(), nb = b.size(), cells = na * nb;
  if (cells > 20) throw std::length_error("gh_superset: too many cells");
  const auto da = floyd_distances(a), db = floyd_distances(b);
  auto cell_a = [&](std::size_t c) { return c / nb; };
  auto cell_b = [&](std::size_t c) { return c % nb; };
  std::vector<double> gap(cells * cells);
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t e = 0; e < cells; ++e)
      gap[c * cells + e] = std::abs(da[cell_a(c) * na + cell_a(e)] - db[cell_b(c) * nb + cell_b(e)]);
  std::uint32_t pinned = 1U << (static_cast<std::size_t>(a.root()) * nb + static_cast<std::size_t>(b.root()));
  if (marked) pinned |= 1U << (static_cast<std::size_t>(*a.marked()) * nb + static_cast<std::size_t>(*b.marked()));
  const std::uint32_t full = cells == 32 ? ~0U : (1U << cells) - 1U;
  // dis[S] = max gap over pairs of cells in S, filled by adding the top cell.
  std::vector<double> dis(static_cast<std::size_t>(full) + 1, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int top = 31 - std::countl_zero(s);
    const std::uint32_t rest = s & ~(1U << top);
    double m = dis[rest];
    for (std::uint32_t r = rest; r; r &= r - 1) m = std::max(m, gap[static_cast<std::size_t>(top) * cells + static_cast<std::size_t>(std::countr_zero(r))]);
    dis[s] = m;
    if ((s & pinned) != pinned || m >= best) continue;
    std::uint32_t cover_a = 0, cover_b = 0;
    for (std::uint32_t r = s; r; r &= r - 1) {
      const auto c = static_cast<std::size_t>(std::countr_zero(r));
      cover_a |= 1U << cell_a(c);
      cover_b |= 1U << cell_b(c);
    }
    if (cover_a == (1U << na) - 1U && cover_b == (1U << nb) - 1U) best = m;
  }
  return best / 2.0;
}

double glued_distance(const srt::ConcatInput& in, std::size_t i, NodeId u, std::size_t j, NodeId v) {
  auto scale = [&](std::size_t k) { return std::pow(in.xi.atom(k), in.beta); };
  auto d = [&](std::size_t k, NodeId x, NodeId y) {
    const auto m = floyd_distances(in.trees[k]);
    return m[static_cast<std::size_t>(x) * in.trees[k].size() + static_cast<std::size_t>(y)];
  };
  // Distance from a node of tree k to the gluing point.
  auto to_glue = [&](std::size_t k, NodeId x) {
    if (k == 0) return scale(0) * d(0, x, *in.trees[0].marked());
    return scale(k) * d(k, x, in.trees[k].root());
  };
  if (i == j) return scale(i) * d(i, u, v);
  return to_glue(i, u) + to_glue(j, v);
}

double spine_by_words(const srt::XiModel& xi, const srt::InitLaw& init, int depth, srt::StreamKey root) {
  double total = 0.0;
  const std::uint64_t words = 1ULL << depth;
  for (std::uint64_t w = 0; w < words; ++w) {
    srt::Word u;
    double weight = 1.0;
    for (int level = 0; level < depth; ++level) {
      const auto [x0, x1] = xi.sample_pair(srt::node_key(root, u));
      const std::uint32_t bit = (w >> (depth - 1 - level)) & 1U;
      weight *= std::pow(bit ? x1 : x0, xi.beta);
      u.push_back(bit);
    }
    srt::CounterRng rng = srt::node_key(root, u).child(srt::tag::kInit).stream();
    total += weight * init.sample_spine(rng);
  }
  return total;
}

std::vector<MetricTree> small_marked_corpus() {
  // Parent arrays of every rooted unordered tree shape with 1..4 nodes.
  const std::vector<std::vector<NodeId>> shapes = {
      {-1}, {-1, 0}, {-1, 0, 1}, {-1, 0, 0}, {-1, 0, 1, 2}, {-1, 0, 1, 1}, {-1, 0, 0, 1}, {-1, 0, 0, 0}};
  const std::vector<std::vector<double>> lengths = {{0.0, 1.0, 2.0, 3.0}, {0.0, 1.5, 0.5, 1.0}};
  std::vector<MetricTree> out;
  for (const auto& parents : shapes)
    for (NodeId mark = 0; mark < static_cast<NodeId>(parents.size()); ++mark)
      for (const auto& len : lengths) {
        if (parents.size() == 1 && &len != &lengths.front()) continue;
        srt::TreeBuilder b;
        for (std::size_t v = 0; v < parents.size(); ++v) b.add_node(parents[v], len[v]);
        b.set_root(0);
        b.set_marked(mark);
        out.push_back(std::move(b).build());
      }
  return out;
}

}  // namespace oracle
