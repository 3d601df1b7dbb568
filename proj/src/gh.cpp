#include "srt/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srt/errors.hpp"

namespace srt {

namespace {

class GhSearch {
 public:
  GhSearch(const MetricTree& a, const MetricTree& b)
      : n_(a.size()), m_(b.size()), da_(distance_matrix(a)), db_(distance_matrix(b)),
        value_(n_ + m_, -1) {}

  std::size_t vars() const { return n_ + m_; }

  std::pair<std::size_t, std::size_t> pair_of(std::size_t var, std::int32_t val) const {
    return var < n_ ? std::pair{var, static_cast<std::size_t>(val)}
                    : std::pair{static_cast<std::size_t>(val), var - n_};
  }

  std::size_t domain(std::size_t var) const { return var < n_ ? m_ : n_; }

  double cost(std::size_t var, std::int32_t val) const {
    const auto [a, b] = pair_of(var, val);
    double worst = 0.0;
    for (const auto& [pa, pb] : pairs_) worst = std::max(worst, std::abs(da_[a * n_ + pa] - db_[b * m_ + pb]));
    return worst;
  }

  void assign(std::size_t var, std::int32_t val) {
    value_[var] = val;
    pairs_.push_back(pair_of(var, val));
  }

  void unassign(std::size_t var) {
    value_[var] = -1;
    pairs_.pop_back();
  }

  bool assigned(std::size_t var) const { return value_[var] >= 0; }

  // Greedy completion in variable order; returns its distortion.
  double greedy(double cur) {
    std::vector<std::size_t> done;
    for (std::size_t v = 0; v < vars(); ++v) {
      if (assigned(v)) continue;
      std::int32_t best_val = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t x = 0; x < domain(v); ++x) {
        const double c = cost(v, static_cast<std::int32_t>(x));
        if (c < best_cost) {
          best_cost = c;
          best_val = static_cast<std::int32_t>(x);
        }
      }
      cur = std::max(cur, best_cost);
      assign(v, best_val);
      done.push_back(v);
    }
    snapshot_ = value_;
    for (auto it = done.rbegin(); it != done.rend(); ++it) unassign(*it);
    return cur;
  }

  struct Choice {
    std::size_t var = 0;
    std::vector<std::pair<double, std::int32_t>> values;  // (cost, value), ascending
    bool dead = false;
    bool complete = false;
  };

  // Forward check: pick the unassigned variable with fewest values below bound.
  Choice choose(double cur, double bound) const {
    Choice ch;
    ch.complete = true;
    std::size_t fewest = std::numeric_limits<std::size_t>::max();
    std::vector<std::pair<double, std::int32_t>> vals;
    for (std::size_t v = 0; v < vars(); ++v) {
      if (assigned(v)) continue;
      ch.complete = false;
      vals.clear();
      for (std::size_t x = 0; x < domain(v); ++x) {
        const double c = std::max(cur, cost(v, static_cast<std::int32_t>(x)));
        if (c < bound) vals.emplace_back(c, static_cast<std::int32_t>(x));
      }
      if (vals.empty()) {
        ch.dead = true;
        return ch;
      }
      if (vals.size() < fewest) {
        fewest = vals.size();
        ch.var = v;
        ch.values = vals;
      }
    }
    std::sort(ch.values.begin(), ch.values.end());
    return ch;
  }

  void dfs(double cur, double& best, std::vector<std::int32_t>& best_assign) {
    Choice ch = choose(cur, best);
    if (ch.complete) {
      if (cur < best) {
        best = cur;
        best_assign = value_;
      }
      return;
    }
    if (ch.dead) return;
    for (const auto& [c, x] : ch.values) {
      if (c >= best) break;
      assign(ch.var, x);
      dfs(c, best, best_assign);
      unassign(ch.var);
    }
  }

  const std::vector<std::int32_t>& snapshot() const { return snapshot_; }

  std::vector<std::pair<NodeId, NodeId>> relation(const std::vector<std::int32_t>& values) const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (std::size_t v = 0; v < vars(); ++v) {
      const auto [a, b] = pair_of(v, values[v]);
      out.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::size_t n_, m_;
  std::vector<double> da_, db_;
  std::vector<std::int32_t> value_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::int32_t> snapshot_;
};

}  // namespace

GhResult gh_search(const MetricTree& a, const MetricTree& b, bool marked, std::size_t max_nodes, Exec exec) {
  if (a.size() > max_nodes || b.size() > max_nodes)
    throw SizeError("exact GH search limited to " + std::to_string(max_nodes) + " nodes per tree (got " +
                    std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  if (marked && (!a.marked() || !b.marked()))
    throw DomainError("marked GH distance needs a marked point in both trees");

  GhSearch root_state(a, b);
  const std::size_t n = a.size();
  double cur = 0.0;
  auto pin = [&](std::size_t var, std::int32_t val) {
    if (root_state.assigned(var)) return;
    cur = std::max(cur, root_state.cost(var, val));
    root_state.assign(var, val);
  };
  pin(static_cast<std::size_t>(a.root()), b.root());
  pin(n + static_cast<std::size_t>(b.root()), a.root());
  if (marked) {
    pin(static_cast<std::size_t>(*a.marked()), *b.marked());
    pin(n + static_cast<std::size_t>(*b.marked()), *a.marked());
  }

  const double upper = root_state.greedy(cur);
  const auto greedy_assign = root_state.snapshot();
  const auto top = root_state.choose(cur, upper);

  double best = upper;
  std::vector<std::int32_t> best_assign = greedy_assign;
  if (!top.complete && !top.dead) {
    struct Branch {
      double best;
      std::vector<std::int32_t> assign;
    };
    std::vector<Branch> branches(top.values.size(), Branch{upper, {}});
    for_each_index(top.values.size(), exec, [&](std::size_t i) {
      GhSearch local = root_state;
      const auto [c, x] = top.values[i];
      local.assign(top.var, x);
      local.dfs(c, branches[i].best, branches[i].assign);
    });
    for (const auto& br : branches)
      if (!br.assign.empty() && br.best < best) {
        best = br.best;
        best_assign = br.assign;
      }
  }
  GhResult r;
  r.distance = 0.5 * best;
  r.correspondence = root_state.relation(best_assign);
  return r;
}

double gh_dist(const MetricTree& a, const MetricTree& b, bool marked, std::size_t max_nodes, Exec exec) {
  return gh_search(a, b, marked, max_nodes, exec).distance;
}

double distortion(const MetricTree& a, const MetricTree& b, const std::vector<std::pair<NodeId, NodeId>>& relation) {
  std::vector<char> cov_a(a.size(), 0), cov_b(b.size(), 0);
  for (const auto& [x, y] : relation) {
    if (x < 0 || static_cast<std::size_t>(x) >= a.size() || y < 0 || static_cast<std::size_t>(y) >= b.size())
      throw DomainError("relation refers to a node out of range");
    cov_a[x] = cov_b[y] = 1;
  }
  if (std::find(cov_a.begin(), cov_a.end(), 0) != cov_a.end() || std::find(cov_b.begin(), cov_b.end(), 0) != cov_b.end())
    throw DomainError("relation is not a correspondence");
  double worst = 0.0;
  for (const auto& [x1, y1] : relation)
    for (const auto& [x2, y2] : relation) worst = std::max(worst, std::abs(dist(a, x1, x2) - dist(b, y1, y2)));
  return worst;
}

}  // namespace srt
