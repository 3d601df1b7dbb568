#pragma once

// Exact rooted (optionally marked) Gromov-Hausdorff distance between the
// vertex sets of two small metric trees.
//
// Any correspondence contains one of the form graph(f) u graph(g)^-1 with
// f: A -> B and g: B -> A, and removing pairs never increases distortion, so
// minimising over such function pairs is exact. The search is branch and
// bound with forward checking; each choice for the first free variable is an
// independent subproblem started from the same greedy upper bound, so the
// serial and OpenMP paths explore identical trees and return identical results.

#include <utility>
#include <vector>

#include "srt/exec.hpp"
#include "srt/metric_tree.hpp"

namespace srt {

inline constexpr std::size_t kDefaultGhMaxNodes = 7;

struct GhResult {
  double distance = 0.0;  // half the minimal distortion
  std::vector<std::pair<NodeId, NodeId>> correspondence;
};

// Pins (root, root') and, when marked, (x, x'). Throws SizeError if either
// tree has more than max_nodes vertices.
GhResult gh_search(const MetricTree& a, const MetricTree& b, bool marked,
                   std::size_t max_nodes = kDefaultGhMaxNodes, Exec exec = Exec::kParallel);

double gh_dist(const MetricTree& a, const MetricTree& b, bool marked,
               std::size_t max_nodes = kDefaultGhMaxNodes, Exec exec = Exec::kParallel);

// Distortion of an explicit relation (both sides must be covered).
double distortion(const MetricTree& a, const MetricTree& b,
                  const std::vector<std::pair<NodeId, NodeId>>& relation);

}  // namespace srt
