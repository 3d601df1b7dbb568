#pragma once

// Hand-rolled generators for property tests.

#include <cstdint>
#include <vector>

#include "srt/metric_tree.hpp"
#include "srt/rng.hpp"

namespace gen {

// Random tree: node v > 0 hangs from a uniform earlier node with length in
// [0.1, 3); optional unit mass spread over the leaves. Dyadic lengths are
// multiples of 1/16, so every path sum is exact in any summation order.
inline srt::MetricTree tree(srt::CounterRng& rng, int nodes, bool with_mass = false, bool dyadic = false) {
  srt::TreeBuilder b;
  b.add_node(srt::kNoNode, 0.0);
  for (int v = 1; v < nodes; ++v)
    b.add_node(static_cast<srt::NodeId>(srt::uniform_index(rng, static_cast<std::uint64_t>(v))),
               dyadic ? static_cast<double>(1 + srt::uniform_index(rng, 48)) / 16.0
                      : 0.1 + 2.9 * srt::uniform01(rng));
  b.set_root(0);
  b.set_marked(static_cast<srt::NodeId>(srt::uniform_index(rng, static_cast<std::uint64_t>(nodes))));
  if (with_mass) {
    srt::TreeBuilder probe = b;
    const auto leaves = std::move(probe).build().leaves();
    if (leaves.empty()) {
      b.set_mass(0, 1.0);
    } else {
      for (auto l : leaves) b.set_mass(l, 1.0 / static_cast<double>(leaves.size()));
    }
  }
  return std::move(b).build();
}

inline int size_between(srt::CounterRng& rng, int lo, int hi) {
  return lo + static_cast<int>(srt::uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace gen
