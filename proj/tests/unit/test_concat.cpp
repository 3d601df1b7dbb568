#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srt/concat.hpp"
#include "srt/errors.hpp"
#include "srt/verify_suite.hpp"

using namespace srt;

namespace {

ConcatInput unit_segments(std::array<double, 4> x, double beta) {
  ConcatInput in;
  in.xi.x = x;
  in.beta = beta;
  for (int i = 0; i < 3; ++i) in.trees.push_back(MetricTree::segment(1.0, true));
  return in;
}

}  // namespace

TEST_CASE("hand-evaluated gluing") {
  const ConcatInput in = unit_segments({0.25, 0.25, 0.5, 0.0}, 0.5);
  const MetricTree t = concat(in);
  REQUIRE(t.marked().has_value());
  CHECK(t.root_dist(*t.marked()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats(t).height == doctest::Approx(0.5 + std::sqrt(0.5)).epsilon(1e-15));
  double total = 0.0;
  for (double m : t.masses()) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("degenerate single atom reproduces tau_0") {
  CounterRng rng(3);
  for (int i = 0; i < 20; ++i) {
    const MetricTree tau = random_small_tree(rng, 6, false, true);
    ConcatInput in;
    in.xi.x = {1.0, 0.0, 0.0, 0.0};
    in.beta = 0.4;
    in.trees = {tau, MetricTree(), MetricTree()};
    const ConcatResult r = concat_with_map(in);
    for (NodeId u = 0; u < static_cast<NodeId>(tau.size()); ++u)
      for (NodeId v = 0; v < static_cast<NodeId>(tau.size()); ++v)
        CHECK(dist(r.tree, r.image[0][u], r.image[0][v]) == doctest::Approx(dist(tau, u, v)).epsilon(1e-15));
    CHECK(r.tree.root_dist(*r.tree.marked()) == doctest::Approx(tau.root_dist(*tau.marked())).epsilon(1e-15));
  }
}

TEST_CASE("property: glued distances follow the four-case formula") {
  CounterRng rng(2718);
  for (int t = 0; t < 300; ++t) {
    const ConcatInput in = random_concat_input(rng, 7, 5, true);
    const ConcatResult r = concat_with_map(in);
    for (std::size_t i = 0; i < in.trees.size(); ++i)
      for (std::size_t j = 0; j < in.trees.size(); ++j)
        for (NodeId u = 0; u < static_cast<NodeId>(in.trees[i].size()); ++u)
          for (NodeId v = 0; v < static_cast<NodeId>(in.trees[j].size()); ++v) {
            const double want = oracle::glued_distance(in, i, u, j, v);
            CHECK(std::abs(dist(r.tree, r.image[i][u], r.image[j][v]) - want) < 1e-12);
            CHECK(std::abs(concat_formula_distance(in, i, u, j, v) - want) < 1e-12);
          }
    double total = 0.0;
    for (double m : r.tree.masses()) total += m;
    CHECK(std::abs(total - 1.0) <= kMassTolerance);
  }
}

TEST_CASE("property: scaling equivariance") {
  CounterRng rng(99);
  for (int t = 0; t < 200; ++t) {
    ConcatInput in = random_concat_input(rng, 6, 5, true);
    in.beta = 0.5;
    const double c = 4.0;  // c^beta = 2, so both sides round identically
    ConcatInput scaled = in;
    for (auto& tr : scaled.trees) tr = rescale(tr, c, in.beta);
    const MetricTree lhs = concat(scaled), rhs = rescale(concat(in), c, in.beta);
    REQUIRE(lhs.size() == rhs.size());
    const auto dl = distance_matrix(lhs), dr = distance_matrix(rhs);
    CHECK(dl == dr);
    for (NodeId v = 0; v < static_cast<NodeId>(lhs.size()); ++v) CHECK(lhs.mass(v) == rhs.mass(v));
  }
}

TEST_CASE("d_beta examples") {
  ConcatInput k = unit_segments({0.25, 0.25, 0.5, 0.0}, 0.5);
  CHECK(d_beta(k, k).value == 0.0);
  ConcatInput k2 = k;
  k2.xi.x = {0.16, 0.25, 0.59, 0.0};
  const DBetaResult r = d_beta(k, k2);
  CHECK(r.value >= 0.1 - 1e-12);
  CHECK(r.value == doctest::Approx(std::max(0.1, std::abs(std::sqrt(0.5) - std::sqrt(0.59)))).epsilon(1e-12));

  ConcatInput swap = unit_segments({0.2, 0.2, 0.2, 0.4}, 0.5);
  swap.xi.p = {0.5, 0.5};
  swap.trees.push_back(MetricTree::segment(2.0, true));
  swap.trees.push_back(MetricTree::segment(2.0, true));
  ConcatInput swapped = swap;
  std::swap(swapped.trees[3], swapped.trees[4]);
  CHECK(d_beta(swap, swapped).value == 0.0);
}

TEST_CASE("stable scaling sequences") {
  CounterRng rng(17);
  MeanVar m2, m15;
  for (int i = 0; i < 20000; ++i) {
    const ScalingSeq a = stable_xi(2.0, 1e-6, rng);
    CHECK(a.x[3] == 0.0);
    CHECK(a.p.empty());
    m2.add(a.x[0]);
    const ScalingSeq b = stable_xi(1.5, 1e-2, rng, 200);
    m15.add(b.x[0]);
    double s = 0.0;
    for (double v : b.atoms()) s += v;
    REQUIRE(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK(std::abs(m2.mean() - 1.0 / 3) <= 3 * m2.std_error());
  CHECK(std::abs(m15.mean() - 0.25) <= 3 * m15.std_error());
}
