#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "srt/errors.hpp"
#include "srt/marchal.hpp"
#include "srt/random_laws.hpp"

using namespace srt;

namespace {

// Chi-square of observed shape counts, merging cells with expected count < 5.
bool shape_gof(const std::vector<std::int64_t>& counts, const std::vector<double>& probs, std::int64_t total) {
  std::vector<std::int64_t> c;
  std::vector<double> p;
  double acc_p = 0.0;
  std::int64_t acc_c = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] == 0.0) {
      if (counts[j] != 0) return false;
      continue;
    }
    acc_p += probs[j];
    acc_c += counts[j];
    if (acc_p * static_cast<double>(total) >= 5.0) {
      p.push_back(acc_p);
      c.push_back(acc_c);
      acc_p = 0.0;
      acc_c = 0;
    }
  }
  if (acc_p > 0.0) {
    p.back() += acc_p;
    c.back() += acc_c;
  }
  return p.size() < 2 || multinomial_gof(c, p).pass;
}

}  // namespace

TEST_CASE("small growths") {
  CounterRng rng(1);
  const DiscreteTree one = grow(1.5, 1, rng);
  CHECK(one.size() == 2);
  CHECK(weight(one, 1.5) == doctest::Approx(0.5));
  const MetricTree seg = to_metric(one, 1.5);
  CHECK(seg.edge_len(1) == doctest::Approx(1.0 / 1.5));

  for (double alpha : {1.1, 1.5, 2.0}) {
    const DiscreteTree y = grow(alpha, 2, rng);
    CHECK(y.size() == 4);
    CHECK(y.node_name(y.parent[y.leaf_node[1]]) == "V2");
    CHECK(y.node_name(y.parent[y.leaf_node[2]]) == "V2");
    CHECK(shape_prob(y, alpha) == doctest::Approx(1.0));
  }
  const DiscreteTree y2 = grow(2.0, 2, rng);
  const MetricTree m = to_metric(y2, 2.0);
  for (NodeId v = 1; v < 4; ++v) CHECK(m.edge_len(v) == doctest::Approx(0.35355339059327373));
  double total = 0.0;
  for (double x : m.masses()) total += x;
  CHECK(total == doctest::Approx(1.0));
  CHECK(m.marked() == y2.leaf_node[1]);
  CHECK_THROWS_AS(grow(2.5, 3, rng), DomainError);
  CHECK_THROWS_AS(decompose_at_v2(one), DomainError);
}

TEST_CASE("shape enumeration and probabilities") {
  const std::int64_t schroeder[] = {1, 1, 4, 26, 236};
  for (int n = 1; n <= 5; ++n) {
    const auto shapes = enumerate_shapes(n);
    CHECK(static_cast<std::int64_t>(shapes.size()) == schroeder[n - 1]);
    for (double alpha : {1.2, 1.5, 2.0}) {
      double s = 0.0;
      for (const auto& t : shapes) s += shape_prob(t, alpha);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  for (const auto& t : enumerate_shapes(3)) {
    const double p = shape_prob(t, 1.5);
    CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
    if (shape_key(t).size() == 1) CHECK(shape_prob(t, 2.0) == 0.0);
  }
}

TEST_CASE("property: Monte Carlo shape frequencies match shape_prob") {
  for (int n : {3, 4})
    for (double alpha : {1.2, 1.5, 2.0}) {
      const auto shapes = enumerate_shapes(n);
      std::map<std::vector<std::uint64_t>, std::size_t> index;
      std::vector<double> probs;
      for (std::size_t i = 0; i < shapes.size(); ++i) {
        index.emplace(shape_key(shapes[i]), i);
        probs.push_back(shape_prob(shapes[i], alpha));
      }
      std::vector<std::int64_t> counts(shapes.size(), 0);
      const std::int64_t runs = 20000;
      for (std::int64_t r = 0; r < runs; ++r) {
        CounterRng rng = StreamKey{static_cast<std::uint64_t>(n * 100 + alpha * 10)}.child(static_cast<std::uint64_t>(r)).stream();
        ++counts[index.at(shape_key(grow(alpha, n, rng)))];
      }
      CHECK(shape_gof(counts, probs, runs));
    }
}

TEST_CASE("property: weight invariant and binary growth at alpha 2") {
  for (double alpha : {1.05, 1.2, 1.5, 1.8, 2.0}) {
    for (std::uint64_t r = 0; r < 20; ++r) {
      CounterRng rng = StreamKey{r}.child(static_cast<std::uint64_t>(alpha * 100)).stream();
      const DiscreteTree t = grow(alpha, 500, rng);
      CHECK(t.max_weight_error <= 1e-9);
      CHECK(weight(t, alpha) == doctest::Approx(500 * alpha - 1).epsilon(1e-12));
      if (alpha == 2.0)
        for (std::size_t v = 0; v < t.size(); ++v)
          if (t.is_branch(static_cast<std::int32_t>(v))) CHECK(t.degree[v] == 3);
    }
  }
}

TEST_CASE("decomposition at V2: bookkeeping, Dirichlet mean, independence surrogate") {
  const double alpha = 1.5;
  const std::int64_t n = 10000;
  MeanVar x0;
  std::vector<double> xs, gs;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    CounterRng rng = StreamKey{4242}.child(r).stream();
    const DiscreteTree t = grow(alpha, n, rng);
    const Decomposition d = decompose_at_v2(t);
    double sum = d.v2_weight;
    std::int64_t leaves = 0;
    for (const auto& c : d.parts) {
      sum += c.weight;
      leaves += c.leaves;
    }
    REQUIRE(sum == doctest::Approx(d.total_weight).epsilon(1e-12));
    REQUIRE(leaves == n + 1);  // A0 .. An
    const auto f = d.fractions();
    x0.add(f[0]);
    if (d.k >= 1) {
      double extra = 0.0;
      for (std::size_t j = 3; j < d.parts.size(); ++j) extra += d.parts[j].weight;
      xs.push_back(f[0]);
      gs.push_back(d.parts[3].weight / extra);
    }
  }
  CHECK(std::abs(x0.mean() - 0.25) <= 3 * x0.std_error());
  const MeanVar mx = summarize(xs), mg = summarize(gs);
  double cov = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) cov += (xs[i] - mx.mean()) * (gs[i] - mg.mean());
  cov /= static_cast<double>(xs.size() - 1);
  const double corr = cov / std::sqrt(mx.variance() * mg.variance());
  CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(xs.size())));
}

TEST_CASE("spine hop count: exact mean oracle") {
  for (double alpha : {1.2, 1.5, 2.0}) {
    const double beta = 1.0 - 1.0 / alpha;
    const std::int64_t n = 300;
    const double closed = std::tgamma(beta) / std::tgamma(2 * beta) * std::exp(std::lgamma(n + 2 * beta - 1) - std::lgamma(n + beta - 1));
    CHECK(oracle::marchal_mean_hops(alpha, n) == doctest::Approx(closed).epsilon(1e-10));
    const auto xs = spine_scaling_samples(alpha, n, 4000, StreamKey{99}, Exec::kParallel);
    const MeanVar m = summarize(xs);
    CHECK(std::abs(m.mean() - oracle::marchal_mean_hops(alpha, n) / std::pow(n, beta)) <= 3 * m.std_error());
  }
}

TEST_CASE("spine samples: serial and OpenMP paths are bit-identical") {
  const auto a = spine_scaling_samples(1.5, 2000, 64, StreamKey{5}, Exec::kSerial);
  const auto b = spine_scaling_samples(1.5, 2000, 64, StreamKey{5}, Exec::kParallel);
  CHECK(a == b);
}
