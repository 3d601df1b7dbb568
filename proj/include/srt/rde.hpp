#pragma once

// Iteration of the recursive distribution equation T = g_beta(xi, T_0, T_1, ...)
// over the Ulam-Harris tree. Every node u owns the stream key(u) obtained by
// folding StreamKey::child over the word u; its scaling sequence is drawn from
// key(u).child(tag::kXi) (the Dirichlet/discrete part, which fixes xi_0 and
// xi_1) and key(u).child(tag::kXiPd) (the Poisson-Dirichlet tail), and a depth-n
// leaf draws its initial tree from key(u).child(tag::kInit). Full, spine and
// skeleton modes therefore see the same randomness wherever they overlap.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srt/concat.hpp"
#include "srt/exec.hpp"
#include "srt/metric_tree.hpp"
#include "srt/rng.hpp"
#include "srt/stats.hpp"

namespace srt {

using Word = std::vector<std::uint32_t>;

struct XiModel {
  enum class Kind { kStable, kDirichlet, kDiscrete };
  Kind kind = Kind::kStable;
  double alpha = 2.0;                     // stable
  std::vector<double> params;             // Dirichlet parameters, one per atom
  std::vector<std::vector<double>> table;  // discrete: atom vectors
  std::vector<double> probs;              // discrete: their probabilities
  double beta = std::numeric_limits<double>::quiet_NaN();
  double eps = 1e-6;
  std::size_t max_atoms = kDefaultMaxAtoms;

  static XiModel stable(double alpha, double eps = 1e-6, std::size_t max_atoms = kDefaultMaxAtoms);
  // beta may be NaN and filled in later by calibrate_beta.
  static XiModel dirichlet(std::vector<double> params, double beta);
  static XiModel discrete(std::vector<std::vector<double>> table, std::vector<double> probs, double beta);

  std::string describe() const;
  void validate() const;

  // (xi_0, xi_1) from the kXi stream of the node.
  std::pair<double, double> sample_pair(StreamKey node) const;
  ScalingSeq sample(StreamKey node) const;

  // Exact E[xi_0^s + xi_1^s] and E[xi_0^s xi_1^s].
  double power_sum(double s) const;
  double cross_moment(double s) const;
};

struct InitLaw {
  enum class Kind { kConstant, kExponential, kSamples, kTrees };
  Kind kind = Kind::kConstant;
  double value = 1.0;           // constant length or exponential mean
  std::vector<double> samples;  // empirical law of segment lengths
  std::vector<MetricTree> trees;

  static InitLaw constant(double length);
  static InitLaw exponential(double mean);
  static InitLaw empirical(std::vector<double> lengths);
  static InitLaw from_trees(std::vector<MetricTree> trees);

  std::string describe() const;

  // Both consume the stream identically, so sample_spine(r) equals the spine
  // of sample(r) on equal streams.
  MetricTree sample(CounterRng& rng) const;
  double sample_spine(CounterRng& rng) const;

  // h = E[d(root, marked)].
  double mean_spine() const;
};

inline constexpr std::size_t kFullNodeLimit = 10'000'000;

struct IterateTree {
  MetricTree tree;
  // Word u (depth-n leaf for full mode, depth-k word for skeleton) -> node of
  // the output that is the image of that leaf tree's marked point.
  std::map<Word, NodeId> marks;
};

StreamKey node_key(StreamKey root, const Word& u);

IterateTree iterate_full(const XiModel& xi, const InitLaw& init, int depth, StreamKey root,
                         std::size_t node_limit = kFullNodeLimit);
double iterate_spine(const XiModel& xi, const InitLaw& init, int depth, StreamKey root);
IterateTree iterate_skeleton(const XiModel& xi, const InitLaw& init, int depth, int k, StreamKey root,
                             std::size_t node_limit = kFullNodeLimit);

// Replicate r of a run with master seed s uses StreamKey{s}.child(tag::kReplicate).child(r).
StreamKey replicate_key(std::uint64_t seed, std::uint64_t r);

std::vector<double> spine_samples(const XiModel& xi, const InitLaw& init, int depth, std::int64_t reps,
                                  std::uint64_t seed, Exec exec = Exec::kParallel);

struct MartingaleRun {
  std::vector<MeanVar> levels;  // L_0 .. L_depth
  std::vector<double> last;     // per-replicate L_depth
};

MartingaleRun martingale_levels(const XiModel& xi, int depth, std::int64_t reps, std::uint64_t seed,
                                Exec exec = Exec::kParallel);

// Mean and variance trajectory of L_n against E[L_n] = 1 and the bound
// Var(L_n) <= E[L_inf^2] = 2c / (1 - a), a = E[xi0^2b + xi1^2b], c = E[xi0^b xi1^b].
StatReport spine_martingale(const XiModel& xi, int depth, std::int64_t reps, std::uint64_t seed,
                            Exec exec = Exec::kParallel);

struct Calibration {
  double beta = 0.0;
  double residual = 0.0;  // |f_hat(beta) - 1|
  double f_at_one = 0.0;
  std::int64_t reps = 0;
};

// Root of the Monte Carlo estimate of f(b) = E[xi_0^b + xi_1^b] on (0,1)
// using one fixed set of draws; stable laws return 1 - 1/alpha directly.
Calibration calibrate_beta(const XiModel& xi, double tol, std::int64_t reps, std::uint64_t seed);

struct GenString {
  double length = 0.0;
  std::vector<std::pair<double, double>> atoms;  // (location, mass), increasing location
};

// Dyadic splitting of the spine to m + 1 binary levels: each internal word v
// carries the merged atom xi_bar_v (1 - xi_v0 - xi_v1) between its two
// fragments, and each leaf fragment keeps its residual mass xi_bar_w at its
// midpoint so the masses sum to one.
GenString build_string(const XiModel& xi, const InitLaw& init, int m, StreamKey root);

// Bead replacement: every atom of mass q is replaced by an independent copy of
// the string scaled by q^beta in length and q in mass, for the given number
// of levels. The string for atom j of a string with key k uses
// k.child(tag::kString).child(j).
MetricTree grow_from_string(const XiModel& xi, const InitLaw& init, int m, int levels, StreamKey root,
                            std::size_t node_limit = kFullNodeLimit);

// Mean height of grow_from_string after 0..levels levels, over reps
// replicates; the same replicate keys are used at every level.
std::vector<MeanVar> string_height_profile(const XiModel& xi, const InitLaw& init, int m, int levels,
                                           std::int64_t reps, std::uint64_t seed, Exec exec = Exec::kParallel);

struct AttractionOptions {
  double mean_tol = 0.05;
  double second_tol = 0.10;
};

// Stable laws: scaled spine moments against alpha^p ML(beta,beta,p) moments,
// plus KS between depth-2 and depth samples. Custom laws: E[spine] = h and
// the same KS check.
StatReport attraction_experiment(const XiModel& xi, const InitLaw& init, int depth, std::int64_t reps,
                                 std::uint64_t seed, Exec exec = Exec::kParallel,
                                 AttractionOptions opt = {});

}  // namespace srt
