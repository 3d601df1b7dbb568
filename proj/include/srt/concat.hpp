#pragma once

// Scaling sequences xi = (x0, x1, x2, x3 p_1, x3 p_2, ...) and the gluing
// operator: tau_0 scaled by xi_0^beta keeps its root; every other tau_i is
// scaled by xi_i^beta and hung by its root at the image of tau_0's marked
// point; the image of tau_1's marked point becomes the new marked point.

#include <array>
#include <cstdint>
#include <vector>

#include "srt/exec.hpp"
#include "srt/gh.hpp"
#include "srt/metric_tree.hpp"
#include "srt/random_laws.hpp"
#include "srt/rng.hpp"

namespace srt {

struct ScalingSeq {
  std::array<double, 4> x{1.0, 0.0, 0.0, 0.0};
  std::vector<double> p;  // decreasing, sums to one (empty when x3 == 0)
  double residual = 0.0;  // mass of p lost to truncation before renormalising

  std::size_t size() const { return 3 + p.size(); }
  double atom(std::size_t i) const { return i < 3 ? x[i] : (i - 3 < p.size() ? x[3] * p[i - 3] : 0.0); }
  std::vector<double> atoms() const;
  // Throws DomainError when a constraint fails.
  void validate() const;
};

struct ConcatInput {
  ScalingSeq xi;
  std::vector<MetricTree> trees;  // trees[i] belongs to atom i
  double beta = 0.5;
};

struct ConcatResult {
  MetricTree tree;
  NodeId junction = 0;
  // image[i][v]: node of the output representing node v of trees[i].
  std::vector<std::vector<NodeId>> image;
};

ConcatResult concat_with_map(const ConcatInput& input);
MetricTree concat(const ConcatInput& input);

// Distance between two nodes of the output computed from the inputs by the
// four-case formula; v_i lies in trees[i].
double concat_formula_distance(const ConcatInput& input, std::size_t i, NodeId u, std::size_t j, NodeId v);

// xi for the stable tree: (X0..X3) ~ Dir(beta,beta,beta,1-2beta) and p ~
// PD(1-beta, 1-2beta) truncated at eps; for alpha = 2 the fourth part is 0.
ScalingSeq stable_xi(double alpha, double eps, CounterRng& rng, std::size_t max_atoms = kDefaultMaxAtoms);

// The two independent halves of stable_xi, for callers that draw them from
// separate streams.
std::array<double, 4> stable_dirichlet_part(double alpha, CounterRng& rng);
StickSeq stable_pd_part(double alpha, double eps, CounterRng& rng, std::size_t max_atoms = kDefaultMaxAtoms);

struct DBetaResult {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on |xi_i^beta - xi'_i^beta| beyond the stored atoms
};

// Sup over stored coordinates of |xi_i^b - xi'_i^b|, d^m_GH(tau_i, tau'_i)
// and d^m_GH(xi_i^b tau_i, xi'_i^b tau'_i). Missing or zero-weight
// coordinates compare against the one-point tree.
DBetaResult d_beta(const ConcatInput& k1, const ConcatInput& k2, std::size_t max_nodes = kDefaultGhMaxNodes,
                   Exec exec = Exec::kParallel);

}  // namespace srt
