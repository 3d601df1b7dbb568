#pragma once

// Samplers and exact moments: Gamma/Beta/Dirichlet, generalised Polya urns,
// the two-parameter Chinese restaurant process, GEM/Poisson-Dirichlet stick
// breaking and generalised Mittag-Leffler moments.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "srt/rng.hpp"

namespace srt {

// log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
double log_gamma_sample(double shape, CounterRng& rng);
double gamma_sample(double shape, CounterRng& rng);
double beta_sample(double a, double b, CounterRng& rng);
std::vector<double> dirichlet_sample(std::span<const double> params, CounterRng& rng);

// E[prod_i X_i^{s_i}] for X ~ Dir(params); exponents may be shorter than params.
double dirichlet_power_moment(std::span<const double> params, std::span<const double> exponents);

// Urn with K colours: colour j is drawn with probability weights[j]/sum, then
// receives step more weight.
struct UrnState {
  std::vector<double> initial;
  std::vector<double> weights;
  double step = 1.0;
  std::vector<std::int64_t> draws;
  std::int64_t n = 0;

  static UrnState make(std::vector<double> gamma, double step);
  double total() const;
};

std::pair<UrnState, int> urn_step(const UrnState& s, CounterRng& rng);
int urn_advance(UrnState& s, CounterRng& rng);

// Limiting Dirichlet parameters of the draw frequencies: gamma_j / step.
std::vector<double> urn_limit_params(const UrnState& s);

// Two-parameter CRP with discount beta and concentration theta.
class CrpState {
 public:
  CrpState(double beta, double theta);

  double beta() const { return beta_; }
  double theta() const { return theta_; }
  std::int64_t n() const { return n_; }
  std::int64_t tables() const { return static_cast<std::int64_t>(sizes_.size()); }
  const std::vector<std::int64_t>& table_sizes() const { return sizes_; }

  // Seats one more customer; returns the table index (== old tables() if new).
  std::int64_t advance(CounterRng& rng);

  // Probabilities for the next customer: one per table, then the new table.
  std::vector<double> seating_probabilities() const;

 private:
  double beta_;
  double theta_;
  std::int64_t n_ = 1;
  std::vector<std::int64_t> sizes_{1};
  // One entry per customer beyond the first at each table; drawing uniformly
  // from it realises the N_j - 1 part of the seating weight in O(1).
  std::vector<std::int32_t> extra_seats_;
};

CrpState crp_step(const CrpState& s, CounterRng& rng);

struct StickSeq {
  std::vector<double> gem;      // size-biased order
  std::vector<double> weights;  // decreasing rearrangement
  double residual = 0.0;        // mass folded back by renormalisation
};

inline constexpr std::size_t kDefaultMaxAtoms = 100000;

// Stick breaking W_j ~ Beta(1 - beta, theta + j beta) until the unbroken
// remainder drops below eps or max_atoms sticks exist; the retained atoms are
// renormalised to sum to one.
StickSeq gem_sample(double beta, double theta, double eps, CounterRng& rng,
                    std::size_t max_atoms = kDefaultMaxAtoms);

// p-th moment of the generalised Mittag-Leffler law ML(beta, theta).
double ml_moment(double beta, double theta, double p);

}  // namespace srt
