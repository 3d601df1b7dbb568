#include "srt/random_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srt/errors.hpp"

namespace srt {

namespace {

// Marsaglia-Tsang squeeze for shape >= 1, returning log G.
double log_gamma_large(double shape, CounterRng& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return std::log(d) + std::log(v);
  }
}

double neumaier(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

double log_gamma_sample(double shape, CounterRng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw DomainError("gamma shape must be positive, got " + std::to_string(shape));
  if (shape == 0.5) {
    // Gamma(1/2) is half a squared standard normal.
    const double z = std_normal(rng);
    return std::log(0.5 * z * z);
  }
  if (shape >= 1.0) return log_gamma_large(shape, rng);
  // G(a) = G(a+1) U^{1/a}, kept in log space so small a does not underflow.
  const double lg = log_gamma_large(shape + 1.0, rng);
  return lg + std::log(uniform_open(rng)) / shape;
}

double gamma_sample(double shape, CounterRng& rng) { return std::exp(log_gamma_sample(shape, rng)); }

double beta_sample(double a, double b, CounterRng& rng) {
  const double params[2] = {a, b};
  return dirichlet_sample(params, rng)[0];
}

std::vector<double> dirichlet_sample(std::span<const double> params, CounterRng& rng) {
  if (params.empty()) throw DomainError("dirichlet: empty parameter vector");
  std::vector<double> logs(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0))
      throw DomainError("dirichlet: parameter " + std::to_string(i) + " must be positive");
    logs[i] = log_gamma_sample(params[i], rng);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> x(params.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(logs[i] - top);
  const double sum = neumaier(x);
  for (double& v : x) v /= sum;
  return x;
}

double dirichlet_power_moment(std::span<const double> params, std::span<const double> exponents) {
  if (exponents.size() > params.size()) throw DomainError("dirichlet moment: too many exponents");
  double a_sum = 0.0, s_sum = 0.0, log_num = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0)) throw DomainError("dirichlet moment: parameters must be positive");
    a_sum += params[i];
    if (i < exponents.size()) {
      const double s = exponents[i];
      if (!(params[i] + s > 0.0)) throw DomainError("dirichlet moment: exponent hits a pole");
      s_sum += s;
      log_num += std::lgamma(params[i] + s) - std::lgamma(params[i]);
    }
  }
  if (!(a_sum + s_sum > 0.0)) throw DomainError("dirichlet moment: exponent hits a pole");
  return std::exp(log_num + std::lgamma(a_sum) - std::lgamma(a_sum + s_sum));
}

UrnState UrnState::make(std::vector<double> gamma, double step) {
  if (gamma.empty()) throw DomainError("urn: no colours");
  for (double g : gamma)
    if (!(g > 0.0)) throw DomainError("urn: initial weights must be positive");
  if (!(step > 0.0)) throw DomainError("urn: step must be positive");
  UrnState s;
  s.weights = gamma;
  s.initial = std::move(gamma);
  s.step = step;
  s.draws.assign(s.initial.size(), 0);
  return s;
}

double UrnState::total() const {
  return std::accumulate(initial.begin(), initial.end(), 0.0) + step * static_cast<double>(n);
}

int urn_advance(UrnState& s, CounterRng& rng) {
  const double u = uniform01(rng) * s.total();
  double acc = 0.0;
  int colour = static_cast<int>(s.weights.size()) - 1;
  for (std::size_t j = 0; j < s.weights.size(); ++j) {
    acc += s.weights[j];
    if (u < acc) {
      colour = static_cast<int>(j);
      break;
    }
  }
  ++s.draws[colour];
  ++s.n;
  s.weights[colour] = s.initial[colour] + s.step * static_cast<double>(s.draws[colour]);
  return colour;
}

std::pair<UrnState, int> urn_step(const UrnState& s, CounterRng& rng) {
  UrnState next = s;
  const int colour = urn_advance(next, rng);
  return {std::move(next), colour};
}

std::vector<double> urn_limit_params(const UrnState& s) {
  std::vector<double> out(s.initial);
  for (double& g : out) g /= s.step;
  return out;
}

CrpState::CrpState(double beta, double theta) : beta_(beta), theta_(theta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("crp: beta must lie in [0,1]");
  if (!(theta > -beta)) throw DomainError("crp: theta must exceed -beta");
}

std::int64_t CrpState::advance(CounterRng& rng) {
  const double nd = static_cast<double>(n_);
  const double k = static_cast<double>(sizes_.size());
  const double extra = static_cast<double>(extra_seats_.size());  // n - K
  const double u = uniform01(rng) * (nd + theta_);
  std::int64_t table;
  if (u < extra) {
    table = extra_seats_[uniform_index(rng, extra_seats_.size())];
  } else if (u < extra + k * (1.0 - beta_)) {
    table = static_cast<std::int64_t>(uniform_index(rng, sizes_.size()));
  } else {
    table = static_cast<std::int64_t>(sizes_.size());
    sizes_.push_back(0);
  }
  if (sizes_[table] > 0) extra_seats_.push_back(static_cast<std::int32_t>(table));
  ++sizes_[table];
  ++n_;
  return table;
}

std::vector<double> CrpState::seating_probabilities() const {
  const double denom = static_cast<double>(n_) + theta_;
  std::vector<double> p;
  p.reserve(sizes_.size() + 1);
  for (auto sz : sizes_) p.push_back((static_cast<double>(sz) - beta_) / denom);
  p.push_back((theta_ + static_cast<double>(sizes_.size()) * beta_) / denom);
  return p;
}

CrpState crp_step(const CrpState& s, CounterRng& rng) {
  CrpState next = s;
  next.advance(rng);
  return next;
}

StickSeq gem_sample(double beta, double theta, double eps, CounterRng& rng, std::size_t max_atoms) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("gem: beta must lie in (0,1)");
  if (!(theta > -beta)) throw DomainError("gem: theta must exceed -beta");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("gem: eps must lie in (0,1)");
  if (max_atoms == 0) throw DomainError("gem: max_atoms must be positive");
  StickSeq out;
  double rest = 1.0;
  for (std::size_t j = 1; rest >= eps && out.gem.size() < max_atoms; ++j) {
    const double w = beta_sample(1.0 - beta, theta + static_cast<double>(j) * beta, rng);
    const double atom = rest * w;
    rest *= 1.0 - w;
    if (atom > 0.0) out.gem.push_back(atom);
  }
  if (out.gem.empty()) {
    out.gem.push_back(1.0);
    rest = 0.0;
  }
  out.residual = rest;
  const double sum = neumaier(out.gem);
  for (double& a : out.gem) a /= sum;
  out.weights = out.gem;
  std::sort(out.weights.begin(), out.weights.end(), std::greater<>());
  return out;
}

double ml_moment(double beta, double theta, double p) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("ml_moment: beta must lie in (0,1]");
  if (!(theta > -beta)) throw DomainError("ml_moment: theta must exceed -beta");
  const double a = theta + 1.0;
  const double b = theta / beta + 1.0 + p;
  const double c = theta / beta + 1.0;
  const double d = theta + beta * p + 1.0;
  if (!(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0))
    throw DomainError("ml_moment: gamma argument at or below a pole");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(c) - std::lgamma(d));
}

}  // namespace srt
