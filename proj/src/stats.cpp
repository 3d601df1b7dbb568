#include "srt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "srt/errors.hpp"

namespace srt {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kPaper: return "PAPER";
    case Provenance::kTrivial: return "TRIVIAL";
    case Provenance::kDerived: return "DERIVED";
  }
  return "?";
}

std::string Rule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kSigma: os << k << "sigma"; break;
    case Kind::kRelative: os << "rel(" << k << ")"; break;
    case Kind::kAbsolute: os << "abs(" << k << ")"; break;
    case Kind::kExact: os << "exact"; break;
    case Kind::kAtMost: os << "at_most"; break;
    case Kind::kAtLeast: os << "at_least"; break;
    case Kind::kCritical: os << "critical(" << k << ")"; break;
  }
  return os.str();
}

bool Rule::check(double estimate, double std_error, double target) const {
  if (!std::isfinite(estimate)) return false;
  switch (kind) {
    case Kind::kSigma:
      if (std_error == 0.0) return estimate == target;
      return std::abs(estimate - target) <= k * std_error;
    case Kind::kRelative: return std::abs(estimate - target) <= k * std::abs(target);
    case Kind::kAbsolute: return std::abs(estimate - target) <= k;
    case Kind::kExact: return estimate == target;
    case Kind::kAtMost:
    case Kind::kCritical: return estimate <= target;
    case Kind::kAtLeast: return estimate >= target;
  }
  return false;
}

const Estimate& StatReport::estimate(const std::string& label) const {
  for (const auto& e : estimates)
    if (e.label == label) return e;
  throw DomainError("report " + name + " has no estimate " + label);
}

const Target& StatReport::target(const std::string& label) const {
  for (const auto& t : targets)
    if (t.label == label) return t;
  throw DomainError("report " + name + " has no target " + label);
}

bool StatReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass || v.informational; });
}

void StatReport::note(Estimate e, Target t) {
  verdicts.push_back({e.label, t.label, "report", true, true});
  estimates.push_back(std::move(e));
  targets.push_back(std::move(t));
}

bool StatReport::compare(Estimate e, Target t, Rule rule) {
  const bool pass = rule.check(e.value, e.std_error, t.value);
  verdicts.push_back({e.label, t.label, rule.describe(), pass});
  estimates.push_back(std::move(e));
  targets.push_back(std::move(t));
  return pass;
}

void write_csv_header(std::ostream& os) {
  os << "test,label,estimate,stderr,n,target,provenance,rule,verdict\n";
}

void write_csv(std::ostream& os, const StatReport& r) {
  const auto old = os.precision(17);
  for (const auto& v : r.verdicts) {
    const Estimate& e = r.estimate(v.estimate);
    const Target& t = r.target(v.target);
    os << r.name << ',' << e.label << ',' << e.value << ',' << e.std_error << ',' << e.n << ','
       << t.value << ',' << provenance_name(t.provenance) << ',' << v.rule << ','
       << (v.informational ? "info" : v.pass ? "pass" : "fail") << '\n';
  }
  os.precision(old);
}

void MeanVar::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MeanVar::merge(const MeanVar& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double MeanVar::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double MeanVar::std_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

MeanVar summarize(std::span<const double> xs) {
  MeanVar mv;
  for (double x : xs) mv.add(x);
  return mv;
}

MomentResult moment_test(std::span<const double> samples, double p, double target, Rule rule,
                         const std::string& label) {
  if (samples.size() < 30) throw SizeError("moment_test needs at least 30 samples");
  MeanVar mv;
  for (double x : samples) mv.add(p == 1.0 ? x : std::pow(x, p));
  MomentResult r;
  r.estimate = {label, mv.mean(), mv.std_error(), mv.count()};
  const bool degenerate = mv.variance() == 0.0;
  if (degenerate && rule.kind == Rule::Kind::kSigma) rule = Rule::exact();
  r.pass = rule.check(r.estimate.value, r.estimate.std_error, target);
  r.rule = rule.describe();
  return r;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

KsResult ks_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 100 || b.size() < 100) throw SizeError("ks_test needs at least 100 samples per side");
  KsResult r;
  r.statistic = ks_statistic(a, b);
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  // Asymptotic 1% quantile of the Kolmogorov distribution.
  r.critical = 1.6276 * std::sqrt((n + m) / (n * m));
  r.pass = r.statistic <= r.critical;
  return r;
}

GofResult multinomial_gof(std::span<const std::int64_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw DomainError("multinomial_gof: counts and probs must align and have >= 2 cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  GofResult r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected < 5.0) throw SizeError("multinomial_gof: expected count below 5 in cell " + std::to_string(i));
    const double diff = static_cast<double>(counts[i]) - expected;
    r.statistic += diff * diff / expected;
  }
  r.dof = static_cast<int>(counts.size()) - 1;
  r.critical = boost::math::quantile(boost::math::chi_squared(r.dof), 0.99);
  r.pass = r.statistic <= r.critical;
  return r;
}

}  // namespace srt
