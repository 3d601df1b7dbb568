#pragma once

// Estimator-versus-target comparisons and the report record they fill.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace srt {

enum class Provenance { kPaper, kTrivial, kDerived };
const char* provenance_name(Provenance p);

struct Rule {
  enum class Kind { kSigma, kRelative, kAbsolute, kExact, kAtMost, kAtLeast, kCritical };
  Kind kind = Kind::kSigma;
  double k = 3.0;

  static Rule sigma(double k = 3.0) { return {Kind::kSigma, k}; }
  static Rule relative(double tol) { return {Kind::kRelative, tol}; }
  static Rule absolute(double tol) { return {Kind::kAbsolute, tol}; }
  static Rule exact() { return {Kind::kExact, 0.0}; }
  static Rule at_most() { return {Kind::kAtMost, 0.0}; }
  static Rule at_least() { return {Kind::kAtLeast, 0.0}; }
  // Statistic compared against a tabulated 1% critical value (stored as target).
  static Rule critical(double level = 0.01) { return {Kind::kCritical, level}; }

  std::string describe() const;
  bool check(double estimate, double std_error, double target) const;
};

struct Estimate {
  std::string label;
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

struct Target {
  std::string label;
  double value = 0.0;
  Provenance provenance = Provenance::kDerived;
};

struct Verdict {
  std::string estimate;
  std::string target;
  std::string rule;
  bool pass = false;
  bool informational = false;  // reported alongside a target but not judged
};

struct StatReport {
  std::string name;
  std::vector<Estimate> estimates;
  std::vector<Target> targets;
  std::vector<Verdict> verdicts;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;

  const Estimate& estimate(const std::string& label) const;
  const Target& target(const std::string& label) const;
  bool all_pass() const;

  // Records an estimate, its target and the verdict of rule applied to them.
  bool compare(Estimate e, Target t, Rule rule);
  // Records an estimate next to a reference value without a verdict.
  void note(Estimate e, Target t);
};

void write_csv_header(std::ostream& os);
void write_csv(std::ostream& os, const StatReport& r);

// Running mean and variance, mergeable in any order.
class MeanVar {
 public:
  void add(double x);
  void merge(const MeanVar& other);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MeanVar summarize(std::span<const double> xs);

struct MomentResult {
  Estimate estimate;
  bool pass = false;
  std::string rule;
};

// Sample p-th moment against target; needs at least 30 samples. When every
// sample gives the same x^p the standard error is 0 and the rule degrades to exact match.
MomentResult moment_test(std::span<const double> samples, double p, double target, Rule rule,
                         const std::string& label = "moment");

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

// Two-sample Kolmogorov-Smirnov at the 1% level (both samples >= 100).
KsResult ks_test(std::span<const double> a, std::span<const double> b);
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct GofResult {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;
  bool pass = false;
};

// Pearson chi-square at the 1% level; every expected count must be >= 5.
GofResult multinomial_gof(std::span<const std::int64_t> counts, std::span<const double> probs);

}  // namespace srt
