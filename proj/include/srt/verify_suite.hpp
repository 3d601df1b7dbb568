#pragma once

// The statistical self-check suite behind `stabletree verify`. Each case is a
// deterministic function of its seed returning a StatReport; the runner
// executes the cases in parallel and sorts the reports by name.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srt/concat.hpp"
#include "srt/exec.hpp"
#include "srt/stats.hpp"

namespace srt {

enum class Suite { kQuick, kFull };

Suite parse_suite(const std::string& name);

struct SuiteCase {
  std::string name;
  // Runs the case. The Exec policy applies to the replicate loops inside it.
  std::function<StatReport(std::uint64_t seed, Exec exec)> run;
  bool monte_carlo = true;  // deterministic cases are never retried
};

std::vector<SuiteCase> suite_cases(Suite suite);

// Seed used for the single retry of a failed case.
std::uint64_t retry_seed(std::uint64_t seed);

struct SuiteResult {
  std::vector<StatReport> reports;  // sorted by name
  std::vector<std::string> retried;
  bool all_pass() const;
};

SuiteResult run_suite(Suite suite, std::uint64_t seed, bool retry_once, Exec exec = Exec::kParallel);

// Small random inputs shared by the concatenation and distance checks.
MetricTree random_small_tree(CounterRng& rng, int max_nodes, bool with_mass, bool marked = true);
ConcatInput random_concat_input(CounterRng& rng, int max_atoms, int max_nodes, bool with_mass);

}  // namespace srt
