#include <doctest.h>

#include <sstream>

#include "srt/errors.hpp"
#include "srt/rng.hpp"
#include "srt/stats.hpp"
#include "srt/verify_suite.hpp"

using namespace srt;

namespace {

std::vector<double> uniforms(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  CounterRng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = uniform01(rng) + shift;
  return xs;
}

}  // namespace

TEST_CASE("moment test examples") {
  const std::vector<double> constant(50, 0.7);
  const MomentResult c = moment_test(constant, 1.0, 0.7, Rule::sigma(3.0));
  CHECK(c.pass);
  CHECK(c.estimate.std_error == 0.0);
  CHECK_FALSE(moment_test(constant, 1.0, 0.71, Rule::sigma(3.0)).pass);
  std::vector<double> grid(10000);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (static_cast<double>(i) + 0.5) / 10000.0;
  CHECK(moment_test(grid, 1.0, 0.5, Rule::sigma(3.0)).pass);
  CHECK_FALSE(moment_test(uniforms(2, 100000), 1.0, 0.6, Rule::sigma(3.0)).pass);
  CHECK(moment_test(uniforms(3, 10000), 2.0, 1.0 / 3, Rule::relative(0.05)).pass);
  CHECK_THROWS_AS(moment_test(std::vector<double>(29, 1.0), 1.0, 1.0, Rule::sigma(3.0)), SizeError);
}

TEST_CASE("KS examples") {
  const auto a = uniforms(4, 1000);
  CHECK(ks_statistic(a, a) == 0.0);
  CHECK(ks_test(uniforms(5, 10000), uniforms(6, 10000)).pass);
  CHECK_FALSE(ks_test(uniforms(7, 10000), uniforms(8, 10000, 0.2)).pass);
  CHECK_THROWS_AS(ks_test(uniforms(1, 99), a), SizeError);
}

TEST_CASE("multinomial goodness of fit examples") {
  const std::vector<std::int64_t> counts{250, 250, 500};
  const std::vector<double> probs{0.25, 0.25, 0.5};
  CHECK(multinomial_gof(counts, probs).statistic == 0.0);
  CHECK(multinomial_gof(counts, probs).pass);
  const std::vector<double> wrong{0.4, 0.3, 0.3};
  CHECK_FALSE(multinomial_gof(counts, wrong).pass);
  const std::vector<std::int64_t> few{2, 3};
  const std::vector<double> half{0.5, 0.5};
  CHECK_THROWS_AS(multinomial_gof(few, half), SizeError);
}

TEST_CASE("report CSV layout") {
  StatReport r;
  r.name = "demo";
  r.compare({"est", 1.0, 0.1, 100}, {"tgt", 1.05, Provenance::kPaper}, Rule::sigma(3.0));
  r.note({"aside", 2.0, 0.0, 1}, {"ref", 2.5, Provenance::kTrivial});
  CHECK(r.all_pass());
  std::ostringstream os;
  write_csv_header(os);
  write_csv(os, r);
  const std::string text = os.str();
  CHECK(text.rfind("test,label,estimate,stderr,n,target,provenance,rule,verdict\n", 0) == 0);
  CHECK(text.find("demo,est,1,0.10000000000000001,100,1.05,PAPER,3sigma,pass") != std::string::npos);
  CHECK(text.find(",TRIVIAL,report,info") != std::string::npos);
}

TEST_CASE("suite runner is deterministic and sorted") {
  const SuiteResult a = run_suite(Suite::kQuick, 42, false), b = run_suite(Suite::kQuick, 42, false, Exec::kSerial);
  REQUIRE(a.reports.size() == 12);
  std::ostringstream sa, sb;
  for (const auto& r : a.reports) write_csv(sa, r);
  for (const auto& r : b.reports) write_csv(sb, r);
  CHECK(sa.str() == sb.str());
  for (std::size_t i = 1; i < a.reports.size(); ++i) CHECK(a.reports[i - 1].name < a.reports[i].name);
  for (const auto& r : a.reports) {
    std::int64_t judged = 0;
    for (const auto& v : r.verdicts) judged += !v.informational;
    CHECK(judged >= 1);
  }
  CHECK(retry_seed(42) != 42);
}
