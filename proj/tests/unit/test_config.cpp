#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "srt/config.hpp"
#include "srt/errors.hpp"

using namespace srt;
using nlohmann::json;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  const std::string path = "config_test_" + name + ".json";
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> offending(const std::string& command, const json& file, const json& flags) {
  try {
    merge_config(command, file, flags);
  } catch (const ConfigError& e) {
    return e.keys();
  }
  return {};
}

}  // namespace

TEST_CASE("empty file plus flags") {
  const std::string path = temp_file("empty", "");
  const RunConfig c = load_config(path, "marchal", {{"alpha", 2.0}, {"n", 5}, {"seed", 7}});
  CHECK(c.number("alpha") == 2.0);
  CHECK(c.integer("n") == 5);
  CHECK(c.seed == 7);
  CHECK(c.out == "-");
  std::remove(path.c_str());
}

TEST_CASE("flags take precedence over the file") {
  const std::string path = temp_file("alpha", R"({"alpha": 1.5, "n": 12})");
  const RunConfig c = load_config(path, "marchal", {{"alpha", 2.0}});
  CHECK(c.number("alpha") == 2.0);
  CHECK(c.integer("n") == 12);
  std::remove(path.c_str());
}

TEST_CASE("schema and domain violations list their keys") {
  CHECK(offending("marchal", {{"alpha", 2.5}}, json::object()) == std::vector<std::string>{"alpha"});
  CHECK(offending("marchal", {{"colour", 1}}, json::object()) == std::vector<std::string>{"colour"});
  CHECK(offending("marchal", {{"n", "ten"}}, json::object()) == std::vector<std::string>{"n"});
  CHECK(offending("rde", {{"xi", "stable:3"}, {"mode", "skeleton:9"}}, json::object()) ==
        std::vector<std::string>{"xi", "mode"});
  CHECK(offending("ghdist", json::object(), json::object()) == std::vector<std::string>{"a", "b"});
  CHECK(offending("verify", {{"suite", "huge"}}, json::object()) == std::vector<std::string>{"suite"});
  CHECK_THROWS_AS(parse_flag_value("marchal", "alpha", "2x"), ConfigError);
  CHECK(parse_flag_value("verify", "seed", "18446744073709551615").get<std::uint64_t>() == 18446744073709551615ULL);
  const std::string bad = temp_file("bad", "{not json");
  CHECK_THROWS_AS(read_config_file(bad), ConfigError);
  std::remove(bad.c_str());
}
