#pragma once

// Run configurations for the command-line tool: a JSON object of parameters
// per command, merged from a config file and explicit flags (flags win),
// checked against a per-command schema and filled with defaults.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace srt {

enum class ParamType { kNumber, kInteger, kString, kBool };

struct ParamSpec {
  std::string key;
  ParamType type;
  nlohmann::json fallback;  // null means no default
  std::string help;
};

// Parameters understood by a command ("marchal", "rde", ...), including the
// shared seed/out/format/threads keys.
const std::vector<ParamSpec>& command_schema(const std::string& command);
std::vector<std::string> command_names();

struct RunConfig {
  std::string command;
  nlohmann::json params;  // every schema key, defaults filled
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format;

  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;
};

// Parses a JSON config file; an empty file is an empty object.
nlohmann::json read_config_file(const std::string& path);

// Converts a flag string to the schema type of key; throws ConfigError.
nlohmann::json parse_flag_value(const std::string& command, const std::string& key, const std::string& text);

// Schema and domain validation; ConfigError lists every offending key.
RunConfig merge_config(const std::string& command, const nlohmann::json& file, const nlohmann::json& flags);

RunConfig load_config(const std::string& path, const std::string& command, const nlohmann::json& flags);

}  // namespace srt
