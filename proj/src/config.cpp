#include "srt/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "srt/errors.hpp"

namespace srt {

namespace {

using nlohmann::json;

std::vector<ParamSpec> with_common(std::vector<ParamSpec> specs, const std::string& format) {
  specs.push_back({"seed", ParamType::kInteger, 42, "master seed (unsigned 64-bit)"});
  specs.push_back({"out", ParamType::kString, "-", "output path, - for standard output"});
  specs.push_back({"format", ParamType::kString, format, "output format: json or csv"});
  specs.push_back({"threads", ParamType::kInteger, 0, "OpenMP threads (0: RDE_THREADS or the runtime default)"});
  return specs;
}

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>> s = {
      {"marchal",
       with_common({{"action", ParamType::kString, "grow", "grow, shapes, spine or decompose"},
                    {"alpha", ParamType::kNumber, 1.5, "stability index in (1,2]"},
                    {"n", ParamType::kInteger, 10, "number of leaves"},
                    {"reps", ParamType::kInteger, 1000, "replicates (spine)"}},
                   "json")},
      {"urn", with_common({{"gamma", ParamType::kString, "0.5,0.5,0.5,0.5", "comma-separated initial weights"},
                           {"step", ParamType::kNumber, 1.5, "reinforcement per draw"},
                           {"n", ParamType::kInteger, 1000, "number of draws"},
                           {"reps", ParamType::kInteger, 1, "replicates"}},
                          "json")},
      {"crp", with_common({{"beta", ParamType::kNumber, 0.5, "discount in [0,1)"},
                           {"theta", ParamType::kNumber, 0.5, "concentration > -beta"},
                           {"n", ParamType::kInteger, 1000, "customers"},
                           {"reps", ParamType::kInteger, 1, "replicates"}},
                          "json")},
      {"xi", with_common({{"alpha", ParamType::kNumber, 1.5, "stability index in (1,2]"},
                          {"eps", ParamType::kNumber, 1e-6, "stick-breaking truncation"},
                          {"reps", ParamType::kInteger, 1, "number of sequences"}},
                         "json")},
      {"concat", with_common({{"input", ParamType::kString, nullptr, "concat-input-v1 JSON file"}}, "json")},
      {"ghdist", with_common({{"a", ParamType::kString, nullptr, "first rtree-v1 file"},
                              {"b", ParamType::kString, nullptr, "second rtree-v1 file"},
                              {"marked", ParamType::kBool, false, "pin the marked points"},
                              {"max_nodes", ParamType::kInteger, 7, "size cap for the exact search"}},
                             "json")},
      {"rde", with_common({{"action", ParamType::kString, "iterate", "iterate, martingale, attract, string or calibrate"},
                           {"xi", ParamType::kString, "stable:1.5", "stable:ALPHA or custom:FILE"},
                           {"init", ParamType::kString, "segment:1.0", "segment:C, exp:M or file:F"},
                           {"depth", ParamType::kInteger, 4, "iteration depth"},
                           {"mode", ParamType::kString, "full", "full, spine or skeleton:K"},
                           {"reps", ParamType::kInteger, 1000, "replicates"},
                           {"m", ParamType::kInteger, 2, "string splitting depth"},
                           {"levels", ParamType::kInteger, 2, "bead replacement levels"},
                           {"tol", ParamType::kNumber, 1e-4, "calibration tolerance"},
                           {"eps", ParamType::kNumber, 1e-6, "stick-breaking truncation"}},
                          "csv")},
      {"verify", with_common({{"suite", ParamType::kString, "quick", "quick or full"},
                              {"retry_once", ParamType::kBool, false, "rerun failed cases once with a derived seed"}},
                             "csv")},
  };
  return s;
}

const ParamSpec* find_spec(const std::string& command, const std::string& key) {
  for (const auto& p : command_schema(command))
    if (p.key == key) return &p;
  return nullptr;
}

bool type_ok(ParamType t, const json& v) {
  switch (t) {
    case ParamType::kNumber: return v.is_number();
    case ParamType::kInteger:
      return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
    case ParamType::kString: return v.is_string();
    case ParamType::kBool: return v.is_boolean();
  }
  return false;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

bool parse_positive(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    return used == s.size() && v > 0.0 && std::isfinite(v);
  } catch (const std::exception&) {
    return false;
  }
}

// Domain checks; returns the offending keys.
std::vector<std::string> domain_violations(const std::string& cmd, const json& p) {
  std::vector<std::string> bad;
  auto num = [&](const char* k) { return p.at(k).get<double>(); };
  auto in = [&](const char* k, bool ok) {
    if (p.contains(k) && !ok) bad.emplace_back(k);
  };
  if (p.contains("alpha")) in("alpha", num("alpha") > 1.0 && num("alpha") <= 2.0);
  if (p.contains("n")) in("n", num("n") >= 1);
  if (p.contains("reps")) in("reps", num("reps") >= 1);
  if (p.contains("eps")) in("eps", num("eps") > 0.0 && num("eps") < 1.0);
  if (p.contains("threads")) in("threads", num("threads") >= 0);
  if (p.contains("seed")) in("seed", p.at("seed").is_number_unsigned() || num("seed") >= 0);
  if (p.contains("format")) {
    const auto f = p.at("format").get<std::string>();
    in("format", f == "json" || f == "csv");
  }
  if (cmd == "marchal") {
    const auto a = p.at("action").get<std::string>();
    in("action", a == "grow" || a == "shapes" || a == "spine" || a == "decompose");
    if (a == "shapes") in("n", num("n") <= 10);
  }
  if (cmd == "urn") {
    in("step", num("step") > 0.0);
    std::stringstream ss(p.at("gamma").get<std::string>());
    std::string item;
    int count = 0;
    bool ok = true;
    while (std::getline(ss, item, ',')) {
      ++count;
      ok = ok && parse_positive(item);
    }
    in("gamma", ok && count >= 2);
  }
  if (cmd == "crp") {
    in("beta", num("beta") >= 0.0 && num("beta") < 1.0);
    in("theta", num("theta") > -num("beta"));
  }
  if (cmd == "ghdist") in("max_nodes", num("max_nodes") >= 1);
  if (cmd == "rde") {
    const auto a = p.at("action").get<std::string>();
    in("action", a == "iterate" || a == "martingale" || a == "attract" || a == "string" || a == "calibrate");
    const auto xi = p.at("xi").get<std::string>();
    bool xi_ok = starts_with(xi, "custom:") && xi.size() > 7;
    if (starts_with(xi, "stable:")) {
      const std::string v = xi.substr(7);
      xi_ok = parse_positive(v) && std::stod(v) > 1.0 && std::stod(v) <= 2.0;
    }
    in("xi", xi_ok);
    const auto init = p.at("init").get<std::string>();
    bool init_ok = starts_with(init, "file:") && init.size() > 5;
    if (starts_with(init, "segment:")) init_ok = parse_positive(init.substr(8));
    if (starts_with(init, "exp:")) init_ok = parse_positive(init.substr(4));
    in("init", init_ok);
    in("depth", num("depth") >= 0 && num("depth") <= 30);
    const auto mode = p.at("mode").get<std::string>();
    bool mode_ok = mode == "full" || mode == "spine";
    if (starts_with(mode, "skeleton:")) {
      const std::string k = mode.substr(9);
      mode_ok = !k.empty() && k.find_first_not_of("0123456789") == std::string::npos && std::stol(k) <= num("depth");
    }
    in("mode", mode_ok);
    in("m", num("m") >= 0 && num("m") <= 20);
    in("levels", num("levels") >= 0 && num("levels") <= 10);
    in("tol", num("tol") > 0.0 && num("tol") < 0.5);
  }
  if (cmd == "verify") {
    const auto s = p.at("suite").get<std::string>();
    in("suite", s == "quick" || s == "full");
  }
  return bad;
}

std::string join(const std::vector<std::string>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
  return s;
}

}  // namespace

const std::vector<ParamSpec>& command_schema(const std::string& command) {
  const auto& s = schemas();
  const auto it = s.find(command);
  if (it == s.end()) throw ConfigError("unknown command '" + command + "'", {command});
  return it->second;
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : schemas()) names.push_back(k);
  return names;
}

double RunConfig::number(const std::string& key) const { return params.at(key).get<double>(); }

std::int64_t RunConfig::integer(const std::string& key) const {
  const auto& v = params.at(key);
  return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}

std::string RunConfig::text(const std::string& key) const { return params.at(key).get<std::string>(); }

bool RunConfig::flag(const std::string& key) const { return params.at(key).get<bool>(); }

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path, {});
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object", {});
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what(), {});
  }
}

json parse_flag_value(const std::string& command, const std::string& key, const std::string& text) {
  const ParamSpec* spec = find_spec(command, key);
  if (!spec) throw ConfigError("unknown parameter " + key, {key});
  try {
    std::size_t used = 0;
    switch (spec->type) {
      case ParamType::kString: return text;
      case ParamType::kBool:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
      case ParamType::kInteger:
        if (!text.empty() && text[0] != '-') {
          const unsigned long long v = std::stoull(text, &used);
          if (used == text.size()) return v;
        } else {
          const long long v = std::stoll(text, &used);
          if (used == text.size()) return v;
        }
        break;
      case ParamType::kNumber: {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
        break;
      }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("bad value '" + text + "' for " + key, {key});
}

RunConfig merge_config(const std::string& command, const json& file, const json& flags) {
  const auto& schema = command_schema(command);
  std::vector<std::string> bad;
  json params = json::object();
  for (const json* src : {&file, &flags}) {
    if (src->is_null()) continue;
    if (!src->is_object()) throw ConfigError("configuration must be a JSON object", {});
    for (const auto& [k, v] : src->items()) {
      const ParamSpec* spec = find_spec(command, k);
      if (!spec || !type_ok(spec->type, v)) {
        bad.push_back(k);
        continue;
      }
      params[k] = v;
    }
  }
  for (const auto& spec : schema) {
    if (params.contains(spec.key)) continue;
    if (spec.fallback.is_null()) {
      bad.push_back(spec.key);
      continue;
    }
    params[spec.key] = spec.fallback;
  }
  if (bad.empty()) bad = domain_violations(command, params);
  if (!bad.empty()) throw ConfigError("invalid configuration for " + command + ": " + join(bad), bad);
  RunConfig cfg;
  cfg.command = command;
  cfg.params = params;
  const auto& seed = params.at("seed");
  cfg.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>() : static_cast<std::uint64_t>(seed.get<double>());
  cfg.out = params.at("out").get<std::string>();
  cfg.format = params.at("format").get<std::string>();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command, const json& flags) {
  return merge_config(command, path.empty() ? json::object() : read_config_file(path), flags);
}

}  // namespace srt
