#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace srt {

// Precondition on a value violated (bad node index, parameter out of range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input too large for an exact search or a node-count guard.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Bisection found no sign change on (0,1).
class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schema or domain violation in a run configuration; lists the offending keys.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys)
      : std::runtime_error(what), keys_(std::move(keys)) {}
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace srt
