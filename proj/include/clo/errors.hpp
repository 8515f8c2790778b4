#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clo {

/// Raised when an invariant that a caller must uphold is broken, e.g. an
/// action that pops from an empty FIFO or a loss outside [0, 1].
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A single configuration problem, located by a dotted field path.
struct ConfigIssue {
  std::string path;
  std::string message;
};

/// Carries every configuration problem found in one validation pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  ConfigError(std::string path, std::string message);

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace clo
