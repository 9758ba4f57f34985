#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dterm {

/// Dense zero-based agent index, stable for the lifetime of a scenario.
using AgentId = std::size_t;

/// Iteration counter. Signed so that window arithmetic such as t - D stays well defined.
using Iteration = std::int64_t;

/// Fixed-length 0/1 vector indexed by AgentId.
using StatusBits = std::vector<std::uint8_t>;

/// Thrown when a caller violates an operation's precondition (bad id, malformed inbox, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a scenario or graph fails validation. `assumption` names the violated
/// modelling assumption when there is one ("A1", "A3", ...), otherwise it is empty.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string assumption, const std::string& what)
      : std::runtime_error(assumption.empty() ? what : assumption + ": " + what),
        assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

inline bool all_set(const StatusBits& bits) {
  for (auto b : bits) {
    if (b == 0) return false;
  }
  return true;
}

inline std::size_t count_set(const StatusBits& bits) {
  std::size_t n = 0;
  for (auto b : bits) n += (b != 0);
  return n;
}

inline std::string to_bit_string(const StatusBits& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) s[k] = '1';
  }
  return s;
}

}  // namespace dterm
