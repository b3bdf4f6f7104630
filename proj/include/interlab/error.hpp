#pragma once

#include <stdexcept>
#include <string>

namespace interlab {

// Bad caller input: out-of-range parameter, malformed config, mismatched sizes.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Internal failure: certified truncation not reachable, I/O problem, broken state.
class RuntimeFailure : public std::runtime_error {
 public:
  explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace interlab
