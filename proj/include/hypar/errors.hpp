#pragma once

#include <stdexcept>
#include <string>

namespace hypar {

// Error taxonomy mirrored by the CLI exit codes:
//   input_error      -> 2  (malformed files, bad flags, broken config)
//   invariant_error  -> 3  (a structural invariant was violated; a bug)
//   numeric_error    -> 4  (a numeric guard rejected the request)
//   suite_error      -> 5  (an assertion embedded in a suite run failed)

struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

struct invariant_error : std::logic_error {
  explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

struct suite_error : std::runtime_error {
  explicit suite_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw invariant_error(msg);
}

}  // namespace hypar
