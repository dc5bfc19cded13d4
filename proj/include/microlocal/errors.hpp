#pragma once

#include <stdexcept>
#include <string>

namespace microlocal {

// Bad shapes, out-of-range parameters, malformed files. The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A norm or intermediate quantity left the representable range. CLI exit code 3.
class NumericOverflow : public std::overflow_error {
 public:
  explicit NumericOverflow(const std::string& what) : std::overflow_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace microlocal
