#pragma once

#include <stdexcept>
#include <string>

namespace conemult {

/// Raised when an input violates an operation's mathematical precondition.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a computation would exceed its configured numerical budget
/// (quadrature node caps, grid sizes, FFT lengths).
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw domain_error(what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

}  // namespace detail
}  // namespace conemult
