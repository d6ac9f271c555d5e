#pragma once

#include <stdexcept>
#include <string>

namespace damctl {

// Bad user input: parameters outside a documented domain.
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested formula does not apply to the load regime of the inputs
// (e.g. asking for the supercritical root when rho1 <= 1).
class regime_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A computation could not be carried out in floating point
// (vanishing pivot in the recurrence, non-finite intermediate, ...).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw invalid_argument(what);
}

}  // namespace detail
}  // namespace damctl
