#pragma once

#include <stdexcept>
#include <string>

namespace scmm {

// Bad input: malformed config, broken invariant, domain violation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation could not deliver its contract (nonconvergence, infeasible structure,
// under-resolved discretization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scmm
