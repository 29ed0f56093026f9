#ifndef CFMAC_ERRORS_HPP_
#define CFMAC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cfmac {

// Malformed input: bad schema, shapes, or parameters. CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition did not hold (no root in bracket, zeta <= 0,
// support violation, budget exceeded). CLI exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfmac

#endif  // CFMAC_ERRORS_HPP_
