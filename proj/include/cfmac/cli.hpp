#ifndef CFMAC_CLI_HPP_
#define CFMAC_CLI_HPP_

#include <ostream>

namespace cfmac {

// Exit codes: 0 success, 1 configuration or usage error, 2 numerical
// precondition failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cfmac

#endif  // CFMAC_CLI_HPP_
