#ifndef WV_ERRORS_HPP
#define WV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wv {

// Exit-code contract: 0 ok, 2 bad config, 3 numerical breakdown, 4 resolution guard.
struct ConfigError : std::runtime_error {
  static constexpr int exit_code = 2;
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Degeneracy of the nonlinear factor, iteration failures, NaNs, trapped rays.
struct NumericalBreakdown : std::runtime_error {
  static constexpr int exit_code = 3;
  explicit NumericalBreakdown(const std::string& m) : std::runtime_error(m) {}
};

// A discretization cannot resolve the requested scales (e.g. beam oscillation vs
// finite-difference step); refusing beats returning garbage.
struct ResolutionGuard : std::runtime_error {
  static constexpr int exit_code = 4;
  explicit ResolutionGuard(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace wv

#endif
