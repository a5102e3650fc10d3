#pragma once

#include <stdexcept>
#include <string>

namespace mcdiag {

// Failure taxonomy shared by the whole library. The extern-C layer maps
// these one-to-one onto mcd_status codes, so values must stay stable.
enum class Errc {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  shape_mismatch = 4,
  degenerate = 5,    // zero within-chain variance and friends
  singular = 6,      // matrix not positive definite where PD is required
  unrepairable = 7,  // indefinite long-run estimate that the clamp cannot fix
  domain = 8,        // numeric routine left its supported domain / no convergence
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mcdiag
