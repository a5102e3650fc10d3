#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "core/chains.hpp"
#include "core/logistic.hpp"
#include "core/rng.hpp"

namespace mcdiag {

struct Ar1Target {
  double rho = 0.0;  // |rho| < 1
  double nu = 1.0;   // innovation sd, > 0
};

struct TTarget {
  double df = 5.0;
};

struct BimodalTarget {
  double weight1 = 0.5;  // mass of the first component, in (0, 1)
  double mean1 = 0.0, var1 = 1.0;
  double mean2 = 0.0, var2 = 1.0;
};

struct LogisticTarget {
  std::shared_ptr<const Matrix> x;            // n x p design, intercept included
  std::shared_ptr<const std::vector<int>> y;  // n responses in {0, 1}
  double prior_var = 100.0;                   // spherical normal prior on beta
};

using Target = std::variant<Ar1Target, TTarget, BimodalTarget, LogisticTarget>;

struct StartSpec {
  enum class Kind { stationary, fixed, t_dist, normal_dist, mle_spread };
  Kind kind = Kind::stationary;
  Matrix values;      // fixed: m x p
  double t_df = 2.0;  // t_dist
  double mean = 0.0, var = 1.0;  // normal_dist
  double span = 3.0;  // mle_spread: start offsets in units of MLE standard error
};

struct SamplerSpec {
  Target target;
  double proposal_var = 1.0;  // random-walk proposal variance (MH targets)
  std::size_t m = 1;
  std::uint64_t seed = 0;
  StartSpec start;
};

std::size_t target_dimension(const Target& t);

// Log target density up to the additive constants shown below: t and bimodal
// carry their full normalizing constants, the logistic posterior is
// unnormalized (likelihood + prior). AR(1) is not an MH target and throws.
double log_density(const SamplerSpec& spec, std::span<const double> x);

// Parse / serialize the JSON sampler description used by the C layer.
SamplerSpec sampler_spec_from_json(const std::string& text);

// Growing chains with per-chain substreams; extending and regenerating give
// identical samples because each chain replays one deterministic stream.
// Row 1 of every chain is the initial state, the remaining rows are updates.
class SamplerRun {
 public:
  explicit SamplerRun(SamplerSpec spec);

  void extend_to(std::size_t n);
  std::size_t length() const { return len_; }
  std::size_t dimension() const { return p_; }
  const SamplerSpec& spec() const { return spec_; }
  ChainSet snapshot() const;
  // Accepted proposals / (length - 1) per chain; all-ones for AR(1).
  std::vector<double> acceptance_rates() const;

 private:
  struct ChainState {
    Rng rng;
    std::vector<double> x;
    double logf = 0.0;
    std::size_t accepted = 0;
    std::vector<double> samples;
  };

  void advance(ChainState& st) const;

  SamplerSpec spec_;
  std::size_t p_ = 1;
  std::size_t len_ = 0;
  double proposal_sd_ = 1.0;
  bool is_ar1_ = false;
  std::vector<ChainState> states_;
};

struct GenResult {
  ChainSet chains;
  std::vector<double> acceptance;
};

// Pure function of (spec, n): same spec and n give bit-identical chains.
GenResult generate(const SamplerSpec& spec, std::size_t n);

// Closed-form AR(1) quantities: stationary variance, the length-n average
// long-run variance by direct summation, its limit, and the PSRF a perfectly
// estimated sigma_hat_L would produce at length n.
struct Ar1Truth {
  double sigma2 = 0.0;
  double tau2_n = 0.0;
  double tau2_inf = 0.0;
  double psrf = 0.0;
};
Ar1Truth ar1_truth(double rho, double nu, std::size_t n);

}  // namespace mcdiag
