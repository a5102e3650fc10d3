#pragma once

#include "core/mcvar.hpp"

namespace mcdiag {

// Sample-size prescription for a (1-alpha) confidence region with relative
// volume tolerance epsilon in p dimensions, and the PSRF cutoff it implies
// for m chains.
struct EssThreshold {
  double alpha = 0.0;
  double epsilon = 0.0;
  std::size_t p = 0;
  std::size_t m = 0;
  double min_ess = 0.0;         // raw prescription M
  double min_ess_ceiled = 0.0;  // ceil(M), the integer effort floor
  double delta = 0.0;           // sqrt(1 + m/M), computed from the raw M
};

// Quantile of the chi-square distribution: smallest q with CDF(q) = prob.
// Newton iteration on the regularized incomplete gamma with a bracketing
// bisection safeguard; absolute accuracy ~1e-12.
double chi2_quantile(double prob, double df);

// M_{alpha, eps, p} = 2^{2/p} pi / (p Gamma(p/2))^{2/p} * chi2_{1-alpha, p} / eps^2.
double min_ess(double alpha, double epsilon, std::size_t p);

EssThreshold delta_threshold(double alpha, double epsilon, std::size_t p, std::size_t m);

struct EssEstimate {
  double ess = 0.0;
  bool psd_repaired = false;
  ResolvedBatch batch;
};

// ESS = m*n * (det S / det T_L)^{1/p}, evaluated through log-dets on the
// repaired lugsail matrix.
EssEstimate ess_estimate(const ChainSet& cs, const BatchConfig& cfg);

}  // namespace mcdiag
