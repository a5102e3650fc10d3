#pragma once

#include "core/chains.hpp"
#include "core/matrix.hpp"

namespace mcdiag {

enum class BatchPolicy { sqrt_n, cube_root, explicit_b };

struct BatchConfig {
  BatchPolicy policy = BatchPolicy::sqrt_n;
  std::size_t batch = 0;  // explicit_b only
};

struct ResolvedBatch {
  std::size_t b = 0;  // batch length
  std::size_t a = 0;  // batches per chain, floor(n/b)
};

// b = floor(n^{1/2}) / floor(n^{1/3}) / explicit. Requires 1 <= b <= n.
ResolvedBatch resolve_batches(const BatchConfig& cfg, std::size_t n);

enum class VarKind { between, rbm, lugsail };

struct VarianceEstimate {
  VarKind kind{};
  SymMatrix value;          // B, tau^2_b, or tau^2_L (p x p; 1 x 1 when p = 1)
  std::size_t m = 0, n = 0;
  ResolvedBatch batch;        // rbm / lugsail
  ResolvedBatch batch_third;  // lugsail: the max(1, b/3) pass
  SymMatrix base, third;      // lugsail components, kept for audit
  bool psd_repaired = false;  // set when a consumer clamps `value`
};

// n * between-chain sample covariance of the chain means:
// B with B/n = (m-1)^{-1} sum_i (mean_i - grand)(mean_i - grand)^T.
VarianceEstimate between_chain(const ChainSet& cs);

// Replicated batch means: nonoverlapping batches of length b, a = floor(n/b)
// per chain, all centered at the grand mean of the FULL chains:
// tau^2_b = b/(a*m - 1) * sum_{i,k} (bm_{ik} - grand)(bm_{ik} - grand)^T.
// Iterations beyond a*b contribute to the grand mean only.
VarianceEstimate replicated_batch_means(const ChainSet& cs, const BatchConfig& cfg);

// Lugsail combination 2*tau^2_b - tau^2_{max(1, floor(b/3))}. May be
// indefinite for p > 1 (or negative for p = 1); consumers needing a
// determinant repair it first.
VarianceEstimate replicated_lugsail(const ChainSet& cs, const BatchConfig& cfg);

// Pooled long-run variance estimates:
//   sigma_hat   = ((n-1)/n) S + B/n
//   sigma_hat_L = ((n-1)/n) S + T_L/n
SymMatrix sigma_hat(const SymMatrix& s, const SymMatrix& b, std::size_t n);
SymMatrix sigma_hat_L(const SymMatrix& s, const SymMatrix& t_lug, std::size_t n);

// Replication gain of the pooled estimator over a single-chain lugsail with
// the same total budget: m*a / (3*(m-1)). Requires m >= 2, a >= 1.
double relative_efficiency(std::size_t m, std::size_t a);

// Shared state for the determinant-based consumers (ESS and the det PSRF):
// both must see the same repaired lugsail matrix and the same log-dets or
// their exact algebraic relation breaks.
struct LugsailDet {
  ChainSummary summary;
  VarianceEstimate lug;   // value already repaired when repair was needed
  double log_det_s = 0.0;
  double log_det_t = 0.0;
};
LugsailDet lugsail_det(const ChainSet& cs, const BatchConfig& cfg);

}  // namespace mcdiag
