#pragma once

#include <vector>

#include "core/mcvar.hpp"

namespace mcdiag {

enum class StatKind { classic, lugsail };
enum class PsrfScope { univariate, multivariate_det, multivariate_maxeig };

struct PsrfReport {
  StatKind kind{};
  PsrfScope scope{};
  double value = 0.0;
  std::size_t m = 0, n = 0, p = 0;
  int component = -1;       // >= 0 when the report is for one component of a wider set
  SymMatrix within;         // S (1x1 for univariate)
  SymMatrix correction;     // B or the (possibly repaired) lugsail matrix
  SymMatrix sigma2;         // pooled long-run variance estimate
  ResolvedBatch batch;      // zeros for classic
  bool psd_repaired = false;
  bool rank_warning = false;            // between-chain matrix has rank < p (m <= p)
  std::vector<double> component_values; // per-component univariate statistic, p entries
};

// sqrt(sigma_hat^2 / s^2) with sigma_hat^2 = ((n-1)/n) s^2 + B/n. p == 1.
PsrfReport psrf_classic(const ChainSet& cs);
PsrfReport psrf_classic_component(const ChainSet& cs, std::size_t k);

// sqrt(((n-1)/n + tau^2_L / (n s^2))). p == 1, works for m == 1.
PsrfReport psrf_lugsail(const ChainSet& cs, const BatchConfig& cfg);
PsrfReport psrf_lugsail_component(const ChainSet& cs, const BatchConfig& cfg, std::size_t k);

// sqrt((n-1)/n + lambda_max(S^{-1} B)/n). p >= 2, m >= 2.
PsrfReport psrf_multivariate_classic(const ChainSet& cs);

// sqrt((n-1)/n + det(S^{-1} T_L)^{1/p}/n), evaluated through log-dets.
// p == 1 delegates to the scalar path and returns its report unchanged.
PsrfReport psrf_multivariate_lugsail(const ChainSet& cs, const BatchConfig& cfg);

}  // namespace mcdiag
