#include "core/mcvar.hpp"

#include <cmath>
#include <string>

#include "core/linalg.hpp"

namespace mcdiag {

namespace {

constexpr double kRepairFloor = 1e-12;  // relative to trace

std::size_t floor_root(std::size_t n, int k) {
  // Integer floor of n^{1/k}; the float estimate is corrected to be exact.
  auto pow_k = [&](std::size_t b) {
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) r *= b;
    return r;
  };
  std::size_t b = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / k)));
  if (b < 1) b = 1;
  while (b > 1 && pow_k(b) > n) --b;
  while (pow_k(b + 1) <= n) ++b;
  return b;
}

// Grand mean over all m*n iterations.
std::vector<double> grand_mean(const ChainSet& cs) {
  const std::size_t m = cs.chains(), n = cs.iterations(), p = cs.dimension();
  std::vector<double> g(p, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = cs.row(i, t);
      for (std::size_t k = 0; k < p; ++k) g[k] += row[k];
    }
  for (double& v : g) v /= static_cast<double>(m * n);
  return g;
}

}  // namespace

ResolvedBatch resolve_batches(const BatchConfig& cfg, std::size_t n) {
  if (n < 1) fail(Errc::invalid_argument, "resolve_batches: empty chains");
  std::size_t b = 0;
  switch (cfg.policy) {
    case BatchPolicy::sqrt_n: b = floor_root(n, 2); break;
    case BatchPolicy::cube_root: b = floor_root(n, 3); break;
    case BatchPolicy::explicit_b: b = cfg.batch; break;
  }
  if (b < 1) fail(Errc::invalid_argument, "resolve_batches: batch length must be >= 1");
  if (b > n)
    fail(Errc::invalid_argument, "resolve_batches: batch length " + std::to_string(b) +
                                     " exceeds chain length " + std::to_string(n));
  return {b, n / b};
}

VarianceEstimate between_chain(const ChainSet& cs) {
  const std::size_t m = cs.chains(), n = cs.iterations(), p = cs.dimension();
  if (m < 2) fail(Errc::invalid_argument, "between_chain: needs at least two chains");

  Matrix means(m, p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < n; ++t) {
      const auto row = cs.row(i, t);
      for (std::size_t k = 0; k < p; ++k) means(i, k) += row[k];
    }
  for (double& v : means.data) v /= static_cast<double>(n);

  std::vector<double> g(p, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < p; ++k) g[k] += means(i, k);
  for (double& v : g) v /= static_cast<double>(m);

  VarianceEstimate est;
  est.kind = VarKind::between;
  est.m = m;
  est.n = n;
  est.value = SymMatrix(p);
  std::vector<double> dev(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < p; ++k) dev[k] = means(i, k) - g[k];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b <= a; ++b) est.value.at(a, b) += dev[a] * dev[b];
  }
  // Stored value is B itself: B/n is the between-chain variance.
  est.value.scale(static_cast<double>(n) / static_cast<double>(m - 1));
  return est;
}

VarianceEstimate replicated_batch_means(const ChainSet& cs, const BatchConfig& cfg) {
  const std::size_t m = cs.chains(), n = cs.iterations(), p = cs.dimension();
  const ResolvedBatch rb = resolve_batches(cfg, n);
  if (rb.a * m < 2)
    fail(Errc::degenerate, "replicated_batch_means: fewer than two batches in total");

  const std::vector<double> g = grand_mean(cs);

  VarianceEstimate est;
  est.kind = VarKind::rbm;
  est.m = m;
  est.n = n;
  est.batch = rb;
  est.value = SymMatrix(p);
  std::vector<double> bm(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < rb.a; ++k) {
      std::fill(bm.begin(), bm.end(), 0.0);
      for (std::size_t t = k * rb.b; t < (k + 1) * rb.b; ++t) {
        const auto row = cs.row(i, t);
        for (std::size_t c = 0; c < p; ++c) bm[c] += row[c];
      }
      for (std::size_t c = 0; c < p; ++c) bm[c] = bm[c] / static_cast<double>(rb.b) - g[c];
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b <= a; ++b) est.value.at(a, b) += bm[a] * bm[b];
    }
  }
  est.value.scale(static_cast<double>(rb.b) / static_cast<double>(rb.a * m - 1));
  return est;
}

VarianceEstimate replicated_lugsail(const ChainSet& cs, const BatchConfig& cfg) {
  VarianceEstimate base = replicated_batch_means(cs, cfg);
  BatchConfig third_cfg;
  third_cfg.policy = BatchPolicy::explicit_b;
  third_cfg.batch = std::max<std::size_t>(1, base.batch.b / 3);
  VarianceEstimate third = replicated_batch_means(cs, third_cfg);

  VarianceEstimate est;
  est.kind = VarKind::lugsail;
  est.m = base.m;
  est.n = base.n;
  est.batch = base.batch;
  est.batch_third = third.batch;
  est.value = lin_comb(2.0, base.value, -1.0, third.value);
  est.base = std::move(base.value);
  est.third = std::move(third.value);
  return est;
}

SymMatrix sigma_hat(const SymMatrix& s, const SymMatrix& b, std::size_t n) {
  if (n < 2) fail(Errc::invalid_argument, "sigma_hat: n must be >= 2");
  const double nn = static_cast<double>(n);
  return lin_comb((nn - 1.0) / nn, s, 1.0 / nn, b);
}

SymMatrix sigma_hat_L(const SymMatrix& s, const SymMatrix& t_lug, std::size_t n) {
  if (n < 2) fail(Errc::invalid_argument, "sigma_hat_L: n must be >= 2");
  const double nn = static_cast<double>(n);
  return lin_comb((nn - 1.0) / nn, s, 1.0 / nn, t_lug);
}

double relative_efficiency(std::size_t m, std::size_t a) {
  if (m < 2) fail(Errc::invalid_argument, "relative_efficiency: m must be >= 2");
  if (a < 1) fail(Errc::invalid_argument, "relative_efficiency: a must be >= 1");
  return static_cast<double>(m) * static_cast<double>(a) / (3.0 * static_cast<double>(m - 1));
}

LugsailDet lugsail_det(const ChainSet& cs, const BatchConfig& cfg) {
  LugsailDet d;
  d.summary = summarize(cs);
  d.lug = replicated_lugsail(cs, cfg);

  bool repaired = false;
  d.lug.value = psd_repair(d.lug.value, kRepairFloor, repaired);
  d.lug.psd_repaired = repaired;

  d.log_det_s = log_det(d.summary.pooled);  // throws singular when S is not PD
  d.log_det_t = log_det(d.lug.value);
  return d;
}

}  // namespace mcdiag
