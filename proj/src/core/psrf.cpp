#include "core/psrf.hpp"

#include <cmath>

#include "core/linalg.hpp"

namespace mcdiag {

namespace {

void require_scalar(const ChainSet& cs, const char* who) {
  if (cs.dimension() != 1)
    fail(Errc::invalid_argument, std::string(who) + ": univariate form needs p == 1");
}

double within_scalar_or_fail(const ChainSummary& s, const char* who) {
  const double s2 = s.pooled_scalar();
  if (!(s2 > 0.0))
    fail(Errc::degenerate, std::string(who) + ": pooled within-chain variance is zero");
  return s2;
}

}  // namespace

PsrfReport psrf_classic(const ChainSet& cs) {
  require_scalar(cs, "psrf_classic");
  if (cs.chains() < 2) fail(Errc::invalid_argument, "classic PSRF requires >=2 chains");

  const ChainSummary sum = summarize(cs);
  const double s2 = within_scalar_or_fail(sum, "psrf_classic");
  const VarianceEstimate b = between_chain(cs);

  PsrfReport r;
  r.kind = StatKind::classic;
  r.scope = PsrfScope::univariate;
  r.m = cs.chains();
  r.n = cs.iterations();
  r.p = 1;
  r.within = sum.pooled;
  r.correction = b.value;
  r.sigma2 = sigma_hat(sum.pooled, b.value, r.n);
  r.value = std::sqrt(r.sigma2(0, 0) / s2);
  r.component_values = {r.value};
  return r;
}

PsrfReport psrf_classic_component(const ChainSet& cs, std::size_t k) {
  PsrfReport r = psrf_classic(cs.component(k));
  r.component = static_cast<int>(k);
  return r;
}

PsrfReport psrf_lugsail(const ChainSet& cs, const BatchConfig& cfg) {
  require_scalar(cs, "psrf_lugsail");

  const ChainSummary sum = summarize(cs);
  const double s2 = within_scalar_or_fail(sum, "psrf_lugsail");
  const VarianceEstimate lug = replicated_lugsail(cs, cfg);

  PsrfReport r;
  r.kind = StatKind::lugsail;
  r.scope = PsrfScope::univariate;
  r.m = cs.chains();
  r.n = cs.iterations();
  r.p = 1;
  r.within = sum.pooled;
  r.correction = lug.value;
  r.batch = lug.batch;
  r.sigma2 = sigma_hat_L(sum.pooled, lug.value, r.n);
  const double ratio = r.sigma2(0, 0) / s2;
  if (!(ratio >= 0.0))
    fail(Errc::degenerate, "psrf_lugsail: lugsail estimate collapsed below zero");
  r.value = std::sqrt(ratio);
  r.component_values = {r.value};
  return r;
}

PsrfReport psrf_lugsail_component(const ChainSet& cs, const BatchConfig& cfg, std::size_t k) {
  PsrfReport r = psrf_lugsail(cs.component(k), cfg);
  r.component = static_cast<int>(k);
  return r;
}

PsrfReport psrf_multivariate_classic(const ChainSet& cs) {
  const std::size_t p = cs.dimension();
  if (p < 2) fail(Errc::invalid_argument, "psrf_multivariate_classic: needs p >= 2");
  if (cs.chains() < 2) fail(Errc::invalid_argument, "classic PSRF requires >=2 chains");

  const ChainSummary sum = summarize(cs);
  const VarianceEstimate b = between_chain(cs);
  const double lam = max_gen_eig(sum.pooled, b.value);  // throws singular when S is not PD

  PsrfReport r;
  r.kind = StatKind::classic;
  r.scope = PsrfScope::multivariate_maxeig;
  r.m = cs.chains();
  r.n = cs.iterations();
  r.p = p;
  r.within = sum.pooled;
  r.correction = b.value;
  r.sigma2 = sigma_hat(sum.pooled, b.value, r.n);
  r.rank_warning = cs.chains() <= p;
  const double nn = static_cast<double>(r.n);
  r.value = std::sqrt((nn - 1.0) / nn + lam / nn);
  r.component_values.resize(p);
  for (std::size_t k = 0; k < p; ++k)
    r.component_values[k] = psrf_classic_component(cs, k).value;
  return r;
}

PsrfReport psrf_multivariate_lugsail(const ChainSet& cs, const BatchConfig& cfg) {
  const std::size_t p = cs.dimension();
  if (p == 1) return psrf_lugsail(cs, cfg);  // identical code path, bit for bit

  const LugsailDet d = lugsail_det(cs, cfg);

  PsrfReport r;
  r.kind = StatKind::lugsail;
  r.scope = PsrfScope::multivariate_det;
  r.m = cs.chains();
  r.n = cs.iterations();
  r.p = p;
  r.within = d.summary.pooled;
  r.correction = d.lug.value;
  r.batch = d.lug.batch;
  r.psd_repaired = d.lug.psd_repaired;
  r.sigma2 = sigma_hat_L(d.summary.pooled, d.lug.value, r.n);
  const double nn = static_cast<double>(r.n);
  r.value = std::sqrt((nn - 1.0) / nn +
                      std::exp((d.log_det_t - d.log_det_s) / static_cast<double>(p)) / nn);
  r.component_values.resize(p);
  for (std::size_t k = 0; k < p; ++k)
    r.component_values[k] = psrf_lugsail_component(cs, cfg, k).value;
  return r;
}

}  // namespace mcdiag
