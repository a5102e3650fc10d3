#include "core/ess.hpp"

#include <cmath>
#include <string>

#include "core/specfun.hpp"

namespace mcdiag {

double chi2_quantile(double prob, double df) {
  if (!(prob > 0.0) || !(prob < 1.0))
    fail(Errc::domain, "chi2_quantile: prob must lie in (0, 1)");
  if (!(df > 0.0)) fail(Errc::domain, "chi2_quantile: df must be > 0");

  // Wilson-Hilferty start, clipped into a bracket that provably contains the
  // root; Newton steps fall back to bisection whenever they leave it.
  const double z = normal_quantile(prob);
  const double wh = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);

  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 50.0;
  while (chi2_cdf(hi, df) < prob) hi *= 2.0;
  double x = (wh > lo && wh < hi) ? wh : 0.5 * (lo + hi);
  if (x <= 0.0) x = 0.5 * hi;

  for (int it = 0; it < 200; ++it) {
    const double f = chi2_cdf(x, df) - prob;
    if (f > 0.0) hi = x; else lo = x;
    const double pdf = chi2_pdf(x, df);
    double next;
    if (pdf > 0.0 && std::isfinite(pdf)) {
      next = x - f / pdf;
      if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 1e-13 * std::max(1.0, x) && std::fabs(f) < 1e-12) return x;
  }
  fail(Errc::domain, "chi2_quantile: did not converge for prob=" + std::to_string(prob) +
                         ", df=" + std::to_string(df));
}

double min_ess(double alpha, double epsilon, std::size_t p) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) fail(Errc::domain, "min_ess: alpha must lie in (0, 1)");
  if (!(epsilon > 0.0)) fail(Errc::domain, "min_ess: epsilon must be > 0");
  if (p < 1) fail(Errc::invalid_argument, "min_ess: p must be >= 1");

  const double pd = static_cast<double>(p);
  const double log_front = (2.0 / pd) * std::log(2.0) + std::log(M_PI) -
                           (2.0 / pd) * (std::log(pd) + std::lgamma(0.5 * pd));
  const double chi2 = chi2_quantile(1.0 - alpha, pd);
  return std::exp(log_front) * chi2 / (epsilon * epsilon);
}

EssThreshold delta_threshold(double alpha, double epsilon, std::size_t p, std::size_t m) {
  if (m < 1) fail(Errc::invalid_argument, "delta_threshold: m must be >= 1");
  EssThreshold t;
  t.alpha = alpha;
  t.epsilon = epsilon;
  t.p = p;
  t.m = m;
  t.min_ess = min_ess(alpha, epsilon, p);
  t.min_ess_ceiled = std::ceil(t.min_ess);
  // The cutoff uses the raw prescription, not the ceiled integer.
  t.delta = std::sqrt(1.0 + static_cast<double>(m) / t.min_ess);
  return t;
}

EssEstimate ess_estimate(const ChainSet& cs, const BatchConfig& cfg) {
  const LugsailDet d = lugsail_det(cs, cfg);
  const double mn = static_cast<double>(cs.chains()) * static_cast<double>(cs.iterations());
  EssEstimate e;
  e.ess = mn * std::exp((d.log_det_s - d.log_det_t) / static_cast<double>(cs.dimension()));
  e.psd_repaired = d.lug.psd_repaired;
  e.batch = d.lug.batch;
  return e;
}

}  // namespace mcdiag
