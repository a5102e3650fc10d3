#include "core/specfun.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace mcdiag {

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    fail(Errc::domain, "reg_lower_gamma: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);

  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^{-x} / Gamma(a) * sum_k x^k / (a (a+1) ... (a+k)).
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-17)
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    fail(Errc::domain, "reg_lower_gamma: series did not converge");
  }

  // Modified Lentz on the continued fraction for Q(a,x).
  const double log_pre = -x + a * std::log(x) - lg;
  if (log_pre < -746.0) return 1.0;  // Q underflows, so P is 1 to double precision
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-17) {
      const double q = std::exp(log_pre) * h;
      return 1.0 - q;
    }
  }
  fail(Errc::domain, "reg_lower_gamma: continued fraction did not converge");
}

double chi2_cdf(double x, double df) {
  if (!(df > 0.0)) fail(Errc::domain, "chi2_cdf: df must be > 0");
  if (x <= 0.0) return 0.0;
  return reg_lower_gamma(0.5 * df, 0.5 * x);
}

double chi2_pdf(double x, double df) {
  if (!(df > 0.0)) fail(Errc::domain, "chi2_pdf: df must be > 0");
  if (x <= 0.0) return 0.0;
  const double h = 0.5 * df;
  return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::log(2.0) - std::lgamma(h));
}

double normal_quantile(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0))
    fail(Errc::domain, "normal_quantile: prob must lie in (0, 1)");

  // Acklam's rational approximation with central / tail split.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  double q, r, x;
  if (prob < plow) {
    q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= 1.0 - plow) {
    q = prob - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

}  // namespace mcdiag
