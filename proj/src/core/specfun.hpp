#pragma once

namespace mcdiag {

// Regularized lower incomplete gamma P(a, x): power series for x < a+1,
// Lentz continued fraction for the upper tail.
double reg_lower_gamma(double a, double x);

// Chi-square distribution with df > 0 degrees of freedom.
double chi2_cdf(double x, double df);
double chi2_pdf(double x, double df);

// Inverse standard normal CDF (rational approximation, |error| < 1.2e-9).
// Accurate enough to seed Newton refinements.
double normal_quantile(double prob);

}  // namespace mcdiag
