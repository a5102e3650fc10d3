#include "core/samplers.hpp"

#include <cmath>
#include <string>

namespace mcdiag {

namespace {

double softplus(double u) {
  // log(1 + e^u) without overflow on either side.
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * d * d / var;
}

void validate(const SamplerSpec& spec) {
  if (spec.m < 1) fail(Errc::invalid_argument, "sampler: m must be >= 1");
  if (const auto* ar = std::get_if<Ar1Target>(&spec.target)) {
    if (!(std::fabs(ar->rho) < 1.0)) fail(Errc::invalid_argument, "ar1: |rho| must be < 1");
    if (!(ar->nu > 0.0)) fail(Errc::invalid_argument, "ar1: nu must be > 0");
    return;
  }
  if (!(spec.proposal_var > 0.0))
    fail(Errc::invalid_argument, "sampler: proposal variance must be > 0");
  if (const auto* t = std::get_if<TTarget>(&spec.target)) {
    if (!(t->df > 0.0)) fail(Errc::invalid_argument, "t target: df must be > 0");
  } else if (const auto* bi = std::get_if<BimodalTarget>(&spec.target)) {
    if (!(bi->weight1 > 0.0) || !(bi->weight1 < 1.0))
      fail(Errc::invalid_argument, "bimodal: weight must lie in (0, 1)");
    if (!(bi->var1 > 0.0) || !(bi->var2 > 0.0))
      fail(Errc::invalid_argument, "bimodal: component variances must be > 0");
  } else if (const auto* lg = std::get_if<LogisticTarget>(&spec.target)) {
    if (!lg->x || !lg->y) fail(Errc::invalid_argument, "logistic: missing design or response");
    if (lg->x->rows != lg->y->size())
      fail(Errc::shape_mismatch, "logistic: design and response lengths differ");
    if (!(lg->prior_var > 0.0)) fail(Errc::invalid_argument, "logistic: prior variance must be > 0");
  }
}

}  // namespace

std::size_t target_dimension(const Target& t) {
  if (const auto* lg = std::get_if<LogisticTarget>(&t)) return lg->x->cols;
  return 1;
}

double log_density(const SamplerSpec& spec, std::span<const double> x) {
  if (x.size() != target_dimension(spec.target))
    fail(Errc::shape_mismatch, "log_density: point has wrong dimension");

  if (std::holds_alternative<Ar1Target>(spec.target))
    fail(Errc::invalid_argument, "log_density: ar1 is not a Metropolis target");

  if (const auto* t = std::get_if<TTarget>(&spec.target)) {
    const double df = t->df;
    return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
           0.5 * std::log(df * M_PI) - 0.5 * (df + 1.0) * std::log1p(x[0] * x[0] / df);
  }
  if (const auto* bi = std::get_if<BimodalTarget>(&spec.target)) {
    const double la = std::log(bi->weight1) + log_normal_pdf(x[0], bi->mean1, bi->var1);
    const double lb = std::log(1.0 - bi->weight1) + log_normal_pdf(x[0], bi->mean2, bi->var2);
    const double hi = std::max(la, lb), lo = std::min(la, lb);
    return hi + std::log1p(std::exp(lo - hi));
  }
  const auto& lg = std::get<LogisticTarget>(spec.target);
  const Matrix& xm = *lg.x;
  const std::vector<int>& y = *lg.y;
  double ll = 0.0;
  for (std::size_t i = 0; i < xm.rows; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < xm.cols; ++j) eta += xm(i, j) * x[j];
    ll += static_cast<double>(y[i]) * eta - softplus(eta);
  }
  double quad = 0.0;
  for (double b : x) quad += b * b;
  return ll - 0.5 * quad / lg.prior_var;
}

SamplerRun::SamplerRun(SamplerSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  p_ = target_dimension(spec_.target);
  is_ar1_ = std::holds_alternative<Ar1Target>(spec_.target);
  proposal_sd_ = std::sqrt(spec_.proposal_var);

  const StartSpec& start = spec_.start;
  Matrix fixed = start.values;
  if (start.kind == StartSpec::Kind::fixed &&
      (fixed.rows != spec_.m || fixed.cols != p_))
    fail(Errc::shape_mismatch, "sampler: fixed starts must be m x p");
  if (start.kind == StartSpec::Kind::mle_spread) {
    const auto* lg = std::get_if<LogisticTarget>(&spec_.target);
    if (!lg) fail(Errc::invalid_argument, "sampler: mle_spread start needs a logistic target");
    fixed = spread_starts(logistic_mle(*lg->x, *lg->y), spec_.m, start.span);
  }
  if (start.kind == StartSpec::Kind::stationary && !is_ar1_)
    fail(Errc::invalid_argument, "sampler: stationary start is only defined for ar1");

  states_.reserve(spec_.m);
  for (std::size_t i = 0; i < spec_.m; ++i) {
    ChainState st{Rng::stream(spec_.seed, i), std::vector<double>(p_, 0.0), 0.0, 0, {}};
    switch (start.kind) {
      case StartSpec::Kind::stationary: {
        const auto& ar = std::get<Ar1Target>(spec_.target);
        const double sd = ar.nu / std::sqrt(1.0 - ar.rho * ar.rho);
        st.x[0] = sd * st.rng.normal();
        break;
      }
      case StartSpec::Kind::t_dist:
        st.x[0] = st.rng.student_t(static_cast<unsigned>(start.t_df));
        break;
      case StartSpec::Kind::normal_dist:
        st.x[0] = start.mean + std::sqrt(start.var) * st.rng.normal();
        break;
      case StartSpec::Kind::fixed:
      case StartSpec::Kind::mle_spread:
        for (std::size_t k = 0; k < p_; ++k) st.x[k] = fixed(i, k);
        break;
    }
    if (!is_ar1_) st.logf = log_density(spec_, st.x);
    st.samples.reserve(256 * p_);
    states_.push_back(std::move(st));
  }
}

void SamplerRun::advance(ChainState& st) const {
  if (is_ar1_) {
    const auto& ar = std::get<Ar1Target>(spec_.target);
    st.x[0] = ar.rho * st.x[0] + ar.nu * st.rng.normal();
    ++st.accepted;
    return;
  }
  // Proposal components first, acceptance uniform last: the draw order is
  // fixed so extended runs replay identically.
  std::vector<double> prop(p_);
  for (std::size_t k = 0; k < p_; ++k) prop[k] = st.x[k] + proposal_sd_ * st.rng.normal();
  const double logf_prop = log_density(spec_, prop);
  const double u = st.rng.uniform01();
  if (u == 0.0 || std::log(u) < logf_prop - st.logf) {
    st.x = std::move(prop);
    st.logf = logf_prop;
    ++st.accepted;
  }
}

void SamplerRun::extend_to(std::size_t n) {
  if (n <= len_) return;
  for (ChainState& st : states_) {
    std::size_t have = st.samples.size() / p_;
    if (have == 0) {
      st.samples.insert(st.samples.end(), st.x.begin(), st.x.end());
      have = 1;
    }
    for (; have < n; ++have) {
      advance(st);
      st.samples.insert(st.samples.end(), st.x.begin(), st.x.end());
    }
  }
  len_ = n;
}

ChainSet SamplerRun::snapshot() const {
  if (len_ < 2) fail(Errc::invalid_argument, "sampler: need at least two iterations");
  std::vector<double> buf;
  buf.reserve(spec_.m * len_ * p_);
  for (const ChainState& st : states_) buf.insert(buf.end(), st.samples.begin(), st.samples.end());
  return ChainSet(spec_.m, len_, p_, std::move(buf));
}

std::vector<double> SamplerRun::acceptance_rates() const {
  std::vector<double> rates(states_.size(), 0.0);
  if (len_ < 2) return rates;
  for (std::size_t i = 0; i < states_.size(); ++i)
    rates[i] = static_cast<double>(states_[i].accepted) / static_cast<double>(len_ - 1);
  return rates;
}

GenResult generate(const SamplerSpec& spec, std::size_t n) {
  SamplerRun run(spec);
  run.extend_to(n);
  return {run.snapshot(), run.acceptance_rates()};
}

Ar1Truth ar1_truth(double rho, double nu, std::size_t n) {
  if (!(std::fabs(rho) < 1.0)) fail(Errc::invalid_argument, "ar1_truth: |rho| must be < 1");
  if (!(nu > 0.0)) fail(Errc::invalid_argument, "ar1_truth: nu must be > 0");
  if (n < 2) fail(Errc::invalid_argument, "ar1_truth: n must be >= 2");

  Ar1Truth t;
  t.sigma2 = nu * nu / (1.0 - rho * rho);
  // tau^2_n = sigma^2 (1 + 2 sum_{k<n} (1 - k/n) rho^k), summed directly.
  double acc = 0.0;
  double rk = 1.0;
  const double nn = static_cast<double>(n);
  for (std::size_t k = 1; k < n; ++k) {
    rk *= rho;
    acc += (1.0 - static_cast<double>(k) / nn) * rk;
  }
  t.tau2_n = t.sigma2 * (1.0 + 2.0 * acc);
  t.tau2_inf = t.sigma2 * (1.0 + rho) / (1.0 - rho);
  t.psrf = std::sqrt((nn - 1.0) / nn + t.tau2_n / (nn * t.sigma2));
  return t;
}

}  // namespace mcdiag
