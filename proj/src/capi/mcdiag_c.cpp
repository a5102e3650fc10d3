#include "mcdiag.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include <json.hpp>

#include "core/logistic.hpp"
#include "core/monitor.hpp"

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

thread_local std::string t_error;

void require(bool ok, const char* msg) {
  if (!ok) mcdiag::fail(mcdiag::Errc::invalid_argument, msg);
}

template <typename F>
mcd_status guarded(F&& f) {
  t_error.clear();
  try {
    f();
    return MCD_OK;
  } catch (const mcdiag::Error& e) {
    t_error = e.what();
    return static_cast<mcd_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    t_error = e.what();
    return MCD_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mcdiag::MonitorStatistic to_statistic(int v) {
  switch (v) {
    case MCD_STAT_LUGSAIL_UNI: return mcdiag::MonitorStatistic::lugsail_uni;
    case MCD_STAT_LUGSAIL_DET: return mcdiag::MonitorStatistic::lugsail_det;
    case MCD_STAT_CLASSIC_UNI: return mcdiag::MonitorStatistic::classic_uni;
    case MCD_STAT_CLASSIC_MAXEIG: return mcdiag::MonitorStatistic::classic_maxeig;
    default: break;
  }
  mcdiag::fail(mcdiag::Errc::invalid_argument, "unknown statistic selector");
}

mcdiag::BatchConfig to_batch(int policy, int64_t size) {
  mcdiag::BatchConfig cfg;
  switch (policy) {
    case MCD_BATCH_SQRT: cfg.policy = mcdiag::BatchPolicy::sqrt_n; break;
    case MCD_BATCH_CUBE: cfg.policy = mcdiag::BatchPolicy::cube_root; break;
    case MCD_BATCH_EXPLICIT:
      cfg.policy = mcdiag::BatchPolicy::explicit_b;
      require(size >= 1, "explicit batch size must be >= 1");
      cfg.batch = static_cast<std::size_t>(size);
      break;
    default: mcdiag::fail(mcdiag::Errc::invalid_argument, "unknown batch policy");
  }
  return cfg;
}

/* Cutoff plus the prescription metadata behind it; NaN where not derived. */
struct Cutoff {
  double delta = 0.0;
  double min_ess = kNan;
  double min_ess_ceiled = kNan;
  double alpha = kNan;
  double epsilon = kNan;
  std::size_t min_effort = 1;
};

Cutoff resolve_cutoff(const mcd_diag_options& o, std::size_t p, std::size_t m) {
  Cutoff c;
  if (o.delta > 0.0) {
    c.delta = o.delta;
    c.min_effort = o.min_effort > 0 ? static_cast<std::size_t>(o.min_effort) : 1;
    return c;
  }
  const mcdiag::EssThreshold t = mcdiag::delta_threshold(o.alpha, o.epsilon, p, m);
  c.delta = t.delta;
  c.min_ess = t.min_ess;
  c.min_ess_ceiled = t.min_ess_ceiled;
  c.alpha = t.alpha;
  c.epsilon = t.epsilon;
  c.min_effort = o.min_effort > 0 ? static_cast<std::size_t>(o.min_effort)
                                  : static_cast<std::size_t>(t.min_ess_ceiled);
  return c;
}

json dense_json(const mcdiag::SymMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.order(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.order(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

struct mcd_chainset {
  mcdiag::ChainSet cs;
};

struct mcd_report {
  mcdiag::Diagnosis diag;
  Cutoff cutoff;
};

struct mcd_sampler {
  mcdiag::SamplerRun run;
};

struct mcd_monitor_result {
  mcdiag::MonitorResult res;
  Cutoff cutoff;
};

extern "C" {

const char* mcd_version(void) { return "0.1.0"; }

const char* mcd_last_error(void) { return t_error.c_str(); }

void mcd_string_free(char* s) { std::free(s); }

/* ---- chain sets ---- */

mcd_status mcd_chainset_create(int64_t m, int64_t n, int64_t p,
                               const double* samples, mcd_chainset** out) {
  return guarded([&] {
    require(samples != nullptr && out != nullptr, "null pointer");
    require(m >= 1 && n >= 2 && p >= 1, "need m >= 1, n >= 2, p >= 1");
    const std::size_t total = static_cast<std::size_t>(m) * n * p;
    *out = new mcd_chainset{
        mcdiag::ChainSet(m, n, p, std::vector<double>(samples, samples + total))};
  });
}

mcd_status mcd_chainset_load_csv(const char* const* paths, int64_t nfiles,
                                 int header, int64_t burnin, mcd_chainset** out) {
  return guarded([&] {
    require(paths != nullptr && out != nullptr, "null pointer");
    require(nfiles >= 1, "need at least one file");
    require(burnin >= 0, "burnin must be >= 0");
    std::vector<mcdiag::Matrix> mats;
    mats.reserve(nfiles);
    for (int64_t i = 0; i < nfiles; ++i) {
      require(paths[i] != nullptr, "null path");
      mats.push_back(mcdiag::load_chain_csv(paths[i], header != 0));
    }
    *out = new mcd_chainset{mcdiag::assemble(mats, static_cast<std::size_t>(burnin))};
  });
}

mcd_status mcd_chainset_drop_burnin(const mcd_chainset* cs, int64_t burnin,
                                    mcd_chainset** out) {
  return guarded([&] {
    require(cs != nullptr && out != nullptr, "null pointer");
    require(burnin >= 0, "burnin must be >= 0");
    *out = new mcd_chainset{cs->cs.drop_burnin(static_cast<std::size_t>(burnin))};
  });
}

void mcd_chainset_free(mcd_chainset* cs) { delete cs; }

int64_t mcd_chainset_chains(const mcd_chainset* cs) {
  return cs == nullptr ? 0 : static_cast<int64_t>(cs->cs.chains());
}

int64_t mcd_chainset_iterations(const mcd_chainset* cs) {
  return cs == nullptr ? 0 : static_cast<int64_t>(cs->cs.iterations());
}

int64_t mcd_chainset_dimension(const mcd_chainset* cs) {
  return cs == nullptr ? 0 : static_cast<int64_t>(cs->cs.dimension());
}

mcd_status mcd_chainset_grand_mean(const mcd_chainset* cs, double* out) {
  return guarded([&] {
    require(cs != nullptr && out != nullptr, "null pointer");
    const mcdiag::ChainSummary s = mcdiag::summarize(cs->cs);
    for (std::size_t k = 0; k < s.grand_mean.size(); ++k) out[k] = s.grand_mean[k];
  });
}

mcd_status mcd_chainset_write_csv(const mcd_chainset* cs, int64_t chain,
                                  const char* path, int header) {
  return guarded([&] {
    require(cs != nullptr && path != nullptr, "null pointer");
    require(chain >= 0 && chain < static_cast<int64_t>(cs->cs.chains()),
            "chain index out of range");
    mcdiag::write_chain_csv(path, cs->cs, static_cast<std::size_t>(chain),
                            header != 0);
  });
}

/* ---- sample-size prescription ---- */

mcd_status mcd_compute_threshold(double alpha, double epsilon, int64_t p,
                                 int64_t m, mcd_threshold* out) {
  return guarded([&] {
    require(out != nullptr, "null pointer");
    require(p >= 1 && m >= 1, "need p >= 1, m >= 1");
    const mcdiag::EssThreshold t = mcdiag::delta_threshold(
        alpha, epsilon, static_cast<std::size_t>(p), static_cast<std::size_t>(m));
    out->alpha = t.alpha;
    out->epsilon = t.epsilon;
    out->p = static_cast<int64_t>(t.p);
    out->m = static_cast<int64_t>(t.m);
    out->min_ess = t.min_ess;
    out->min_ess_ceiled = t.min_ess_ceiled;
    out->delta = t.delta;
  });
}

mcd_status mcd_chi2_quantile(double prob, double df, double* out) {
  return guarded([&] {
    require(out != nullptr, "null pointer");
    *out = mcdiag::chi2_quantile(prob, df);
  });
}

/* ---- diagnostics ---- */

void mcd_diag_options_init(mcd_diag_options* opt) {
  if (opt == nullptr) return;
  opt->statistic = MCD_STAT_LUGSAIL_DET;
  opt->batch_policy = MCD_BATCH_SQRT;
  opt->batch_size = 0;
  opt->delta = 0.0;
  opt->alpha = 0.05;
  opt->epsilon = 0.10;
  opt->min_effort = 0;
}

mcd_status mcd_diagnose(const mcd_chainset* cs, const mcd_diag_options* opt,
                        mcd_report** out) {
  return guarded([&] {
    require(cs != nullptr && out != nullptr, "null pointer");
    mcd_diag_options o;
    mcd_diag_options_init(&o);
    if (opt != nullptr) o = *opt;
    const Cutoff cut = resolve_cutoff(o, cs->cs.dimension(), cs->cs.chains());
    mcdiag::MonitorPlan plan;
    plan.statistic = to_statistic(o.statistic);
    plan.batch = to_batch(o.batch_policy, o.batch_size);
    plan.delta = cut.delta;
    plan.min_effort = cut.min_effort;
    mcdiag::Diagnosis d = mcdiag::diagnose_static(cs->cs, plan);
    *out = new mcd_report{std::move(d), cut};
  });
}

void mcd_report_free(mcd_report* r) { delete r; }

double mcd_report_psrf(const mcd_report* r) {
  return r == nullptr ? kNan : r->diag.psrf.value;
}

double mcd_report_ess(const mcd_report* r) {
  return r == nullptr ? kNan : r->diag.ess;
}

double mcd_report_delta(const mcd_report* r) {
  return r == nullptr ? kNan : r->cutoff.delta;
}

double mcd_report_min_ess(const mcd_report* r) {
  return r == nullptr ? kNan : r->cutoff.min_ess;
}

int mcd_report_converged(const mcd_report* r) {
  return r != nullptr && r->diag.converged ? 1 : 0;
}

int mcd_report_psd_repaired(const mcd_report* r) {
  return r != nullptr && (r->diag.psrf.psd_repaired || r->diag.ess_repaired) ? 1 : 0;
}

int mcd_report_rank_warning(const mcd_report* r) {
  return r != nullptr && r->diag.psrf.rank_warning ? 1 : 0;
}

int64_t mcd_report_chains(const mcd_report* r) {
  return r == nullptr ? 0 : static_cast<int64_t>(r->diag.psrf.m);
}

int64_t mcd_report_iterations(const mcd_report* r) {
  return r == nullptr ? 0 : static_cast<int64_t>(r->diag.psrf.n);
}

int64_t mcd_report_dimension(const mcd_report* r) {
  return r == nullptr ? 0 : static_cast<int64_t>(r->diag.psrf.p);
}

int64_t mcd_report_batch(const mcd_report* r) {
  return r == nullptr ? 0 : static_cast<int64_t>(r->diag.psrf.batch.b);
}

int64_t mcd_report_components(const mcd_report* r, double* out, int64_t cap) {
  if (r == nullptr || out == nullptr || cap <= 0) return 0;
  const auto& vals = r->diag.psrf.component_values;
  const int64_t k = std::min<int64_t>(cap, static_cast<int64_t>(vals.size()));
  for (int64_t i = 0; i < k; ++i) out[i] = vals[i];
  return k;
}

char* mcd_report_json(const mcd_report* r) {
  if (r == nullptr) return nullptr;
  const mcdiag::PsrfReport& p = r->diag.psrf;
  json j;
  j["schema_version"] = 1;
  j["statistic"] = p.kind == mcdiag::StatKind::classic ? "classic" : "lugsail";
  switch (p.scope) {
    case mcdiag::PsrfScope::univariate: j["scope"] = "univariate"; break;
    case mcdiag::PsrfScope::multivariate_det: j["scope"] = "multivariate-det"; break;
    case mcdiag::PsrfScope::multivariate_maxeig:
      j["scope"] = "multivariate-maxeig";
      break;
  }
  j["psrf"] = p.value;
  j["component"] = p.component;
  j["component_psrf"] = p.component_values;
  j["ess"] = r->diag.ess;
  j["converged"] = r->diag.converged;
  j["delta"] = r->cutoff.delta;
  j["min_ess"] = r->cutoff.min_ess;
  j["min_ess_ceiled"] = r->cutoff.min_ess_ceiled;
  j["alpha"] = r->cutoff.alpha;
  j["epsilon"] = r->cutoff.epsilon;
  j["min_effort"] = r->cutoff.min_effort;
  j["chains"] = p.m;
  j["iterations"] = p.n;
  j["evaluated_iterations"] = r->diag.n;
  j["dimension"] = p.p;
  j["batch"] = {{"size", p.batch.b},
                {"count", p.batch.a},
                {"size_third", p.batch.b > 0 ? std::max<std::size_t>(1, p.batch.b / 3) : 0}};
  j["psd_repaired"] = p.psd_repaired || r->diag.ess_repaired;
  j["rank_warning"] = p.rank_warning;
  j["within"] = dense_json(p.within);
  j["long_run"] = dense_json(p.sigma2);
  return dup_string(j.dump(2));
}

mcd_status mcd_ess(const mcd_chainset* cs, int batch_policy, int64_t batch_size,
                   double* ess, int64_t* batch_used, int* repaired) {
  return guarded([&] {
    require(cs != nullptr && ess != nullptr, "null pointer");
    const mcdiag::EssEstimate e =
        mcdiag::ess_estimate(cs->cs, to_batch(batch_policy, batch_size));
    *ess = e.ess;
    if (batch_used != nullptr) *batch_used = static_cast<int64_t>(e.batch.b);
    if (repaired != nullptr) *repaired = e.psd_repaired ? 1 : 0;
  });
}

/* ---- samplers ---- */

mcd_status mcd_sampler_create(const char* spec_json, mcd_sampler** out) {
  return guarded([&] {
    require(spec_json != nullptr && out != nullptr, "null pointer");
    *out = new mcd_sampler{mcdiag::SamplerRun(mcdiag::sampler_spec_from_json(spec_json))};
  });
}

void mcd_sampler_free(mcd_sampler* s) { delete s; }

int64_t mcd_sampler_chain_count(const mcd_sampler* s) {
  return s == nullptr ? 0 : static_cast<int64_t>(s->run.spec().m);
}

int64_t mcd_sampler_dimension(const mcd_sampler* s) {
  return s == nullptr ? 0 : static_cast<int64_t>(s->run.dimension());
}

int64_t mcd_sampler_length(const mcd_sampler* s) {
  return s == nullptr ? 0 : static_cast<int64_t>(s->run.length());
}

mcd_status mcd_sampler_run(mcd_sampler* s, int64_t n) {
  return guarded([&] {
    require(s != nullptr, "null pointer");
    require(n >= 0, "n must be >= 0");
    s->run.extend_to(static_cast<std::size_t>(n));
  });
}

mcd_status mcd_sampler_chains(const mcd_sampler* s, mcd_chainset** out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null pointer");
    *out = new mcd_chainset{s->run.snapshot()};
  });
}

mcd_status mcd_sampler_acceptance(const mcd_sampler* s, double* out) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null pointer");
    const std::vector<double> rates = s->run.acceptance_rates();
    for (std::size_t i = 0; i < rates.size(); ++i) out[i] = rates[i];
  });
}

mcd_status mcd_ar1_truth(double rho, double nu, int64_t n, double* sigma2,
                         double* tau2_n, double* tau2_inf, double* psrf) {
  return guarded([&] {
    require(n >= 2, "n must be >= 2");
    const mcdiag::Ar1Truth t = mcdiag::ar1_truth(rho, nu, static_cast<std::size_t>(n));
    if (sigma2 != nullptr) *sigma2 = t.sigma2;
    if (tau2_n != nullptr) *tau2_n = t.tau2_n;
    if (tau2_inf != nullptr) *tau2_inf = t.tau2_inf;
    if (psrf != nullptr) *psrf = t.psrf;
  });
}

mcd_status mcd_logistic_mle(const char* csv_path, int standardize,
                            int64_t* p_out, double* beta, double* se) {
  return guarded([&] {
    require(csv_path != nullptr && p_out != nullptr, "null pointer");
    mcdiag::Dataset d = mcdiag::load_passenger_csv(csv_path);
    if (standardize != 0) mcdiag::standardize_covariates(d);
    *p_out = static_cast<int64_t>(d.x.cols);
    if (beta == nullptr && se == nullptr) return;
    const mcdiag::MleFit fit = mcdiag::logistic_mle(d.x, d.y);
    for (std::size_t k = 0; k < d.x.cols; ++k) {
      if (beta != nullptr) beta[k] = fit.beta[k];
      if (se != nullptr) se[k] = fit.se[k];
    }
  });
}

uint64_t mcd_derive_seed(uint64_t seed, uint64_t key) {
  return mcdiag::Rng::derive_seed(seed, key);
}

/* ---- sequential monitoring ---- */

void mcd_monitor_plan_init(mcd_monitor_plan* plan) {
  if (plan == nullptr) return;
  mcd_diag_options_init(&plan->options);
  plan->schedule = MCD_SCHEDULE_GEOMETRIC;
  plan->start = 100;
  plan->increment = 100;
  plan->rate = 1.5;
  plan->max_iterations = 100000;
  plan->burnin = 0;
}

mcd_status mcd_monitor_run(const char* spec_json, const mcd_monitor_plan* plan,
                           mcd_monitor_result** out) {
  return guarded([&] {
    require(spec_json != nullptr && plan != nullptr && out != nullptr,
            "null pointer");
    const mcdiag::SamplerSpec spec = mcdiag::sampler_spec_from_json(spec_json);
    const Cutoff cut = resolve_cutoff(plan->options,
                                      mcdiag::target_dimension(spec.target), spec.m);
    mcdiag::MonitorPlan mp;
    mp.statistic = to_statistic(plan->options.statistic);
    mp.batch = to_batch(plan->options.batch_policy, plan->options.batch_size);
    mp.delta = cut.delta;
    mp.min_effort = cut.min_effort;
    mp.schedule.kind = plan->schedule == MCD_SCHEDULE_FIXED
                           ? mcdiag::Schedule::Kind::fixed_increment
                           : mcdiag::Schedule::Kind::geometric;
    require(plan->start >= 2, "first checkpoint must be >= 2");
    require(plan->increment >= 0, "increment must be >= 0");
    require(plan->max_iterations >= 2, "iteration cap must be >= 2");
    require(plan->burnin >= 0, "burnin must be >= 0");
    mp.schedule.start = static_cast<std::size_t>(plan->start);
    mp.schedule.increment = static_cast<std::size_t>(plan->increment);
    mp.schedule.rate = plan->rate;
    mp.max_iterations = static_cast<std::size_t>(plan->max_iterations);
    mp.burnin = static_cast<std::size_t>(plan->burnin);
    *out = new mcd_monitor_result{mcdiag::run_monitor(spec, mp), cut};
  });
}

void mcd_monitor_free(mcd_monitor_result* r) { delete r; }

int64_t mcd_monitor_checkpoints(const mcd_monitor_result* r) {
  return r == nullptr ? 0 : static_cast<int64_t>(r->res.trace.size());
}

mcd_status mcd_monitor_row(const mcd_monitor_result* r, int64_t i, int64_t* n,
                           double* psrf, double* ess, int* converged) {
  return guarded([&] {
    require(r != nullptr, "null pointer");
    require(i >= 0 && i < static_cast<int64_t>(r->res.trace.size()),
            "checkpoint index out of range");
    const mcdiag::TraceEntry& e = r->res.trace[static_cast<std::size_t>(i)];
    if (n != nullptr) *n = static_cast<int64_t>(e.n);
    if (psrf != nullptr) *psrf = e.psrf;
    if (ess != nullptr) *ess = e.ess;
    if (converged != nullptr) *converged = e.converged ? 1 : 0;
  });
}

int mcd_monitor_reason(const mcd_monitor_result* r) {
  if (r == nullptr) return MCD_STOP_CAP;
  return r->res.reason == mcdiag::StopReason::threshold_met ? MCD_STOP_THRESHOLD
                                                            : MCD_STOP_CAP;
}

mcd_status mcd_monitor_report(const mcd_monitor_result* r, mcd_report** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null pointer");
    *out = new mcd_report{r->res.last, r->cutoff};
  });
}

mcd_status mcd_monitor_chains(const mcd_monitor_result* r, mcd_chainset** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null pointer");
    *out = new mcd_chainset{r->res.chains};
  });
}

mcd_status mcd_monitor_acceptance(const mcd_monitor_result* r, double* out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null pointer");
    for (std::size_t i = 0; i < r->res.acceptance.size(); ++i)
      out[i] = r->res.acceptance[i];
  });
}

char* mcd_monitor_trace_csv(const mcd_monitor_result* r) {
  if (r == nullptr) return nullptr;
  std::string s = "n,psrf,ess,converged\n";
  char line[128];
  for (const mcdiag::TraceEntry& e : r->res.trace) {
    std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%d\n",
                  static_cast<unsigned long long>(e.n), e.psrf, e.ess,
                  e.converged ? 1 : 0);
    s += line;
  }
  return dup_string(s);
}

} /* extern "C" */
