#ifndef MCDIAG_H
#define MCDIAG_H

/* C interface to the convergence diagnostic library.
 *
 * Every function that can fail returns an mcd_status; MCD_OK is zero. On
 * failure a thread-local message is available from mcd_last_error() until
 * the next call on the same thread. Objects returned through out-pointers
 * are owned by the caller and released with the matching *_free function.
 * Strings returned as char* are released with mcd_string_free.
 */

#include <stdint.h>

#if defined(_WIN32)
#if defined(MCDIAG_BUILD)
#define MCDIAG_API __declspec(dllexport)
#else
#define MCDIAG_API __declspec(dllimport)
#endif
#else
#define MCDIAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcd_status {
  MCD_OK = 0,
  MCD_ERR_INVALID = 1,      /* bad argument */
  MCD_ERR_IO = 2,           /* file could not be read or written */
  MCD_ERR_PARSE = 3,        /* malformed CSV or JSON input */
  MCD_ERR_SHAPE = 4,        /* dimensions do not line up */
  MCD_ERR_DEGENERATE = 5,   /* estimate undefined for this data */
  MCD_ERR_SINGULAR = 6,     /* matrix factorization broke down */
  MCD_ERR_UNREPAIRABLE = 7, /* eigenvalue repair could not help */
  MCD_ERR_DOMAIN = 8,       /* numeric routine left its domain */
  MCD_ERR_INTERNAL = 99
} mcd_status;

typedef enum mcd_statistic {
  MCD_STAT_LUGSAIL_UNI = 0,    /* scalar lugsail; worst component when p > 1 */
  MCD_STAT_LUGSAIL_DET = 1,    /* determinant-based multivariate lugsail */
  MCD_STAT_CLASSIC_UNI = 2,    /* scalar classic; worst component when p > 1 */
  MCD_STAT_CLASSIC_MAXEIG = 3  /* classic multivariate, largest eigenvalue */
} mcd_statistic;

typedef enum mcd_batch_policy {
  MCD_BATCH_SQRT = 0,    /* b = floor(sqrt(n)) */
  MCD_BATCH_CUBE = 1,    /* b = floor(n^(1/3)) */
  MCD_BATCH_EXPLICIT = 2 /* caller supplies b */
} mcd_batch_policy;

typedef enum mcd_schedule_kind {
  MCD_SCHEDULE_FIXED = 0,    /* n' = n + increment */
  MCD_SCHEDULE_GEOMETRIC = 1 /* n' = max(n + 1, round(n * rate)) */
} mcd_schedule_kind;

typedef enum mcd_stop_reason {
  MCD_STOP_THRESHOLD = 0,
  MCD_STOP_CAP = 1
} mcd_stop_reason;

MCDIAG_API const char* mcd_version(void);
MCDIAG_API const char* mcd_last_error(void);
MCDIAG_API void mcd_string_free(char* s);

/* ---- chain sets ---- */

typedef struct mcd_chainset mcd_chainset;

/* samples: chain-major, m*n*p doubles; sample (i,t,k) at ((i*n)+t)*p + k. */
MCDIAG_API mcd_status mcd_chainset_create(int64_t m, int64_t n, int64_t p,
                                          const double* samples,
                                          mcd_chainset** out);

/* One CSV per chain, identical shapes; rows are iterations. Drops the first
 * `burnin` rows of every file. */
MCDIAG_API mcd_status mcd_chainset_load_csv(const char* const* paths,
                                            int64_t nfiles, int header,
                                            int64_t burnin, mcd_chainset** out);

MCDIAG_API mcd_status mcd_chainset_drop_burnin(const mcd_chainset* cs,
                                               int64_t burnin,
                                               mcd_chainset** out);

MCDIAG_API void mcd_chainset_free(mcd_chainset* cs);

MCDIAG_API int64_t mcd_chainset_chains(const mcd_chainset* cs);
MCDIAG_API int64_t mcd_chainset_iterations(const mcd_chainset* cs);
MCDIAG_API int64_t mcd_chainset_dimension(const mcd_chainset* cs);

/* out must hold p doubles. */
MCDIAG_API mcd_status mcd_chainset_grand_mean(const mcd_chainset* cs,
                                              double* out);

MCDIAG_API mcd_status mcd_chainset_write_csv(const mcd_chainset* cs,
                                             int64_t chain, const char* path,
                                             int header);

/* ---- sample-size prescription ---- */

typedef struct mcd_threshold {
  double alpha;
  double epsilon;
  int64_t p;
  int64_t m;
  double min_ess;        /* raw prescription M */
  double min_ess_ceiled; /* ceil(M) */
  double delta;          /* sqrt(1 + m/M), from the raw M */
} mcd_threshold;

MCDIAG_API mcd_status mcd_compute_threshold(double alpha, double epsilon,
                                            int64_t p, int64_t m,
                                            mcd_threshold* out);

MCDIAG_API mcd_status mcd_chi2_quantile(double prob, double df, double* out);

/* ---- diagnostics ---- */

typedef struct mcd_diag_options {
  int statistic;      /* mcd_statistic */
  int batch_policy;   /* mcd_batch_policy */
  int64_t batch_size; /* used when batch_policy is MCD_BATCH_EXPLICIT */
  double delta;       /* direct cutoff; <= 0 derives it from alpha/epsilon */
  double alpha;
  double epsilon;
  int64_t min_effort; /* <= 0 picks 1 (direct delta) or ceil(M) (derived) */
} mcd_diag_options;

MCDIAG_API void mcd_diag_options_init(mcd_diag_options* opt);

typedef struct mcd_report mcd_report;

MCDIAG_API mcd_status mcd_diagnose(const mcd_chainset* cs,
                                   const mcd_diag_options* opt,
                                   mcd_report** out);

MCDIAG_API void mcd_report_free(mcd_report* r);

MCDIAG_API double mcd_report_psrf(const mcd_report* r);
MCDIAG_API double mcd_report_ess(const mcd_report* r); /* NaN if unavailable */
MCDIAG_API double mcd_report_delta(const mcd_report* r);
MCDIAG_API double mcd_report_min_ess(const mcd_report* r); /* NaN if direct */
MCDIAG_API int mcd_report_converged(const mcd_report* r);
MCDIAG_API int mcd_report_psd_repaired(const mcd_report* r);
MCDIAG_API int mcd_report_rank_warning(const mcd_report* r);
MCDIAG_API int64_t mcd_report_chains(const mcd_report* r);
MCDIAG_API int64_t mcd_report_iterations(const mcd_report* r);
MCDIAG_API int64_t mcd_report_dimension(const mcd_report* r);
MCDIAG_API int64_t mcd_report_batch(const mcd_report* r); /* 0 for classic */

/* Per-component statistic values; returns how many were written (<= cap). */
MCDIAG_API int64_t mcd_report_components(const mcd_report* r, double* out,
                                         int64_t cap);

/* Full report as a JSON document, schema_version 1. */
MCDIAG_API char* mcd_report_json(const mcd_report* r);

/* Effective sample size on its own. batch_used and repaired may be NULL. */
MCDIAG_API mcd_status mcd_ess(const mcd_chainset* cs, int batch_policy,
                              int64_t batch_size, double* ess,
                              int64_t* batch_used, int* repaired);

/* ---- samplers ---- */

/* Specs are JSON documents:
 *   {"target": {"type": "ar1", "rho": 0.95, "nu": 1.0},
 *    "chains": 5, "seed": 17, "proposal_var": 6.76,
 *    "start": {"type": "normal", "mean": 0, "var": 25}}
 * Target types: ar1, t, bimodal, logistic. Start types: stationary (ar1
 * only), fixed, t, normal, mle_spread (logistic only); each target has a
 * sensible default. See the README for the full schema. */

typedef struct mcd_sampler mcd_sampler;

MCDIAG_API mcd_status mcd_sampler_create(const char* spec_json,
                                         mcd_sampler** out);
MCDIAG_API void mcd_sampler_free(mcd_sampler* s);

MCDIAG_API int64_t mcd_sampler_chain_count(const mcd_sampler* s);
MCDIAG_API int64_t mcd_sampler_dimension(const mcd_sampler* s);
MCDIAG_API int64_t mcd_sampler_length(const mcd_sampler* s);

/* Extend every chain to n iterations; shorter n is a no-op. */
MCDIAG_API mcd_status mcd_sampler_run(mcd_sampler* s, int64_t n);

/* Snapshot of the samples drawn so far (requires length >= 2). */
MCDIAG_API mcd_status mcd_sampler_chains(const mcd_sampler* s,
                                         mcd_chainset** out);

/* Per-chain acceptance rates; out must hold chain_count doubles. */
MCDIAG_API mcd_status mcd_sampler_acceptance(const mcd_sampler* s,
                                             double* out);

/* Dispersion of the AR(1) process and of its n-iteration averages:
 * sigma2 = nu^2/(1-rho^2), tau2_n the finite-n long-run variance, tau2_inf
 * its limit, psrf the population value of the scalar diagnostic at n. */
MCDIAG_API mcd_status mcd_ar1_truth(double rho, double nu, int64_t n,
                                    double* sigma2, double* tau2_n,
                                    double* tau2_inf, double* psrf);

/* Logistic-regression MLE on a passenger-manifest CSV (the layout the
 * logistic sampler target consumes). Query p with beta == se == NULL. */
MCDIAG_API mcd_status mcd_logistic_mle(const char* csv_path, int standardize,
                                       int64_t* p_out, double* beta,
                                       double* se);

MCDIAG_API uint64_t mcd_derive_seed(uint64_t seed, uint64_t key);

/* ---- sequential monitoring ---- */

typedef struct mcd_monitor_plan {
  mcd_diag_options options;
  int schedule; /* mcd_schedule_kind */
  int64_t start;
  int64_t increment;
  double rate;
  int64_t max_iterations;
  int64_t burnin; /* dropped before every evaluation */
} mcd_monitor_plan;

MCDIAG_API void mcd_monitor_plan_init(mcd_monitor_plan* plan);

typedef struct mcd_monitor_result mcd_monitor_result;

MCDIAG_API mcd_status mcd_monitor_run(const char* spec_json,
                                      const mcd_monitor_plan* plan,
                                      mcd_monitor_result** out);

MCDIAG_API void mcd_monitor_free(mcd_monitor_result* r);

MCDIAG_API int64_t mcd_monitor_checkpoints(const mcd_monitor_result* r);
MCDIAG_API mcd_status mcd_monitor_row(const mcd_monitor_result* r, int64_t i,
                                      int64_t* n, double* psrf, double* ess,
                                      int* converged);
MCDIAG_API int mcd_monitor_reason(const mcd_monitor_result* r);

/* Evaluation at the final checkpoint, as a report. */
MCDIAG_API mcd_status mcd_monitor_report(const mcd_monitor_result* r,
                                         mcd_report** out);

/* Full run, burn-in included. */
MCDIAG_API mcd_status mcd_monitor_chains(const mcd_monitor_result* r,
                                         mcd_chainset** out);

/* Per-chain acceptance rates; out must hold chain_count doubles. */
MCDIAG_API mcd_status mcd_monitor_acceptance(const mcd_monitor_result* r,
                                             double* out);

/* Checkpoint trace as CSV: n,psrf,ess,converged. */
MCDIAG_API char* mcd_monitor_trace_csv(const mcd_monitor_result* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCDIAG_H */
