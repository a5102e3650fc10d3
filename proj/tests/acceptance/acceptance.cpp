// End-to-end acceptance checks. Each check prints exactly one [PASS]/[FAIL]
// line with the measured quantities, and the binary exits nonzero if any
// check fails. Workflow checks drive the CLI named by MCDIAG_CLI (set by
// ctest) and parse the files it writes; numeric checks call the core library
// directly and compare against independently coded references.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "core/chains.hpp"
#include "core/ess.hpp"
#include "core/mcvar.hpp"
#include "core/psrf.hpp"
#include "core/rng.hpp"
#include "core/samplers.hpp"

#include "../util.hpp"

namespace {

using mcdiag::BatchConfig;
using mcdiag::BatchPolicy;
using mcdiag::ChainSet;
using nlohmann::json;

bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

double sd_of(const std::vector<double>& v) { return std::sqrt(var_of(v)); }

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- CSV tables written by the CLI (unquoted fields) ----

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) fields.push_back(cell);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  if (t.header.empty()) throw std::runtime_error(path.string() + ": empty table");
  return t;
}

std::vector<double> column(const Table& t, const std::string& name) {
  std::size_t c = t.header.size();
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) c = i;
  if (c == t.header.size()) throw std::runtime_error("missing column " + name);
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    if (r.size() <= c) throw std::runtime_error("short row while reading " + name);
    v.push_back(std::stod(r[c]));
  }
  return v;
}

// summary.csv rows are arm,metric,component,value
double summary_value(const Table& t, const std::string& arm, const std::string& metric) {
  for (const auto& r : t.rows)
    if (r.size() == 4 && r[0] == arm && r[1] == metric) return std::stod(r[3]);
  throw std::runtime_error("summary.csv: no row for " + arm + "," + metric);
}

CliResult run_cli_checked(const std::string& args) {
  CliResult r = run_cli(args);
  if (r.exit_code != 0)
    throw std::runtime_error("CLI exited " + std::to_string(r.exit_code) + ": " + args +
                             "\n" + r.output.substr(0, 500));
  return r;
}

// Correlated test chains: per-component AR recursion, neighbor mixing, and a
// per-chain location offset so between-chain structure is present.
ChainSet synth_chains(mcdiag::Rng& rng, std::size_t m, std::size_t n, std::size_t p,
                      double ar, double mix, double offset) {
  std::vector<double> data(m * n * p);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> z(p, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < p; ++k) z[k] = ar * z[k] + rng.normal();
      for (std::size_t k = 0; k < p; ++k)
        data[(i * n + t) * p + k] = z[k] + mix * z[(k + 1) % p] + offset * static_cast<double>(i);
    }
  }
  return ChainSet(m, n, p, std::move(data));
}

// ============================================================ criterion 1
// Effort prescription constants for alpha=.05, eps=.10, p=1, via the CLI.

bool crit_threshold(std::string& d) {
  auto query = [](int m) {
    CliResult r = run_cli_checked("threshold --alpha 0.05 --eps 0.10 --p 1 --m " +
                                  std::to_string(m));
    return json::parse(r.output);
  };
  const json j3 = query(3);
  const json j5 = query(5);
  const json j1 = query(1);
  const double raw = j3["min_ess"].get<double>();
  const double ceiled = j3["min_ess_ceiled"].get<double>();
  const double d3 = j3["delta"].get<double>();
  const double d5 = j5["delta"].get<double>();
  const double d1 = j1["delta"].get<double>();

  bool ok = std::fabs(raw - 1536.6) <= 0.5;
  ok = ok && std::fabs(raw - 1536.5835282776498) <= 1e-6;
  ok = ok && ceiled == 1537.0;
  ok = ok && std::fabs(d3 - 1.000976) <= 1e-6;
  ok = ok && std::fabs(d5 - 1.001625) <= 1e-6;
  ok = ok && std::fabs(d1 - 1.000325) <= 1e-6;

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "M=%.10f ceil=%.0f delta(m=3)=%.8f delta(m=5)=%.8f delta(m=1)=%.8f",
                raw, ceiled, d3, d5, d1);
  d = buf;
  return ok;
}

// ============================================================ criterion 2
// Chi-square quantiles against a quadrature reference that shares no code
// with the library: Simpson's rule on the density after x = t^2, which
// removes the df=1 endpoint singularity.

double quad_chi2_cdf(double df, double x) {
  if (x <= 0.0) return 0.0;
  const double upper = std::sqrt(x);
  const int panels = 20000;
  const double h = upper / panels;
  const double logc = (df / 2.0) * std::log(2.0) + std::lgamma(df / 2.0);
  auto g = [&](double t) -> double {
    if (t <= 0.0) return df == 1.0 ? 2.0 * std::exp(-logc) : 0.0;
    return 2.0 * std::exp((df - 1.0) * std::log(t) - 0.5 * t * t - logc);
  };
  double sum = g(0.0) + g(upper);
  for (int i = 1; i < panels; ++i) sum += g(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return sum * h / 3.0;
}

bool crit_chi2_quantiles(std::string& d) {
  bool ok = true;
  double worst_gap = 0.0;
  int worst_df = 0;
  for (int df = 1; df <= 30; ++df) {
    const double q = mcdiag::chi2_quantile(0.95, df);
    // quantile error below 1e-6 iff the CDF brackets 0.95 across q +- 1e-6
    const double lo = quad_chi2_cdf(df, q - 1e-6);
    const double hi = quad_chi2_cdf(df, q + 1e-6);
    if (!(lo < 0.95 && hi > 0.95)) ok = false;
    const double gap = std::fabs(quad_chi2_cdf(df, q) - 0.95);
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_df = df;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "df 1..30, worst CDF offset %.3g at df=%d (quantile tol 1e-6)",
                worst_gap, worst_df);
  d = buf;
  return ok;
}

// ============================================================ criterion 3
// AR(1) rho=.95: closed-form long-run quantities, the frozen crossing index
// of the exact-PSRF curve, and the termination distribution of 50 seeded
// monitor runs per statistic (fixed 500-step checkpoints, m=5).

bool crit_ar1_termination(std::string& d) {
  const auto th = mcdiag::delta_threshold(0.05, 0.10, 1, 5);
  const auto t2 = mcdiag::ar1_truth(0.95, 1.0, 2);
  bool ok = rel_close(t2.sigma2, 10.256410256410257, 1e-12);
  ok = ok && rel_close(t2.tau2_inf, 400.0, 1e-12);

  // smallest n with exact PSRF at or below the cutoff, by doubling + bisection
  std::size_t hi = 2;
  while (mcdiag::ar1_truth(0.95, 1.0, hi).psrf > th.delta) hi *= 2;
  std::size_t lo = std::max<std::size_t>(2, hi / 2);
  while (lo + 1 < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (mcdiag::ar1_truth(0.95, 1.0, mid).psrf <= th.delta) hi = mid;
    else lo = mid;
  }
  const bool nstar_ok = hi == 11659;  // frozen regression value
  ok = ok && nstar_ok;
  const double n_star = static_cast<double>(hi);

  const auto dir = make_temp_dir("acc_ar1");
  run_cli_checked("reproduce --experiment ar1 --replications 50 --seed 101 --outdir '" +
                  dir.string() + "'");
  const Table summary = read_table(dir / "summary.csv");
  const double reported_nstar = summary_value(summary, "truth", "n_star");
  const double med = summary_value(summary, "lugsail", "median_termination_n");
  const double sd_lug = summary_value(summary, "lugsail", "sd_termination_n");
  const double sd_cls = summary_value(summary, "classic", "sd_termination_n");

  ok = ok && reported_nstar == n_star;
  ok = ok && std::fabs(med / n_star - 1.0) <= 0.25;
  ok = ok && sd_lug < sd_cls;

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "n*=%zu%s median=%g (%.3f n*), termination sd %.0f (lugsail) vs %.0f (classic)",
                hi, nstar_ok ? "" : " (expected 11659)", med, med / n_star, sd_lug, sd_cls);
  d = buf;
  return ok;
}

// ============================================================ criterion 4
// ESS and the determinant PSRF report the same information:
// R = sqrt((n-1)/n + m/ESS) must hold to 1e-12 on random chain sets.

bool crit_identity(std::string& d) {
  mcdiag::Rng rng(4242);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 2 + rng.next_u64() % 2;
    const std::size_t p = 1 + rng.next_u64() % 4;
    const std::size_t n = 600 + rng.next_u64() % 601;
    const ChainSet cs = synth_chains(rng, m, n, p, 0.5, 0.25, 0.05);
    BatchConfig cfg;
    const auto r = mcdiag::psrf_multivariate_lugsail(cs, cfg);
    const auto e = mcdiag::ess_estimate(cs, cfg);
    const double nn = static_cast<double>(n);
    const double rhs = std::sqrt((nn - 1.0) / nn + static_cast<double>(m) / e.ess);
    worst = std::max(worst, std::fabs(r.value - rhs));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |R - sqrt((n-1)/n + m/ESS)| = %.3g over 100 sets", worst);
  d = buf;
  return worst <= 1e-12;
}

// ============================================================ criterion 5
// Replicated batch means against a direct transcription of its definition
// in long double, over every (m, n, p, b) in the grid.

mcdiag::SymMatrix naive_rbm(const ChainSet& cs, std::size_t b) {
  const std::size_t m = cs.chains(), n = cs.iterations(), p = cs.dimension();
  const std::size_t a = n / b;
  std::vector<long double> grand(p, 0.0L);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t k = 0; k < p; ++k) grand[k] += cs.at(i, t, k);
  for (std::size_t k = 0; k < p; ++k) grand[k] /= static_cast<long double>(m * n);

  std::vector<long double> acc(p * p, 0.0L);
  std::vector<long double> bm(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t kb = 0; kb < a; ++kb) {
      std::fill(bm.begin(), bm.end(), 0.0L);
      for (std::size_t t = kb * b; t < (kb + 1) * b; ++t)
        for (std::size_t k = 0; k < p; ++k) bm[k] += cs.at(i, t, k);
      for (std::size_t k = 0; k < p; ++k) bm[k] = bm[k] / static_cast<long double>(b) - grand[k];
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) acc[r * p + c] += bm[r] * bm[c];
    }
  }
  const long double scale =
      static_cast<long double>(b) / static_cast<long double>(a * m - 1);
  mcdiag::SymMatrix out(p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c <= r; ++c)
      out.at(r, c) = static_cast<double>(scale * acc[r * p + c]);
  return out;
}

bool crit_rbm_formula(std::string& d) {
  mcdiag::Rng rng(777);
  double worst = 0.0;
  long points = 0;
  bool ok = true;
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t p = 1; p <= 3; ++p) {
      for (std::size_t n = 2; n <= 60; ++n) {
        const ChainSet cs = synth_chains(rng, m, n, p, 0.3, 0.25, 0.2);
        for (std::size_t b = 1; b <= n / 2; ++b) {
          const auto lib = mcdiag::replicated_batch_means(cs, {BatchPolicy::explicit_b, b});
          const auto ref = naive_rbm(cs, b);
          double scale = 1.0;
          for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = 0; c <= r; ++c) scale = std::max(scale, std::fabs(ref(r, c)));
          for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = 0; c <= r; ++c) {
              const double gap = std::fabs(lib.value(r, c) - ref(r, c)) / scale;
              worst = std::max(worst, gap);
              if (gap > 1e-12) ok = false;
            }
          ++points;
        }
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%ld grid points (m<=3, n<=60, p<=3, b<=n/2), worst gap %.3g",
                points, worst);
  d = buf;
  return ok;
}

// ============================================================ criterion 6
// The determinant PSRF is invariant under invertible affine maps of the
// component space.

bool crit_affine_invariance(std::string& d) {
  mcdiag::Rng rng(6001);
  double worst = 0.0;
  bool ok = true;
  int transforms = 0;
  for (std::size_t p : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
    const std::size_t m = 3, n = 900;
    const ChainSet cs = synth_chains(rng, m, n, p, 0.5, 0.25, 0.05);
    BatchConfig cfg;
    const auto base = mcdiag::psrf_multivariate_lugsail(cs, cfg);
    ok = ok && !base.psd_repaired;
    for (int rep = 0; rep < 50; ++rep) {
      // strictly diagonally dominant, hence invertible
      std::vector<double> a(p * p);
      std::vector<double> c(p);
      for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t l = 0; l < p; ++l) a[r * p + l] = 2.0 * rng.uniform01() - 1.0;
        a[r * p + r] += static_cast<double>(p + 1);
        c[r] = 10.0 * rng.uniform01() - 5.0;
      }
      std::vector<double> data(m * n * p);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < n; ++t) {
          const auto row = cs.row(i, t);
          for (std::size_t r = 0; r < p; ++r) {
            double v = c[r];
            for (std::size_t l = 0; l < p; ++l) v += a[r * p + l] * row[l];
            data[(i * n + t) * p + r] = v;
          }
        }
      const ChainSet mapped(m, n, p, std::move(data));
      const auto got = mcdiag::psrf_multivariate_lugsail(mapped, cfg);
      ok = ok && !got.psd_repaired;
      const double gap = std::fabs(got.value - base.value);
      worst = std::max(worst, gap);
      if (gap > 1e-8) ok = false;
      ++transforms;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst |R(Ax+c) - R(x)| = %.3g over %d maps at p=2,3,5",
                worst, transforms);
  d = buf;
  return ok;
}

// ============================================================ criterion 7
// Heavy-tailed scalar target: loose cutoffs stop almost immediately, the
// derived cutoff stops in a sane window and the pooled mean it reports is
// near the true center.

bool crit_t5_study(std::string& d) {
  const auto dir = make_temp_dir("acc_t5");
  run_cli_checked("reproduce --experiment t5 --replications 100 --seed 202 --outdir '" +
                  dir.string() + "'");
  const auto frac_by_100 = [](const Table& t) {
    const auto n = column(t, "termination_n");
    double hits = 0.0;
    for (double x : n) hits += x <= 100.0 ? 1.0 : 0.0;
    return hits / static_cast<double>(n.size());
  };
  const double f10 = frac_by_100(read_table(dir / "replications_delta_1.10.csv"));
  const double f01 = frac_by_100(read_table(dir / "replications_delta_1.01.csv"));

  const Table tight = read_table(dir / "replications_eps_0.10.csv");
  const double med = median_of(column(tight, "termination_n"));
  double worst_mean = 0.0;
  for (double mu : column(tight, "mean_1")) worst_mean = std::max(worst_mean, std::fabs(mu));

  const bool early_ok = std::max(f10, f01) >= 0.80;
  const bool med_ok = med >= 1500.0 && med <= 4000.0;
  const bool mean_ok = worst_mean <= 0.15;

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "stop<=100: %.2f (delta 1.1) %.2f (delta 1.01); derived median n=%g, max |pooled mean|=%.3f",
                f10, f01, med, worst_mean);
  d = buf;
  return early_ok && med_ok && mean_ok;
}

// ============================================================ criterion 8
// Bimodal target: wide proposals with dispersed starts find both modes and
// report means near the true value; narrow proposals started inside one
// mode terminate with a badly wrong mean.

bool crit_bimodal(std::string& d) {
  const auto dir = make_temp_dir("acc_bimodal");
  run_cli_checked("reproduce --experiment bimodal --replications 100 --seed 303 --outdir '" +
                  dir.string() + "'");
  const auto means_h10 = column(read_table(dir / "replications_h10.csv"), "mean_1");
  const Table h1 = read_table(dir / "replications_h1.csv");
  const auto means_h1 = column(h1, "mean_1");
  const auto reason_h1 = column(h1, "converged_reason");
  double good = 0.0;
  for (double mu : means_h10) good += std::fabs(mu - 5.0) <= 0.5 ? 1.0 : 0.0;
  const double frac_good = good / static_cast<double>(means_h10.size());
  // The premature-certification claim is about runs the monitor actually
  // certified (reason 1). A narrow-proposal chain sometimes escapes the
  // starting mode mid-run; the monitor then rightly refuses to certify and
  // the run ends at the iteration cap (reason 0), so cap-hits are not
  // premature convergences. Require the certified runs to be a majority so
  // the check cannot pass vacuously.
  std::size_t certified = 0, bad = 0;
  for (std::size_t i = 0; i < means_h1.size(); ++i) {
    if (reason_h1[i] != 1.0) continue;
    ++certified;
    if (std::fabs(means_h1[i] - 5.0) > 2.0) ++bad;
  }
  const double frac_stuck =
      certified == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(certified);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "wide proposal: %.2f within 0.5 of truth; narrow one-mode start: %zu/%zu "
                "certified, %.2f of those off by > 2",
                frac_good, certified, means_h1.size(), frac_stuck);
  d = buf;
  return frac_good >= 0.90 && certified >= means_h1.size() / 2 && frac_stuck >= 0.90;
}

// ============================================================ criterion 9
// Logistic posterior on a synthetic passenger table: the derived cutoff must
// at least halve the across-replication spread of every posterior-mean
// component relative to the loose delta=1.1 run.

std::string synth_passengers(std::size_t rows) {
  mcdiag::Rng rng(909);
  std::ostringstream out;
  out << "PassengerId,Survived,Pclass,Name,Sex,Age,SibSp,Parch,Fare,Embarked\n";
  for (std::size_t i = 1; i <= rows; ++i) {
    const double u_class = rng.uniform01();
    const int pclass = u_class < 0.25 ? 1 : (u_class < 0.45 ? 2 : 3);
    const bool male = rng.uniform01() < 0.64;
    const bool age_known = rng.uniform01() >= 0.06;
    double age = 28.0 + 13.0 * rng.normal();
    age = std::min(80.0, std::max(1.0, age));
    age = std::round(age * 10.0) / 10.0;
    const double u_sib = rng.uniform01();
    const int sibsp = u_sib < 0.62 ? 0 : (u_sib < 0.87 ? 1 : (u_sib < 0.95 ? 2 : 3));
    const double u_par = rng.uniform01();
    const int parch = u_par < 0.76 ? 0 : (u_par < 0.89 ? 1 : 2);
    const double fare_mu = pclass == 1 ? 4.2 : (pclass == 2 ? 3.3 : 2.6);
    const double fare = std::round(std::exp(fare_mu + 0.5 * rng.normal()) * 100.0) / 100.0;
    const double u_emb = rng.uniform01();
    const char embarked = u_emb < 0.19 ? 'C' : (u_emb < 0.28 ? 'Q' : 'S');

    double eta = 1.1;
    if (pclass == 2) eta -= 0.5;
    if (pclass == 3) eta -= 1.1;
    if (male) eta -= 1.3;
    eta += -0.02 * age - 0.25 * sibsp + 0.15 * parch + 0.004 * fare;
    if (embarked == 'Q') eta -= 0.1;
    if (embarked == 'S') eta -= 0.35;
    const int survived = rng.uniform01() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;

    out << i << ',' << survived << ',' << pclass << ",\"Passenger, "
        << (male ? "Mr." : "Ms.") << " No. " << i << "\"," << (male ? "male" : "female") << ',';
    if (age_known) out << age;
    out << ',' << sibsp << ',' << parch << ',' << fare << ',' << embarked << '\n';
  }
  return out.str();
}

bool crit_regression_stability(std::string& d) {
  const auto dir = make_temp_dir("acc_titanic");
  const auto dataset = dir / "passengers.csv";
  write_file(dataset, synth_passengers(300));
  run_cli_checked("reproduce --experiment titanic --replications 10 --seed 404 --dataset '" +
                  dataset.string() + "' --outdir '" + dir.string() + "'");
  const Table loose = read_table(dir / "replications_delta_1.10.csv");
  const Table tight = read_table(dir / "replications_eps_0.10.csv");
  bool ok = true;
  double worst_ratio = 0.0;
  int worst_k = 0;
  for (int k = 1; k <= 10; ++k) {
    const std::string col = "mean_" + std::to_string(k);
    const double sd_loose = sd_of(column(loose, col));
    const double sd_tight = sd_of(column(tight, col));
    const double ratio = sd_tight / sd_loose;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_k = k;
    }
    if (!(sd_tight <= 0.5 * sd_loose)) ok = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst spread ratio derived/loose = %.3f (component %d), bound 0.5, 10 replications",
                worst_ratio, worst_k);
  d = buf;
  return ok;
}

// ============================================================ criterion 10
// At fixed n the lugsail statistic varies less across replications than the
// classic one, and the gap widens as n grows.

bool crit_stability(std::string& d) {
  const std::size_t lengths[2] = {5000, 20000};
  double ratio[2] = {0.0, 0.0};
  bool ok = true;
  for (int idx = 0; idx < 2; ++idx) {
    const std::size_t n = lengths[idx];
    // Batch length grows like sqrt(n) but sized well above the chain's
    // integrated autocorrelation time (about 39 at rho = .95), so batch
    // means behave like independent draws and the batch-count advantage is
    // what separates the two statistics. At the default floor(sqrt(n)) the
    // batches are only 2-4 autocorrelation times long at these n, and the
    // coupling between the variance estimate and the pooled s^2 masks the
    // growth of the gap.
    const auto b = static_cast<std::size_t>(3.5 * std::sqrt(static_cast<double>(n)));
    const BatchConfig cfg{BatchPolicy::explicit_b, b};
    std::vector<double> lug, cls;
    lug.reserve(200);
    cls.reserve(200);
    for (int rep = 0; rep < 200; ++rep) {
      mcdiag::SamplerSpec spec;
      spec.target = mcdiag::Ar1Target{0.95, 1.0};
      spec.m = 5;
      spec.seed = mcdiag::Rng::derive_seed(505 + idx, static_cast<std::uint64_t>(rep));
      const auto g = mcdiag::generate(spec, n);
      lug.push_back(mcdiag::psrf_lugsail(g.chains, cfg).value);
      cls.push_back(mcdiag::psrf_classic(g.chains).value);
    }
    const double vl = var_of(lug), vc = var_of(cls);
    if (!(vl < vc)) ok = false;
    ratio[idx] = vc / vl;
  }
  if (!(ratio[1] > ratio[0])) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "var(classic)/var(lugsail) = %.1f at n=5000, %.1f at n=20000 (200 reps each)",
                ratio[0], ratio[1]);
  d = buf;
  return ok;
}

}  // namespace

int main() {
  struct Check {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Check> checks = {
      {1, "effort prescription constants", crit_threshold},
      {2, "chi-square quantiles vs quadrature", crit_chi2_quantiles},
      {3, "AR(1) termination calibration", crit_ar1_termination},
      {4, "ESS-PSRF consistency identity", crit_identity},
      {5, "replicated batch means vs direct formula", crit_rbm_formula},
      {6, "determinant PSRF affine invariance", crit_affine_invariance},
      {7, "heavy-tailed termination study", crit_t5_study},
      {8, "bimodal diagnostic contrast", crit_bimodal},
      {9, "regression posterior stability contrast", crit_regression_stability},
      {10, "estimator variance comparison", crit_stability},
  };
  int failures = 0;
  for (const auto& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures == 0) std::printf("all 10 checks passed\n");
  else std::printf("%d of 10 checks failed\n", failures);
  return failures == 0 ? 0 : 1;
}
