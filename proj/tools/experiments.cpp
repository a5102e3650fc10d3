#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "common.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Arm {
  std::string name;
  json spec;  // seed injected per replication
  mcd_monitor_plan plan{};
};

struct RepOutcome {
  int64_t rep = 0;  // 0 marks "not run yet"
  int64_t termination_n = 0;
  int converged = 0;
  double psrf = kNan;
  double ess = kNan;
  double accept_mean = 0.0;
  std::vector<double> mean;
  std::string trace_csv;  // kept for replication 1 only
};

const char* statistic_name(int stat) {
  switch (stat) {
    case MCD_STAT_LUGSAIL_UNI: return "lugsail_uni";
    case MCD_STAT_LUGSAIL_DET: return "lugsail_det";
    case MCD_STAT_CLASSIC_UNI: return "classic_uni";
    case MCD_STAT_CLASSIC_MAXEIG: return "classic_maxeig";
    default: return "unknown";
  }
}

RepOutcome run_rep(const Arm& arm, uint64_t base_seed, int64_t rep) {
  json spec = arm.spec;
  spec["seed"] = mcd_derive_seed(base_seed, static_cast<uint64_t>(rep));
  const std::string spec_text = spec.dump();

  mcd_monitor_result* raw = nullptr;
  check(mcd_monitor_run(spec_text.c_str(), &arm.plan, &raw));
  MonitorPtr result(raw);

  RepOutcome out;
  out.rep = rep;
  out.converged = mcd_monitor_reason(result.get()) == MCD_STOP_THRESHOLD ? 1 : 0;
  const int64_t rows = mcd_monitor_checkpoints(result.get());
  check(mcd_monitor_row(result.get(), rows - 1, &out.termination_n, &out.psrf,
                        &out.ess, nullptr));

  mcd_chainset* cs_raw = nullptr;
  check(mcd_monitor_chains(result.get(), &cs_raw));
  ChainsetPtr cs(cs_raw);
  out.mean.resize(static_cast<std::size_t>(mcd_chainset_dimension(cs.get())));
  check(mcd_chainset_grand_mean(cs.get(), out.mean.data()));

  std::vector<double> acceptance(
      static_cast<std::size_t>(mcd_chainset_chains(cs.get())), 0.0);
  check(mcd_monitor_acceptance(result.get(), acceptance.data()));
  for (double a : acceptance) out.accept_mean += a;
  out.accept_mean /= static_cast<double>(acceptance.size());

  if (rep == 1) {
    CStringPtr csv(mcd_monitor_trace_csv(result.get()));
    out.trace_csv = csv.get();
  }
  return out;
}

std::string replications_csv(const std::vector<RepOutcome>& rows) {
  std::size_t p = 0;
  for (const RepOutcome& r : rows)
    if (r.rep != 0) p = r.mean.size();
  std::string s = "rep,termination_n,converged_reason,psrf,ess,acceptance";
  for (std::size_t k = 1; k <= p; ++k) s += ",mean_" + std::to_string(k);
  s += "\n";
  char buf[128];
  for (const RepOutcome& r : rows) {
    if (r.rep == 0) continue;
    std::snprintf(buf, sizeof buf, "%" PRId64 ",%" PRId64 ",%d,%.17g,%.17g,%.17g",
                  r.rep, r.termination_n, r.converged, r.psrf, r.ess,
                  r.accept_mean);
    s += buf;
    for (double mk : r.mean) {
      std::snprintf(buf, sizeof buf, ",%.17g", mk);
      s += buf;
    }
    s += "\n";
  }
  return s;
}

std::vector<RepOutcome> run_arm(const Arm& arm, int64_t reps, uint64_t seed,
                                int threads, const fs::path& outdir) {
  std::vector<RepOutcome> rows(static_cast<std::size_t>(reps));
  const fs::path csv_path = outdir / ("replications_" + arm.name + ".csv");
  std::mutex mu;
  std::atomic<int64_t> next{1};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const int64_t rep = next.fetch_add(1);
      if (rep > reps) return;
      try {
        RepOutcome out = run_rep(arm, seed, rep);
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
        rows[static_cast<std::size_t>(rep - 1)] = std::move(out);
        write_text_file_atomic(csv_path.string(), replications_csv(rows));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(reps + 1);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (const RepOutcome& r : rows)
    if (!r.trace_csv.empty())
      write_text_file_atomic((outdir / ("trace_" + arm.name + ".csv")).string(),
                             r.trace_csv);
  return rows;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNan;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void summary_rows(std::string& out, const std::string& arm,
                  const std::vector<RepOutcome>& rows) {
  std::vector<double> term, psrf, ess, accept, conv;
  for (const RepOutcome& r : rows) {
    term.push_back(static_cast<double>(r.termination_n));
    psrf.push_back(r.psrf);
    ess.push_back(r.ess);
    accept.push_back(r.accept_mean);
    conv.push_back(static_cast<double>(r.converged));
  }
  char buf[160];
  auto emit = [&](const char* metric, std::size_t component, double value) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.17g\n", arm.c_str(), metric,
                  component, value);
    out += buf;
  };
  emit("reps", 0, static_cast<double>(rows.size()));
  emit("converged_fraction", 0, mean_of(conv));
  emit("median_termination_n", 0, median(term));
  emit("mean_termination_n", 0, mean_of(term));
  emit("sd_termination_n", 0, sd_of(term));
  emit("mean_psrf", 0, mean_of(psrf));
  emit("sd_psrf", 0, sd_of(psrf));
  emit("mean_ess", 0, mean_of(ess));
  emit("mean_acceptance", 0, mean_of(accept));
  const std::size_t p = rows.empty() ? 0 : rows.front().mean.size();
  for (std::size_t k = 0; k < p; ++k) {
    std::vector<double> mk;
    for (const RepOutcome& r : rows) mk.push_back(r.mean[k]);
    emit("mean_of_means", k + 1, mean_of(mk));
    emit("sd_of_means", k + 1, sd_of(mk));
  }
}

json plan_json(const mcd_monitor_plan& plan) {
  json j;
  j["statistic"] = statistic_name(plan.options.statistic);
  j["batch_policy"] = plan.options.batch_policy == MCD_BATCH_SQRT    ? "sqrt"
                      : plan.options.batch_policy == MCD_BATCH_CUBE ? "cube"
                                                                    : "explicit";
  j["batch_size"] = plan.options.batch_size;
  j["delta"] = plan.options.delta;
  j["alpha"] = plan.options.alpha;
  j["epsilon"] = plan.options.epsilon;
  j["min_effort"] = plan.options.min_effort;
  j["schedule"] = plan.schedule == MCD_SCHEDULE_FIXED ? "fixed" : "geometric";
  j["start"] = plan.start;
  j["increment"] = plan.increment;
  j["rate"] = plan.rate;
  j["max_iterations"] = plan.max_iterations;
  j["burnin"] = plan.burnin;
  return j;
}

mcd_monitor_plan base_plan(int statistic, int schedule, int64_t start,
                           int64_t increment, double rate, int64_t cap) {
  mcd_monitor_plan plan;
  mcd_monitor_plan_init(&plan);
  plan.options.statistic = statistic;
  plan.schedule = schedule;
  plan.start = start;
  plan.increment = increment;
  plan.rate = rate;
  plan.max_iterations = cap;
  return plan;
}

void direct_cutoff(mcd_monitor_plan& plan, double delta) {
  plan.options.delta = delta;
  plan.options.min_effort = 1;
}

struct Experiment {
  std::vector<Arm> arms;
  int64_t default_reps = 0;
  json extras;  // experiment-specific constants for config.json / summary
};

Experiment make_t5() {
  Experiment e;
  e.default_reps = 100;
  json spec = {{"target", {{"type", "t"}, {"df", 5.0}}},
               {"chains", 3},
               {"proposal_var", 6.76},
               {"start", {{"type", "t"}, {"df", 2.0}}}};
  const mcd_monitor_plan plan =
      base_plan(MCD_STAT_LUGSAIL_UNI, MCD_SCHEDULE_FIXED, 50, 50, 1.0, 100000);
  Arm loose{"delta_1.10", spec, plan};
  direct_cutoff(loose.plan, 1.10);
  Arm tight{"delta_1.01", spec, plan};
  direct_cutoff(tight.plan, 1.01);
  Arm eps{"eps_0.10", spec, plan};  // alpha/epsilon defaults resolve the cutoff
  e.arms = {loose, tight, eps};
  return e;
}

Experiment make_ar1() {
  Experiment e;
  e.default_reps = 50;
  json spec = {{"target", {{"type", "ar1"}, {"rho", 0.95}, {"nu", 1.0}}},
               {"chains", 5}};
  const mcd_monitor_plan plan =
      base_plan(MCD_STAT_LUGSAIL_UNI, MCD_SCHEDULE_FIXED, 500, 500, 1.0, 100000);
  Arm lugsail{"lugsail", spec, plan};
  Arm classic{"classic", spec, plan};
  classic.plan.options.statistic = MCD_STAT_CLASSIC_UNI;
  e.arms = {lugsail, classic};

  // Analytic companion: dispersion truths and the cutoff crossing index.
  mcd_threshold t;
  check(mcd_compute_threshold(0.05, 0.10, 1, 5, &t));
  double sigma2 = 0.0, tau2_inf = 0.0;
  check(mcd_ar1_truth(0.95, 1.0, 2, &sigma2, nullptr, &tau2_inf, nullptr));
  auto true_psrf = [](int64_t n) {
    double v = 0.0;
    check(mcd_ar1_truth(0.95, 1.0, n, nullptr, nullptr, nullptr, &v));
    return v;
  };
  int64_t hi = 2;
  while (true_psrf(hi) > t.delta) hi *= 2;
  int64_t lo = hi / 2 < 2 ? 2 : hi / 2;
  while (lo + 1 < hi) {  // smallest n with true_psrf(n) <= delta
    const int64_t mid = lo + (hi - lo) / 2;
    (true_psrf(mid) <= t.delta ? hi : lo) = mid;
  }
  e.extras["sigma2"] = sigma2;
  e.extras["tau2_inf"] = tau2_inf;
  e.extras["delta"] = t.delta;
  e.extras["n_star"] = hi;
  return e;
}

Experiment make_bimodal() {
  Experiment e;
  e.default_reps = 100;
  json target = {{"type", "bimodal"}, {"weight1", 0.5}, {"mean1", 0.0},
                 {"var1", 2.0},       {"mean2", 10.0},  {"var2", 0.5}};
  const mcd_monitor_plan plan = base_plan(MCD_STAT_LUGSAIL_UNI,
                                          MCD_SCHEDULE_GEOMETRIC, 500, 0, 1.1, 200000);
  json spread = {{"type", "normal"}, {"mean", 5.0}, {"var", 25.0}};
  Arm h10{"h10",
          {{"target", target}, {"chains", 5}, {"proposal_var", 10.0}, {"start", spread}},
          plan};
  Arm h1{"h1",
         {{"target", target},
          {"chains", 5},
          {"proposal_var", 1.0},
          {"start", {{"type", "fixed"}, {"values", {0.0, 0.0, 0.0, 0.0, 0.0}}}}},
         plan};
  Arm h10c{"h10_classic", h10.spec, plan};
  h10c.plan.options.statistic = MCD_STAT_CLASSIC_UNI;
  e.arms = {h10, h1, h10c};
  return e;
}

Experiment make_titanic(const std::string& dataset) {
  if (dataset.empty())
    throw std::runtime_error("--dataset is required for the titanic experiment");
  Experiment e;
  e.default_reps = 10;

  int64_t p = 0;
  check(mcd_logistic_mle(dataset.c_str(), 1, &p, nullptr, nullptr));
  std::vector<double> beta(static_cast<std::size_t>(p)),
      se(static_cast<std::size_t>(p));
  check(mcd_logistic_mle(dataset.c_str(), 1, &p, beta.data(), se.data()));
  double log_se = 0.0;
  for (double s : se) log_se += std::log(s);
  const double geo_se = std::exp(log_se / static_cast<double>(p));
  const double step_sd = 2.38 / std::sqrt(static_cast<double>(p)) * geo_se;
  const double proposal_var = step_sd * step_sd;

  json spec = {{"target",
                {{"type", "logistic"},
                 {"dataset_csv", dataset},
                 {"standardize", true},
                 {"prior_var", 100.0}}},
               {"chains", 5},
               {"proposal_var", proposal_var},
               {"start", {{"type", "mle_spread"}, {"span", 3.0}}}};
  const mcd_monitor_plan plan =
      base_plan(MCD_STAT_LUGSAIL_DET, MCD_SCHEDULE_GEOMETRIC, 50, 0, 1.1, 50000);
  Arm loose{"delta_1.10", spec, plan};
  direct_cutoff(loose.plan, 1.10);
  Arm eps{"eps_0.10", spec, plan};
  e.arms = {loose, eps};

  e.extras["proposal_var"] = proposal_var;
  e.extras["mle_beta"] = beta;
  e.extras["mle_se"] = se;
  return e;
}

void write_ar1_truth_csv(const fs::path& outdir, double delta, int64_t cap) {
  std::string s = "n,tau2_n,true_psrf,delta\n";
  char buf[160];
  for (int64_t n = 500; n <= cap; n += 500) {
    double tau2_n = 0.0, psrf = 0.0;
    check(mcd_ar1_truth(0.95, 1.0, n, nullptr, &tau2_n, nullptr, &psrf));
    std::snprintf(buf, sizeof buf, "%" PRId64 ",%.17g,%.17g,%.17g\n", n, tau2_n,
                  psrf, delta);
    s += buf;
  }
  write_text_file_atomic((outdir / "truth.csv").string(), s);
}

}  // namespace

void register_reproduce(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "reproduce", "Replication studies over the built-in experiment configurations");
  struct Args {
    std::string experiment;
    int64_t replications = 0;
    uint64_t seed = 1;
    std::string outdir;
    std::string dataset;
    int threads = 1;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("--experiment", a->experiment, "t5, ar1, bimodal, or titanic")
      ->required()
      ->check(CLI::IsMember({"t5", "ar1", "bimodal", "titanic"}));
  sub->add_option("--replications", a->replications,
                  "replication count (0 = experiment default)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", a->seed, "base seed; replication r uses stream (seed, r)");
  sub->add_option("--outdir", a->outdir, "output directory")->required();
  sub->add_option("--dataset", a->dataset, "passenger CSV (titanic only)");
  sub->add_option("--threads", a->threads, "worker threads across replications")
      ->check(CLI::PositiveNumber);
  sub->callback([a, &rc] {
    const fs::path outdir(a->outdir);
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw std::runtime_error("cannot create " + a->outdir);

    Experiment e;
    if (a->experiment == "t5") e = make_t5();
    else if (a->experiment == "ar1") e = make_ar1();
    else if (a->experiment == "bimodal") e = make_bimodal();
    else e = make_titanic(a->dataset);
    const int64_t reps = a->replications > 0 ? a->replications : e.default_reps;

    std::string summary = "arm,metric,component,value\n";
    json config;
    config["experiment"] = a->experiment;
    config["seed"] = a->seed;
    config["replications"] = reps;
    config["extras"] = e.extras;
    json arm_list = json::array();
    for (const Arm& arm : e.arms) {
      json aj;
      aj["name"] = arm.name;
      aj["spec"] = arm.spec;
      aj["plan"] = plan_json(arm.plan);
      arm_list.push_back(aj);
    }
    config["arms"] = arm_list;
    write_text_file_atomic((outdir / "config.json").string(), config.dump(2) + "\n");

    if (a->experiment == "ar1")
      write_ar1_truth_csv(outdir, e.extras["delta"].get<double>(), 30000);

    json arm_names = json::array();
    for (const Arm& arm : e.arms) {
      const std::vector<RepOutcome> rows =
          run_arm(arm, reps, a->seed, a->threads, outdir);
      summary_rows(summary, arm.name, rows);
      arm_names.push_back(arm.name);
    }
    if (a->experiment == "ar1") {
      char buf[160];
      std::snprintf(buf, sizeof buf, "truth,n_star,0,%.17g\n",
                    e.extras["n_star"].get<double>());
      summary += buf;
      std::snprintf(buf, sizeof buf, "truth,delta,0,%.17g\n",
                    e.extras["delta"].get<double>());
      summary += buf;
    }
    write_text_file_atomic((outdir / "summary.csv").string(), summary);

    json out;
    out["schema_version"] = 1;
    out["experiment"] = a->experiment;
    out["outdir"] = a->outdir;
    out["replications"] = reps;
    out["arms"] = arm_names;
    out["summary"] = (outdir / "summary.csv").string();
    std::printf("%s\n", out.dump(2).c_str());
    rc = 0;
  });
}
