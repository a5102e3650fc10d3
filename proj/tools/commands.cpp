#include "commands.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"

using nlohmann::json;

void parse_batch(const std::string& text, int& policy, int64_t& size) {
  if (text == "sqrt") {
    policy = MCD_BATCH_SQRT;
    size = 0;
    return;
  }
  if (text == "cube") {
    policy = MCD_BATCH_CUBE;
    size = 0;
    return;
  }
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos == text.size() && v >= 1) {
      policy = MCD_BATCH_EXPLICIT;
      size = v;
      return;
    }
  } catch (const std::exception&) {
  }
  throw std::runtime_error("--batch expects 'sqrt', 'cube', or a batch size >= 1");
}

int pick_statistic(const std::string& stat, const std::string& mv) {
  if (stat == "lugsail") {
    if (mv.empty() || mv == "det") return MCD_STAT_LUGSAIL_DET;
    throw std::runtime_error("--mv maxeig applies to --stat classic only");
  }
  if (stat == "classic") {
    if (mv.empty() || mv == "maxeig") return MCD_STAT_CLASSIC_MAXEIG;
    throw std::runtime_error("--mv det applies to --stat lugsail only");
  }
  throw std::runtime_error("--stat expects 'lugsail' or 'classic'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct ChainArgs {
  std::vector<std::string> files;
  bool header = false;
  int64_t burnin = 0;
  bool burnin_half = false;
};

void add_chain_options(CLI::App* sub, ChainArgs& a) {
  sub->add_option("--chains", a.files, "chain CSV files, one per chain")
      ->required()
      ->expected(1, -1);
  sub->add_flag("--header", a.header, "first line of each file is a header");
  CLI::Option* b =
      sub->add_option("--burnin", a.burnin, "iterations to drop from each chain")
          ->check(CLI::NonNegativeNumber);
  sub->add_flag("--burnin-half", a.burnin_half, "drop the first half of each chain")
      ->excludes(b);
}

ChainsetPtr load_chains(const ChainArgs& a) {
  std::vector<const char*> paths;
  paths.reserve(a.files.size());
  for (const std::string& f : a.files) paths.push_back(f.c_str());
  mcd_chainset* cs = nullptr;
  check(mcd_chainset_load_csv(paths.data(), static_cast<int64_t>(paths.size()),
                              a.header ? 1 : 0, a.burnin_half ? 0 : a.burnin, &cs));
  ChainsetPtr out(cs);
  if (a.burnin_half) {
    mcd_chainset* dropped = nullptr;
    check(mcd_chainset_drop_burnin(out.get(), mcd_chainset_iterations(out.get()) / 2,
                                   &dropped));
    out.reset(dropped);
  }
  return out;
}

struct CutoffArgs {
  double delta = 0.0;
  double alpha = 0.05;
  double eps = 0.10;
  int64_t min_effort = 0;
};

void add_cutoff_options(CLI::App* sub, CutoffArgs& a) {
  sub->add_option("--delta", a.delta,
                  "direct PSRF cutoff; overrides the alpha/eps prescription");
  sub->add_option("--alpha", a.alpha, "confidence level parameter")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  sub->add_option("--eps,--epsilon", a.eps, "relative precision of the prescription")
      ->check(CLI::PositiveNumber);
  sub->add_option("--min-effort", a.min_effort,
                  "iteration floor before convergence may be declared");
}

struct StatArgs {
  std::string stat = "lugsail";
  std::string mv;
  std::string batch = "sqrt";
};

void add_stat_options(CLI::App* sub, StatArgs& a) {
  sub->add_option("--stat", a.stat, "statistic family")
      ->check(CLI::IsMember({"lugsail", "classic"}));
  sub->add_option("--mv", a.mv, "multivariate scope: det (lugsail) or maxeig (classic)")
      ->check(CLI::IsMember({"det", "maxeig"}));
  sub->add_option("--batch", a.batch, "batch size policy: sqrt, cube, or an integer");
}

void fill_options(mcd_diag_options& o, const StatArgs& s, const CutoffArgs& c) {
  mcd_diag_options_init(&o);
  o.statistic = pick_statistic(s.stat, s.mv);
  parse_batch(s.batch, o.batch_policy, o.batch_size);
  o.delta = c.delta;
  o.alpha = c.alpha;
  o.epsilon = c.eps;
  o.min_effort = c.min_effort;
}

std::string spec_from_args(const std::string& file, const std::string& inline_json) {
  if (!inline_json.empty()) return inline_json;
  return read_text_file(file);
}

}  // namespace

void register_diagnose(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "diagnose", "Convergence report for externally produced chains");
  auto chain = std::make_shared<ChainArgs>();
  auto stat = std::make_shared<StatArgs>();
  auto cut = std::make_shared<CutoffArgs>();
  add_chain_options(sub, *chain);
  add_stat_options(sub, *stat);
  add_cutoff_options(sub, *cut);
  sub->callback([chain, stat, cut, &rc] {
    mcd_diag_options opt;
    fill_options(opt, *stat, *cut);
    ChainsetPtr cs = load_chains(*chain);
    mcd_report* raw = nullptr;
    check(mcd_diagnose(cs.get(), &opt, &raw));
    ReportPtr report(raw);
    CStringPtr text(mcd_report_json(report.get()));
    std::printf("%s\n", text.get());
    rc = mcd_report_converged(report.get()) ? 0 : 3;
  });
}

void register_threshold(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "threshold", "Minimum effective sample size and the PSRF cutoff it implies");
  struct Args {
    double alpha = 0.05;
    double eps = 0.10;
    int64_t p = 0;
    int64_t m = 0;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("--alpha", a->alpha, "confidence level parameter")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  sub->add_option("--eps,--epsilon", a->eps, "relative precision")
      ->check(CLI::PositiveNumber);
  sub->add_option("--p", a->p, "dimension of the quantity being estimated")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_option("--m", a->m, "number of chains")->required()->check(
      CLI::PositiveNumber);
  sub->callback([a, &rc] {
    mcd_threshold t;
    check(mcd_compute_threshold(a->alpha, a->eps, a->p, a->m, &t));
    double q = 0.0;
    check(mcd_chi2_quantile(1.0 - a->alpha, static_cast<double>(a->p), &q));
    json j;
    j["schema_version"] = 1;
    j["alpha"] = t.alpha;
    j["epsilon"] = t.epsilon;
    j["p"] = t.p;
    j["m"] = t.m;
    j["chi2_quantile"] = q;
    j["min_ess"] = t.min_ess;
    j["min_ess_ceiled"] = t.min_ess_ceiled;
    j["delta"] = t.delta;
    std::printf("%s\n", j.dump(2).c_str());
    rc = 0;
  });
}

void register_ess(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "ess", "Effective sample size of chain files against the prescription");
  auto chain = std::make_shared<ChainArgs>();
  auto a = std::make_shared<CutoffArgs>();
  auto batch = std::make_shared<std::string>("sqrt");
  add_chain_options(sub, *chain);
  sub->add_option("--batch", *batch, "batch size policy: sqrt, cube, or an integer");
  sub->add_option("--alpha", a->alpha, "confidence level parameter")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  sub->add_option("--eps,--epsilon", a->eps, "relative precision")
      ->check(CLI::PositiveNumber);
  sub->callback([chain, a, batch, &rc] {
    int policy = MCD_BATCH_SQRT;
    int64_t size = 0;
    parse_batch(*batch, policy, size);
    ChainsetPtr cs = load_chains(*chain);
    double ess = 0.0;
    int64_t batch_used = 0;
    int repaired = 0;
    check(mcd_ess(cs.get(), policy, size, &ess, &batch_used, &repaired));
    mcd_threshold t;
    check(mcd_compute_threshold(a->alpha, a->eps, mcd_chainset_dimension(cs.get()),
                                mcd_chainset_chains(cs.get()), &t));
    const bool sufficient = ess >= t.min_ess_ceiled;
    json j;
    j["schema_version"] = 1;
    j["ess"] = ess;
    j["batch"] = batch_used;
    j["psd_repaired"] = repaired != 0;
    j["chains"] = mcd_chainset_chains(cs.get());
    j["iterations"] = mcd_chainset_iterations(cs.get());
    j["dimension"] = mcd_chainset_dimension(cs.get());
    j["alpha"] = t.alpha;
    j["epsilon"] = t.epsilon;
    j["min_ess"] = t.min_ess;
    j["min_ess_ceiled"] = t.min_ess_ceiled;
    j["delta"] = t.delta;
    j["sufficient"] = sufficient;
    std::printf("%s\n", j.dump(2).c_str());
    rc = sufficient ? 0 : 3;
  });
}

void register_simulate(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "simulate", "Run a built-in sampler and write one CSV per chain");
  struct Args {
    std::string spec_file;
    std::string spec_json;
    int64_t n = 0;
    std::string out_prefix;
    bool header = false;
  };
  auto a = std::make_shared<Args>();
  CLI::Option* f = sub->add_option("--spec", a->spec_file, "sampler spec JSON file");
  sub->add_option("--spec-json", a->spec_json, "sampler spec JSON inline")
      ->excludes(f);
  sub->add_option("-n,--iterations", a->n, "iterations per chain")
      ->required()
      ->check(CLI::Range(static_cast<int64_t>(2), static_cast<int64_t>(1) << 40));
  sub->add_option("--out-prefix", a->out_prefix, "chain files <prefix>_<i>.csv")
      ->required();
  sub->add_flag("--header", a->header, "write a header line");
  sub->callback([a, &rc] {
    if (a->spec_file.empty() && a->spec_json.empty())
      throw std::runtime_error("one of --spec / --spec-json is required");
    const std::string spec = spec_from_args(a->spec_file, a->spec_json);
    mcd_sampler* raw = nullptr;
    check(mcd_sampler_create(spec.c_str(), &raw));
    SamplerPtr sampler(raw);
    check(mcd_sampler_run(sampler.get(), a->n));
    mcd_chainset* cs_raw = nullptr;
    check(mcd_sampler_chains(sampler.get(), &cs_raw));
    ChainsetPtr cs(cs_raw);
    const int64_t m = mcd_chainset_chains(cs.get());
    std::vector<double> acceptance(static_cast<std::size_t>(m), 0.0);
    check(mcd_sampler_acceptance(sampler.get(), acceptance.data()));
    json files = json::array();
    for (int64_t i = 0; i < m; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "_%" PRId64 ".csv", i + 1);
      const std::string path = a->out_prefix + name;
      check(mcd_chainset_write_csv(cs.get(), i, path.c_str(), a->header ? 1 : 0));
      files.push_back(path);
    }
    json j;
    j["schema_version"] = 1;
    j["chains"] = m;
    j["iterations"] = mcd_chainset_iterations(cs.get());
    j["dimension"] = mcd_chainset_dimension(cs.get());
    j["acceptance"] = acceptance;
    j["files"] = files;
    std::printf("%s\n", j.dump(2).c_str());
    rc = 0;
  });
}

void register_monitor(CLI::App& app, int& rc) {
  auto* sub = app.add_subcommand(
      "monitor", "Grow a built-in sampler until the statistic clears the cutoff");
  struct Args {
    std::string spec_file;
    std::string spec_json;
    StatArgs stat;
    CutoffArgs cut;
    std::string schedule = "geometric";
    int64_t start = 100;
    int64_t increment = 100;
    double rate = 1.5;
    int64_t cap = 100000;
    int64_t burnin = 0;
    std::string trace_file;
    std::string out_prefix;
    bool header = false;
  };
  auto a = std::make_shared<Args>();
  CLI::Option* f = sub->add_option("--spec", a->spec_file, "sampler spec JSON file");
  sub->add_option("--spec-json", a->spec_json, "sampler spec JSON inline")
      ->excludes(f);
  add_stat_options(sub, a->stat);
  add_cutoff_options(sub, a->cut);
  sub->add_option("--schedule", a->schedule, "checkpoint spacing")
      ->check(CLI::IsMember({"fixed", "geometric"}));
  sub->add_option("--start", a->start, "first checkpoint")
      ->check(CLI::Range(static_cast<int64_t>(2), static_cast<int64_t>(1) << 40));
  sub->add_option("--increment", a->increment, "fixed schedule step")
      ->check(CLI::PositiveNumber);
  sub->add_option("--rate", a->rate, "geometric schedule growth factor");
  sub->add_option("--cap", a->cap, "hard per-chain iteration cap")
      ->check(CLI::Range(static_cast<int64_t>(2), static_cast<int64_t>(1) << 40));
  sub->add_option("--burnin", a->burnin, "iterations dropped before each evaluation")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--trace", a->trace_file, "write the checkpoint trace CSV here");
  sub->add_option("--out-prefix", a->out_prefix,
                  "also write final chains to <prefix>_<i>.csv");
  sub->add_flag("--header", a->header, "write header lines in chain files");
  sub->callback([a, &rc] {
    if (a->spec_file.empty() && a->spec_json.empty())
      throw std::runtime_error("one of --spec / --spec-json is required");
    const std::string spec = spec_from_args(a->spec_file, a->spec_json);
    mcd_monitor_plan plan;
    mcd_monitor_plan_init(&plan);
    fill_options(plan.options, a->stat, a->cut);
    plan.schedule = a->schedule == "fixed" ? MCD_SCHEDULE_FIXED : MCD_SCHEDULE_GEOMETRIC;
    plan.start = a->start;
    plan.increment = a->increment;
    plan.rate = a->rate;
    plan.max_iterations = a->cap;
    plan.burnin = a->burnin;
    mcd_monitor_result* raw = nullptr;
    check(mcd_monitor_run(spec.c_str(), &plan, &raw));
    MonitorPtr result(raw);

    if (!a->trace_file.empty()) {
      CStringPtr csv(mcd_monitor_trace_csv(result.get()));
      write_text_file_atomic(a->trace_file, csv.get());
    }
    mcd_chainset* cs_raw = nullptr;
    check(mcd_monitor_chains(result.get(), &cs_raw));
    ChainsetPtr cs(cs_raw);
    if (!a->out_prefix.empty()) {
      for (int64_t i = 0; i < mcd_chainset_chains(cs.get()); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "_%" PRId64 ".csv", i + 1);
        check(mcd_chainset_write_csv(cs.get(), i, (a->out_prefix + name).c_str(),
                                     a->header ? 1 : 0));
      }
    }

    mcd_report* rep_raw = nullptr;
    check(mcd_monitor_report(result.get(), &rep_raw));
    ReportPtr report(rep_raw);
    CStringPtr text(mcd_report_json(report.get()));
    json j = json::parse(text.get());
    const bool met = mcd_monitor_reason(result.get()) == MCD_STOP_THRESHOLD;
    j["reason"] = met ? "threshold_met" : "cap_hit";
    j["checkpoints"] = mcd_monitor_checkpoints(result.get());
    int64_t last_n = 0;
    check(mcd_monitor_row(result.get(), mcd_monitor_checkpoints(result.get()) - 1,
                          &last_n, nullptr, nullptr, nullptr));
    j["termination_n"] = last_n;
    std::vector<double> acceptance(
        static_cast<std::size_t>(mcd_chainset_chains(cs.get())), 0.0);
    check(mcd_monitor_acceptance(result.get(), acceptance.data()));
    j["acceptance"] = acceptance;
    std::printf("%s\n", j.dump(2).c_str());
    rc = met ? 0 : 3;
  });
}
