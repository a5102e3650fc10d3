#include "core/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace mcdiag {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate(const MonitorPlan& plan) {
  if (!(plan.delta > 0.0)) fail(Errc::invalid_argument, "monitor: delta must be positive");
  if (plan.min_effort < 1) fail(Errc::invalid_argument, "monitor: min_effort must be >= 1");
  if (plan.schedule.start < 2)
    fail(Errc::invalid_argument, "monitor: first checkpoint must be >= 2");
  if (plan.schedule.kind == Schedule::Kind::fixed_increment && plan.schedule.increment < 1)
    fail(Errc::invalid_argument, "monitor: increment must be >= 1");
  if (plan.schedule.kind == Schedule::Kind::geometric && !(plan.schedule.rate > 1.0))
    fail(Errc::invalid_argument, "monitor: geometric rate must exceed 1");
  if (plan.max_iterations < 2)
    fail(Errc::invalid_argument, "monitor: iteration cap must be >= 2");
}

PsrfReport max_component_report(const ChainSet& cs, StatKind kind, const BatchConfig& cfg) {
  const std::size_t p = cs.dimension();
  std::vector<PsrfReport> reports;
  reports.reserve(p);
  for (std::size_t k = 0; k < p; ++k)
    reports.push_back(kind == StatKind::lugsail ? psrf_lugsail_component(cs, cfg, k)
                                                : psrf_classic_component(cs, k));
  std::size_t worst = 0;
  for (std::size_t k = 1; k < p; ++k)
    if (reports[k].value > reports[worst].value) worst = k;
  PsrfReport r = reports[worst];
  r.component_values.resize(p);
  for (std::size_t k = 0; k < p; ++k) r.component_values[k] = reports[k].value;
  return r;
}

}  // namespace

std::size_t Schedule::next(std::size_t n) const {
  if (kind == Kind::fixed_increment) return n + increment;
  // round, not ceil: an inexact rate like 1.1 must not skip past the exact
  // product when it lands a hair above an integer
  const auto grown = static_cast<std::size_t>(std::llround(static_cast<double>(n) * rate));
  return std::max(n + 1, grown);
}

Diagnosis evaluate_statistic(const ChainSet& cs, MonitorStatistic stat,
                             const BatchConfig& cfg) {
  Diagnosis d;
  d.n = cs.iterations();
  switch (stat) {
    case MonitorStatistic::lugsail_uni:
      d.psrf = cs.dimension() == 1 ? psrf_lugsail(cs, cfg)
                                   : max_component_report(cs, StatKind::lugsail, cfg);
      break;
    case MonitorStatistic::lugsail_det:
      d.psrf = psrf_multivariate_lugsail(cs, cfg);
      break;
    case MonitorStatistic::classic_uni:
      d.psrf = cs.dimension() == 1 ? psrf_classic(cs)
                                   : max_component_report(cs, StatKind::classic, cfg);
      break;
    case MonitorStatistic::classic_maxeig:
      d.psrf = cs.dimension() == 1 ? psrf_classic(cs) : psrf_multivariate_classic(cs);
      break;
  }
  try {
    const EssEstimate e = ess_estimate(cs, cfg);
    d.ess = e.ess;
    d.ess_repaired = e.psd_repaired;
  } catch (const Error&) {
    d.ess = kNan;
  }
  return d;
}

Diagnosis diagnose_static(const ChainSet& cs, const MonitorPlan& plan) {
  std::optional<ChainSet> trimmed;
  if (plan.burnin > 0) trimmed.emplace(cs.drop_burnin(plan.burnin));
  Diagnosis d = evaluate_statistic(trimmed ? *trimmed : cs, plan.statistic, plan.batch);
  d.converged = std::isfinite(d.psrf.value) && d.psrf.value <= plan.delta &&
                d.n >= plan.min_effort;
  return d;
}

MonitorResult run_monitor(const SamplerSpec& spec, const MonitorPlan& plan) {
  validate(plan);
  SamplerRun run(spec);
  std::vector<TraceEntry> trace;
  StopReason reason = StopReason::cap_hit;
  Diagnosis last;

  std::size_t n = std::min(plan.schedule.start, plan.max_iterations);
  for (;;) {
    run.extend_to(n);
    const ChainSet cs = run.snapshot();
    Diagnosis d;
    bool evaluated = true;
    try {
      std::optional<ChainSet> trimmed;
      if (plan.burnin > 0) trimmed.emplace(cs.drop_burnin(plan.burnin));
      d = evaluate_statistic(trimmed ? *trimmed : cs, plan.statistic, plan.batch);
    } catch (const Error&) {
      evaluated = false;
    }

    TraceEntry entry;
    entry.n = n;
    if (evaluated) {
      entry.psrf = d.psrf.value;
      entry.ess = d.ess;
      entry.converged = std::isfinite(d.psrf.value) && d.psrf.value <= plan.delta &&
                        n >= plan.min_effort;
      d.n = n;
      d.converged = entry.converged;
      last = d;
    } else {
      entry.psrf = kNan;
      entry.ess = kNan;
      entry.converged = false;
      last = Diagnosis{};
      last.psrf.value = kNan;
      last.ess = kNan;
      last.n = n;
    }
    trace.push_back(entry);

    if (entry.converged) {
      reason = StopReason::threshold_met;
      break;
    }
    if (n >= plan.max_iterations) {
      reason = StopReason::cap_hit;
      break;
    }
    n = std::min(plan.schedule.next(n), plan.max_iterations);
  }

  return MonitorResult{std::move(trace), reason, std::move(last), run.snapshot(),
                       run.acceptance_rates()};
}

}  // namespace mcdiag
