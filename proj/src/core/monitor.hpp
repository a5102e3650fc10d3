#pragma once

#include <cstddef>
#include <vector>

#include "core/ess.hpp"
#include "core/psrf.hpp"
#include "core/samplers.hpp"

namespace mcdiag {

// Which statistic gates termination. The univariate kinds applied to p > 1
// data take the worst (largest) value across components.
enum class MonitorStatistic {
  lugsail_uni,
  lugsail_det,
  classic_uni,
  classic_maxeig,
};

struct Schedule {
  enum class Kind { fixed_increment, geometric };
  Kind kind = Kind::fixed_increment;
  std::size_t start = 100;    // first checkpoint, per-chain iterations
  std::size_t increment = 100;
  double rate = 1.5;          // geometric: n' = max(n+1, round(n * rate))
  std::size_t next(std::size_t n) const;
};

struct MonitorPlan {
  MonitorStatistic statistic = MonitorStatistic::lugsail_det;
  BatchConfig batch;
  double delta = 0.0;          // stop once the statistic drops to <= delta
  std::size_t min_effort = 1;  // ... and the entry's n has reached this
  Schedule schedule;
  std::size_t max_iterations = 0;  // hard per-chain cap
  std::size_t burnin = 0;          // dropped before every evaluation
};

// One evaluation of the gating statistic plus the effective sample size.
// For run_monitor, n is the per-chain checkpoint length including burn-in;
// for diagnose_static it is the post-burn-in length actually evaluated.
struct Diagnosis {
  PsrfReport psrf;
  double ess = 0.0;
  bool ess_repaired = false;
  std::size_t n = 0;
  bool converged = false;
};

Diagnosis evaluate_statistic(const ChainSet& cs, MonitorStatistic stat,
                             const BatchConfig& cfg);

Diagnosis diagnose_static(const ChainSet& cs, const MonitorPlan& plan);

struct TraceEntry {
  std::size_t n = 0;
  double psrf = 0.0;
  double ess = 0.0;
  bool converged = false;
};

enum class StopReason { threshold_met, cap_hit };

struct MonitorResult {
  std::vector<TraceEntry> trace;
  StopReason reason = StopReason::cap_hit;
  Diagnosis last;          // evaluation backing the final trace entry
  ChainSet chains;         // full run, burn-in included
  std::vector<double> acceptance;
};

// Extend the sampler to each checkpoint in turn and evaluate the statistic
// there. A checkpoint where the estimate cannot be formed (too little data,
// degenerate variance) records NaN and the run continues. Stops at the first
// converged checkpoint or once the cap has been evaluated.
MonitorResult run_monitor(const SamplerSpec& spec, const MonitorPlan& plan);

}  // namespace mcdiag
