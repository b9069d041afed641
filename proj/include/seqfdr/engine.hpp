#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "seqfdr/metrics.hpp"
#include "seqfdr/model.hpp"
#include "seqfdr/rules.hpp"
#include "seqfdr/thresholds.hpp"

namespace seqfdr {

using RuleSpec = std::variant<GapRule, GapIntersectionRule, IntersectionRule, FixedSampleRule>;

/// "gap", "gap-intersection", "intersection", "bh" or "top-m".
std::string rule_name(const RuleSpec& rule);
/// m for gap/top-m rules, "l..u" for gap-intersection, empty otherwise.
std::string rule_size_label(const RuleSpec& rule);
/// Threshold(s) or sample size, space separated.
std::string rule_threshold_label(const RuleSpec& rule);

inline constexpr std::size_t kDefaultHorizon = 1'000'000;

struct ExperimentConfig {
  StreamProfile profile;
  SignalSet truth;
  RuleSpec rule;
  ErrorBudget budget{};
  std::size_t replications = 10'000;
  std::uint64_t master_seed = 1;
  std::size_t horizon = kDefaultHorizon;
  std::vector<MetricKind> metrics{MetricKind::fdr, MetricKind::fnr};

  void validate() const;
};

struct TrialRecord {
  std::size_t index = 0;
  std::size_t stopping_time = 0;
  ConfusionCounts counts;
  StopReason stopped_by = StopReason::horizon;
  bool horizon_hit = false;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  MetricEstimate mean_stopping_time;
  std::vector<std::pair<MetricKind, MetricEstimate>> metrics;
  std::vector<std::pair<StopReason, std::size_t>> stopped_by;
  std::size_t horizon_hits = 0;
  double wall_time = 0.0;

  const MetricEstimate& metric(MetricKind kind) const;
};

/// Results identical in every field except wall time.
bool same_results(const ExperimentReport& lhs, const ExperimentReport& rhs);

/// Worker count from SEQFDR_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// One replication.  A pure function of (config, trial_index): the trial's
/// random substream is keyed by (master_seed, trial_index).
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index);

/// All replications, indexed by trial.  `workers == 0` picks default_workers().
std::vector<TrialRecord> run_trials(const ExperimentConfig& config, unsigned workers = 0);

/// Aggregates trial records (in index order) into a report.
ExperimentReport summarize(const ExperimentConfig& config, std::span<const TrialRecord> trials);

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers = 0);

struct SweepRow {
  ErrorBudget budget;
  std::vector<double> thresholds;
  MetricEstimate mean_stopping_time;
  double kappa = 0.0;
  double ratio = 0.0;
  std::size_t horizon_hits = 0;
};

struct SweepReport {
  std::string rule;
  std::size_t signals = 0;
  std::vector<SweepRow> rows;
};

/// Runs the base configuration's rule (gap or gap-intersection) with
/// formula thresholds at each error budget and compares the mean stopping
/// time to its first-order benchmark kappa.  `controlled` selects the
/// metric whose C1 rescales the thresholds.
SweepReport asymptotic_sweep(const ExperimentConfig& base, std::span<const ErrorBudget> budgets,
                             std::size_t reps_per_point, unsigned workers = 0,
                             MetricKind controlled = MetricKind::fdr);

enum class StudyTable { table1, table2 };

StudyTable parse_study_table(std::string_view name);
std::string_view to_string(StudyTable table);

/// Settings of one row of the Gaussian N(0,1) vs N(1/2,1) study.
struct TablePreset {
  std::size_t m;
  double c;
  std::size_t bh_n;
  std::size_t topm_n;
};

std::size_t table_streams(StudyTable table);
std::span<const TablePreset> table_presets(StudyTable table);

struct TableRow {
  TablePreset preset;
  MetricEstimate gap_et;
  MetricEstimate gap_fdr;
  MetricEstimate gap_fnr;
  MetricEstimate bh_fdr;
  MetricEstimate bh_fnr;
  double bh_savings = 0.0;
  MetricEstimate topm_fdr;
  MetricEstimate topm_fnr;
  double topm_savings = 0.0;
  std::size_t horizon_hits = 0;
};

/// Expected savings of a sequential rule over a fixed sample size n.
inline double savings(double mean_stopping_time, std::size_t n) {
  return 1.0 - mean_stopping_time / static_cast<double>(n);
}

/// Runs the gap rule, BH (alpha = 0.05) and top-m at each requested row's
/// preset settings.  Throws if a row's m is not part of the table.
std::vector<TableRow> reproduce_table(StudyTable table, std::span<const std::size_t> rows, std::size_t reps,
                                      std::uint64_t seed, unsigned workers = 0);

}  // namespace seqfdr
