#include "seqfdr/engine.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "seqfdr/rng.hpp"

namespace seqfdr {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string rule_name(const RuleSpec& rule) {
  return std::visit(overloaded{[](const GapRule&) { return std::string("gap"); },
                               [](const GapIntersectionRule&) { return std::string("gap-intersection"); },
                               [](const IntersectionRule&) { return std::string("intersection"); },
                               [](const FixedSampleRule& r) {
                                 return std::string(r.kind == FixedSampleKind::bh ? "bh" : "top-m");
                               }},
                    rule);
}

std::string rule_size_label(const RuleSpec& rule) {
  return std::visit(overloaded{[](const GapRule& r) { return std::to_string(r.signals()); },
                               [](const GapIntersectionRule& r) {
                                 return std::to_string(r.lower()) + ".." + std::to_string(r.upper());
                               },
                               [](const IntersectionRule&) { return std::string(); },
                               [](const FixedSampleRule& r) {
                                 return r.kind == FixedSampleKind::top_m ? std::to_string(r.m) : std::string();
                               }},
                    rule);
}

std::string rule_threshold_label(const RuleSpec& rule) {
  return std::visit(overloaded{[](const GapRule& r) { return format_number(r.threshold()); },
                               [](const GapIntersectionRule& r) {
                                 const GiThresholds& t = r.thresholds();
                                 return format_number(t.a) + " " + format_number(t.b) + " " + format_number(t.c) +
                                        " " + format_number(t.d);
                               },
                               [](const IntersectionRule& r) { return format_number(r.a()) + " " + format_number(r.b()); },
                               [](const FixedSampleRule& r) { return std::to_string(r.n); }},
                    rule);
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (truth.universe() != profile.size())
    throw std::invalid_argument("truth refers to " + std::to_string(truth.universe()) + " streams but J = " +
                                std::to_string(profile.size()));
  budget.validate();
  std::visit(overloaded{[&](const GapRule& r) { r.validate(profile.size()); },
                        [&](const GapIntersectionRule& r) { r.validate(profile.size()); },
                        [](const IntersectionRule&) {},
                        [&](const FixedSampleRule& r) {
                          r.validate(profile.size());
                          for (const StreamModel& m : profile.models())
                            if (m.family() != Family::gaussian_mean)
                              throw std::invalid_argument("fixed-sample rules need gaussian-mean streams");
                        }},
             rule);
  for (MetricKind k : metrics)
    if (k == MetricKind::fpr && truth.empty())
      throw std::invalid_argument("fpr needs at least one signal (its divisor is |A|)");
}

const MetricEstimate& ExperimentReport::metric(MetricKind kind) const {
  for (const auto& [k, est] : metrics)
    if (k == kind) return est;
  throw std::out_of_range("metric " + std::string(to_string(kind)) + " was not requested");
}

bool same_results(const ExperimentReport& lhs, const ExperimentReport& rhs) {
  return lhs.mean_stopping_time == rhs.mean_stopping_time && lhs.metrics == rhs.metrics &&
         lhs.stopped_by == rhs.stopped_by && lhs.horizon_hits == rhs.horizon_hits;
}

unsigned default_workers() {
  if (const char* env = std::getenv("SEQFDR_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index) {
  CounterRng rng(config.master_seed, trial_index);
  const Decision decision = std::visit(
      overloaded{[&](const FixedSampleRule& r) { return run_fixed_sample(r, config.profile, config.truth, rng); },
                 [&](const auto& r) {
                   return run_sequential(SequentialRule(r), config.profile, config.truth, config.horizon, rng);
                 }},
      config.rule);
  return {trial_index, decision.stopping_time, confusion(decision.rejected, config.truth), decision.stopped_by,
          decision.horizon_hit()};
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  if (workers == 0) workers = default_workers();
  const std::size_t total = config.replications;
  std::vector<TrialRecord> records(total);
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= total) return;
        const std::size_t end = std::min(total, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) records[i] = run_trial(config, i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(total);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

ExperimentReport summarize(const ExperimentConfig& config, std::span<const TrialRecord> trials) {
  if (trials.empty()) throw std::invalid_argument("no trials to summarize");
  ExperimentReport report{config, {}, {}, {}, 0, 0.0};

  std::vector<double> times;
  std::vector<ConfusionCounts> counts;
  times.reserve(trials.size());
  counts.reserve(trials.size());
  std::map<StopReason, std::size_t> reasons;
  for (const TrialRecord& t : trials) {
    times.push_back(static_cast<double>(t.stopping_time));
    counts.push_back(t.counts);
    ++reasons[t.stopped_by];
    if (t.horizon_hit) ++report.horizon_hits;
  }
  report.mean_stopping_time = mean_estimate(times);
  report.stopped_by.assign(reasons.begin(), reasons.end());

  const std::size_t fpr_divisor = config.truth.size();
  for (MetricKind kind : config.metrics) {
    try {
      report.metrics.emplace_back(kind, aggregate(kind, counts, fpr_divisor));
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " (rule " + rule_name(config.rule) + ", J = " +
                              std::to_string(config.profile.size()) + ", |A| = " + std::to_string(config.truth.size()) +
                              ", seed " + std::to_string(config.master_seed) + ")");
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<TrialRecord> trials = run_trials(config, workers);
  ExperimentReport report = summarize(config, trials);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SweepReport asymptotic_sweep(const ExperimentConfig& base, std::span<const ErrorBudget> budgets,
                             std::size_t reps_per_point, unsigned workers, MetricKind controlled) {
  const std::size_t streams = base.profile.size();
  const Eta eta_a = eta(base.profile, base.truth);
  SweepReport out;
  out.rule = rule_name(base.rule);
  out.signals = base.truth.size();

  for (std::size_t point = 0; point < budgets.size(); ++point) {
    const ErrorBudget& budget = budgets[point];
    ExperimentConfig config = base;
    config.budget = budget;
    config.replications = reps_per_point;
    config.master_seed = mix_seed(base.master_seed, point);

    SweepRow row;
    row.budget = budget;
    if (const auto* gap = std::get_if<GapRule>(&base.rule)) {
      const BoundConstants k = bound_constants(controlled, RuleClass::gap, streams, gap->signals(), 0, 0);
      const double c = gap_threshold(budget, gap->signals(), streams, std::max(k.c1_type1, k.c1_type2));
      config.rule = GapRule(gap->signals(), c);
      row.thresholds = {c};
      row.kappa = kappa_gap(budget, eta_a.eta0, eta_a.eta1);
    } else if (const auto* gi = std::get_if<GapIntersectionRule>(&base.rule)) {
      const BoundConstants k =
          bound_constants(controlled, RuleClass::gap_intersection, streams, 0, gi->lower(), gi->upper());
      const GiThresholds th =
          gi_thresholds(budget, streams, gi->lower(), gi->upper(), std::max(k.c1_type1, k.c1_type2));
      config.rule = GapIntersectionRule(gi->lower(), gi->upper(), th);
      row.thresholds = {th.a, th.b, th.c, th.d};
      row.kappa = kappa_gi(budget, eta_a.eta0, eta_a.eta1, base.truth.size(), gi->lower(), gi->upper());
    } else {
      throw std::invalid_argument("asymptotic sweeps need a gap or gap-intersection rule");
    }

    const ExperimentReport report = run_experiment(config, workers);
    row.mean_stopping_time = report.mean_stopping_time;
    row.ratio = report.mean_stopping_time.value / row.kappa;
    row.horizon_hits = report.horizon_hits;
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

constexpr TablePreset kTable10[] = {
    {1, 3.5, 70, 50}, {2, 2.9, 60, 46}, {3, 2.6, 59, 45}, {4, 2.3, 54, 40}, {5, 2.1, 52, 37},
    {6, 2.3, 54, 40}, {7, 2.5, 56, 43}, {8, 2.8, 60, 45}, {9, 3.4, 65, 50},
};

constexpr TablePreset kTable100[] = {
    {1, 3.9, 90, 77},  {10, 1.9, 70, 68}, {20, 1.3, 65, 62}, {30, 1.0, 60, 57}, {40, 0.8, 56, 50}, {50, 0.7, 53, 47},
    {60, 0.8, 56, 50}, {70, 1.0, 60, 57}, {80, 1.3, 64, 63}, {90, 1.9, 72, 71}, {99, 3.9, 90, 79},
};

constexpr double kStudyMeanShift = 0.5;
constexpr double kStudyBhLevel = 0.05;

}  // namespace

StudyTable parse_study_table(std::string_view name) {
  if (name == "table1") return StudyTable::table1;
  if (name == "table2") return StudyTable::table2;
  throw std::invalid_argument("unknown table '" + std::string(name) + "' (expected table1 or table2)");
}

std::string_view to_string(StudyTable table) { return table == StudyTable::table1 ? "table1" : "table2"; }

std::size_t table_streams(StudyTable table) { return table == StudyTable::table1 ? 10 : 100; }

std::span<const TablePreset> table_presets(StudyTable table) {
  if (table == StudyTable::table1) return kTable10;
  return kTable100;
}

std::vector<TableRow> reproduce_table(StudyTable table, std::span<const std::size_t> rows, std::size_t reps,
                                      std::uint64_t seed, unsigned workers) {
  const std::size_t streams = table_streams(table);
  const auto presets = table_presets(table);
  const StreamProfile profile = StreamProfile::homogeneous(StreamModel::gaussian(0.0, kStudyMeanShift), streams);

  std::vector<TableRow> out;
  out.reserve(rows.size());
  for (std::size_t m : rows) {
    const auto it = std::find_if(presets.begin(), presets.end(), [m](const TablePreset& p) { return p.m == m; });
    if (it == presets.end())
      throw std::invalid_argument("m = " + std::to_string(m) + " is not a row of " + std::string(to_string(table)));

    ExperimentConfig config{profile, SignalSet::first(m, streams), GapRule(m, it->c)};
    config.replications = reps;
    config.metrics = {MetricKind::fdr, MetricKind::fnr};

    TableRow row{*it, {}, {}, {}, {}, {}, 0.0, {}, {}, 0.0, 0};

    config.master_seed = mix_seed(seed, 3 * m);
    const ExperimentReport gap = run_experiment(config, workers);
    row.gap_et = gap.mean_stopping_time;
    row.gap_fdr = gap.metric(MetricKind::fdr);
    row.gap_fnr = gap.metric(MetricKind::fnr);
    row.horizon_hits = gap.horizon_hits;

    config.rule = FixedSampleRule::bh(it->bh_n, kStudyBhLevel);
    config.master_seed = mix_seed(seed, 3 * m + 1);
    const ExperimentReport bh = run_experiment(config, workers);
    row.bh_fdr = bh.metric(MetricKind::fdr);
    row.bh_fnr = bh.metric(MetricKind::fnr);
    row.bh_savings = savings(row.gap_et.value, it->bh_n);

    config.rule = FixedSampleRule::top_m(it->topm_n, m);
    config.master_seed = mix_seed(seed, 3 * m + 2);
    const ExperimentReport topm = run_experiment(config, workers);
    row.topm_fdr = topm.metric(MetricKind::fdr);
    row.topm_fnr = topm.metric(MetricKind::fnr);
    row.topm_savings = savings(row.gap_et.value, it->topm_n);

    out.push_back(row);
  }
  return out;
}

}  // namespace seqfdr
