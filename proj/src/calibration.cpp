#include "seqfdr/calibration.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "seqfdr/rng.hpp"

namespace seqfdr {

std::uint64_t calibration_search_seed(std::uint64_t seed) { return mix_seed(seed, 0xC0FFEEull); }
std::uint64_t calibration_evaluation_seed(std::uint64_t seed) { return mix_seed(seed, 0xE7A1ull); }

std::pair<MetricEstimate, MetricEstimate> estimate_fdr_fnr(const StreamProfile& profile, const SignalSet& truth,
                                                           const RuleSpec& rule, std::size_t replications,
                                                           std::uint64_t seed, std::size_t horizon, unsigned workers) {
  ExperimentConfig config{profile, truth, rule};
  config.replications = replications;
  config.master_seed = seed;
  config.horizon = horizon;
  config.metrics = {MetricKind::fdr, MetricKind::fnr};
  const ExperimentReport report = run_experiment(config, workers);
  if (report.horizon_hits > 0)
    throw std::runtime_error("calibration run hit the horizon in " + std::to_string(report.horizon_hits) + " trials");
  return {report.metric(MetricKind::fdr), report.metric(MetricKind::fnr)};
}

namespace {

// Memoized evaluation of grid indices 1..max_index, recording every visit.
class GridSearch {
 public:
  using Evaluate = std::function<CalibrationPoint(std::size_t)>;

  GridSearch(Evaluate evaluate, std::size_t max_index) : evaluate_(std::move(evaluate)), max_index_(max_index) {}

  const CalibrationPoint& at(std::size_t k) {
    auto it = memo_.find(k);
    if (it == memo_.end()) {
      it = memo_.emplace(k, evaluate_(k)).first;
      trace_.push_back(it->second);
    }
    return it->second;
  }

  /// Smallest accepted index, assuming acceptance is monotone in the index
  /// (bracket by doubling, then bisect) unless `full_scan` is set.
  std::optional<std::size_t> smallest_accepted(bool full_scan) {
    if (max_index_ == 0) return std::nullopt;
    if (full_scan) {
      for (std::size_t k = 1; k <= max_index_; ++k)
        if (at(k).accepted) return k;
      return std::nullopt;
    }
    if (at(1).accepted) return 1;
    std::size_t lo = 1;
    std::size_t hi = std::min<std::size_t>(2, max_index_);
    while (!at(hi).accepted) {
      if (hi == max_index_) return std::nullopt;
      lo = hi;
      hi = std::min(hi * 2, max_index_);
    }
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (at(mid).accepted)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  std::vector<CalibrationPoint> trace() const { return trace_; }

 private:
  Evaluate evaluate_;
  std::size_t max_index_;
  std::map<std::size_t, CalibrationPoint> memo_;
  std::vector<CalibrationPoint> trace_;
};

CalibrationResult start_result(std::string rule, std::string parameter, const CalibrationOptions& options,
                               std::string grid) {
  CalibrationResult r;
  r.rule = std::move(rule);
  r.parameter = std::move(parameter);
  r.replications = options.replications;
  r.grid = std::move(grid);
  r.search_seed = calibration_search_seed(options.seed);
  r.evaluation_seed = calibration_evaluation_seed(options.seed);
  return r;
}

void check_options(const CalibrationOptions& options) {
  if (options.replications < 1000) throw std::invalid_argument("calibration needs at least 1000 replications");
}

void finish(CalibrationResult& result, const StreamProfile& profile, const SignalSet& truth, const RuleSpec& rule,
            const CalibrationOptions& options) {
  const auto [fdr, fnr] =
      estimate_fdr_fnr(profile, truth, rule, options.replications, result.evaluation_seed, options.horizon,
                       options.workers);
  result.achieved = {{MetricKind::fdr, fdr}, {MetricKind::fnr, fnr}};
}

}  // namespace

CalibrationResult calibrate_gap_c(const StreamProfile& profile, const SignalSet& truth, std::size_t m,
                                  const ErrorBudget& targets, const CalibrationOptions& options) {
  check_options(options);
  targets.validate();
  if (!(options.grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
  GapRule(m, 1.0).validate(profile.size());

  std::ostringstream grid;
  grid << "c = k * " << options.grid_step << ", k = 1.." << options.c_cap << " / " << options.grid_step;
  CalibrationResult result = start_result("gap", "c", options, grid.str());
  const auto max_index = static_cast<std::size_t>(std::floor(options.c_cap / options.grid_step + 1e-9));

  GridSearch search(
      [&](std::size_t k) {
        const double c = static_cast<double>(k) * options.grid_step;
        const auto [fdr, fnr] = estimate_fdr_fnr(profile, truth, GapRule(m, c), options.replications,
                                                 result.search_seed, options.horizon, options.workers);
        return CalibrationPoint{c, fdr, fnr, fdr.value <= targets.alpha && fnr.value <= targets.beta};
      },
      max_index);
  const std::optional<std::size_t> k = search.smallest_accepted(options.full_scan);
  result.trace = search.trace();
  if (!k)
    throw CalibrationError("no threshold c <= " + std::to_string(options.c_cap) + " meets FDR <= " +
                               std::to_string(targets.alpha) + " and FNR <= " + std::to_string(targets.beta),
                           result);
  result.chosen = static_cast<double>(*k) * options.grid_step;
  finish(result, profile, truth, GapRule(m, result.chosen), options);
  return result;
}

CalibrationResult calibrate_bh_n(const StreamProfile& profile, const SignalSet& truth, double alpha, double target_fnr,
                                 const CalibrationOptions& options) {
  check_options(options);
  if (!(target_fnr > 0.0 && target_fnr < 1.0)) throw std::invalid_argument("target FNR must lie in (0, 1)");
  FixedSampleRule::bh(1, alpha);

  CalibrationResult result = start_result("bh", "n", options, "n = 1.." + std::to_string(options.n_cap));
  GridSearch search(
      [&](std::size_t n) {
        const auto [fdr, fnr] = estimate_fdr_fnr(profile, truth, FixedSampleRule::bh(n, alpha), options.replications,
                                                 result.search_seed, options.horizon, options.workers);
        return CalibrationPoint{static_cast<double>(n), fdr, fnr, fnr.value <= target_fnr};
      },
      options.n_cap);
  const std::optional<std::size_t> crossing = search.smallest_accepted(options.full_scan);
  if (!crossing) {
    result.trace = search.trace();
    throw CalibrationError("no BH sample size n <= " + std::to_string(options.n_cap) + " reaches FNR <= " +
                               std::to_string(target_fnr),
                           result);
  }
  // The closest point is the first n at or below the target or the one before it.
  std::size_t best = *crossing;
  if (best > 1) {
    const double below = std::abs(search.at(best - 1).fnr.value - target_fnr);
    const double at = std::abs(search.at(best).fnr.value - target_fnr);
    if (below <= at) best -= 1;
  }
  result.trace = search.trace();
  result.chosen = static_cast<double>(best);
  finish(result, profile, truth, FixedSampleRule::bh(best, alpha), options);
  return result;
}

CalibrationResult calibrate_topm_n(const StreamProfile& profile, const SignalSet& truth, std::size_t m,
                                   const ErrorBudget& targets, const CalibrationOptions& options) {
  check_options(options);
  targets.validate();
  FixedSampleRule::top_m(1, m).validate(profile.size());

  CalibrationResult result = start_result("top-m", "n", options, "n = 1.." + std::to_string(options.n_cap));
  GridSearch search(
      [&](std::size_t n) {
        const auto [fdr, fnr] = estimate_fdr_fnr(profile, truth, FixedSampleRule::top_m(n, m), options.replications,
                                                 result.search_seed, options.horizon, options.workers);
        return CalibrationPoint{static_cast<double>(n), fdr, fnr,
                                fdr.value <= targets.alpha && fnr.value <= targets.beta};
      },
      options.n_cap);
  const std::optional<std::size_t> n = search.smallest_accepted(options.full_scan);
  result.trace = search.trace();
  if (!n)
    throw CalibrationError("no top-m sample size n <= " + std::to_string(options.n_cap) + " meets the targets",
                           result);
  result.chosen = static_cast<double>(*n);
  finish(result, profile, truth, FixedSampleRule::top_m(*n, m), options);
  return result;
}

}  // namespace seqfdr
