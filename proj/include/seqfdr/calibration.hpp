#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqfdr/engine.hpp"

namespace seqfdr {

struct CalibrationOptions {
  std::size_t replications = 10'000;
  std::uint64_t seed = 1;
  double grid_step = 0.1;
  double c_cap = 50.0;
  std::size_t n_cap = 10'000;
  /// Scan every grid point from the bottom instead of bracketing and bisecting.
  bool full_scan = false;
  std::size_t horizon = kDefaultHorizon;
  unsigned workers = 0;
};

/// One evaluated grid point.
struct CalibrationPoint {
  double value = 0.0;
  MetricEstimate fdr;
  MetricEstimate fnr;
  bool accepted = false;
};

struct CalibrationResult {
  std::string rule;
  std::string parameter;  // "c" or "n"
  double chosen = 0.0;
  /// FDR/FNR at the chosen value, re-estimated with evaluation_seed.
  std::vector<std::pair<MetricKind, MetricEstimate>> achieved;
  std::size_t replications = 0;
  std::string grid;
  std::uint64_t search_seed = 0;
  std::uint64_t evaluation_seed = 0;
  std::vector<CalibrationPoint> trace;
};

/// Raised when no admissible point exists below the cap; carries the
/// search trace.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, CalibrationResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const CalibrationResult& partial() const noexcept { return partial_; }

 private:
  CalibrationResult partial_;
};

/// Smallest c on {step, 2 step, ...} (up to c_cap) whose estimated FDR and
/// FNR are both within the targets.
CalibrationResult calibrate_gap_c(const StreamProfile& profile, const SignalSet& truth, std::size_t m,
                                  const ErrorBudget& targets, const CalibrationOptions& options = {});

/// Integer BH sample size whose FNR is closest to target_fnr (ties to the
/// smaller n).
CalibrationResult calibrate_bh_n(const StreamProfile& profile, const SignalSet& truth, double alpha, double target_fnr,
                                 const CalibrationOptions& options = {});

/// Smallest integer n for which top-m has FDR and FNR within the targets.
CalibrationResult calibrate_topm_n(const StreamProfile& profile, const SignalSet& truth, std::size_t m,
                                   const ErrorBudget& targets, const CalibrationOptions& options = {});

/// Estimated FDR and FNR of a rule, as used by the calibration searches.
std::pair<MetricEstimate, MetricEstimate> estimate_fdr_fnr(const StreamProfile& profile, const SignalSet& truth,
                                                           const RuleSpec& rule, std::size_t replications,
                                                           std::uint64_t seed, std::size_t horizon = kDefaultHorizon,
                                                           unsigned workers = 0);

/// Seeds used by calibration: the search uses one, the reported achieved
/// values another, both derived from the user's seed.
std::uint64_t calibration_search_seed(std::uint64_t seed);
std::uint64_t calibration_evaluation_seed(std::uint64_t seed);

}  // namespace seqfdr
