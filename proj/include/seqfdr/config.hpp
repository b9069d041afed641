#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqfdr/calibration.hpp"
#include "seqfdr/engine.hpp"

namespace seqfdr {

/// Invalid or unparseable configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json, text };

OutputFormat parse_output_format(std::string_view name);
std::string_view to_string(OutputFormat format);

/// How the rule's thresholds were specified.
enum class ThresholdSource { explicit_values, formula, calibrate };

/// A fully resolved configuration file.
struct RunSettings {
  ExperimentConfig experiment;
  ThresholdSource threshold_source = ThresholdSource::explicit_values;
  /// Metric whose C1 rescales formula thresholds.
  MetricKind bound_metric = MetricKind::fdr;
  OutputFormat format = OutputFormat::csv;
  std::string output_path{};  // empty: stdout
  CalibrationOptions calibration{};
  std::optional<double> target_fnr{};  // bh calibration target
  std::vector<ErrorBudget> sweep_budgets{};
  std::size_t sweep_replications = 2000;
};

/// Parses an INI-style document:
///
///   [streams]   family, null, alt (scalar or one value per stream), J
///   [truth]     count | indices (one-based)
///   [rule]      type and its parameters; thresholds may be "auto" (formula)
///               or, for the gap rule, "calibrate"
///   [budget]    alpha, beta
///   [run]       replications, seed, horizon, metrics
///   [output]    format, path
///   [calibrate] grid_step, c_cap, n_cap, full_scan, target_fnr
///   [sweep]     budgets, replications
///
/// Unknown sections or keys are rejected.  Throws ConfigError.
RunSettings parse_config(std::istream& in);
RunSettings load_config(const std::string& path);

/// "a,b,c" -> budgets with alpha = beta = each value; "a:b" entries set the
/// pair explicitly.
std::vector<ErrorBudget> parse_budget_list(const std::string& text);

/// Resolved experiment settings as ordered (key, value) pairs, using the
/// same section.key names as the configuration file.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config);

/// Decimal text that reads back to the identical double.
std::string format_double(double x);

}  // namespace seqfdr
