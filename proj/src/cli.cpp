#include "seqfdr/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqfdr/calibration.hpp"
#include "seqfdr/config.hpp"
#include "seqfdr/engine.hpp"
#include "seqfdr/report_io.hpp"

namespace seqfdr::cli {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<std::string> format;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
  auto* config = cmd->add_option("--config", opts.config_path, "Experiment configuration file");
  if (needs_config) config->required()->check(CLI::ExistingFile);
  cmd->add_option("--reps", opts.reps, "Override the number of replications");
  cmd->add_option("--seed", opts.seed, "Override the master seed");
  cmd->add_option("--workers", opts.workers, "Worker threads (default: $SEQFDR_WORKERS or all cores)");
  cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  cmd->add_option("--out", opts.out_path, "Write the report to this file instead of stdout");
}

RunSettings load(const CommonOptions& opts) {
  RunSettings s = load_config(opts.config_path);
  if (opts.reps) {
    if (*opts.reps < 1) throw ConfigError("--reps: must be >= 1");
    s.experiment.replications = *opts.reps;
    s.calibration.replications = *opts.reps;
    s.sweep_replications = *opts.reps;
  }
  if (opts.seed) {
    s.experiment.master_seed = *opts.seed;
    s.calibration.seed = *opts.seed;
  }
  s.calibration.workers = opts.workers;
  if (opts.format) s.format = parse_output_format(*opts.format);
  if (!opts.out_path.empty()) s.output_path = opts.out_path;
  return s;
}

// Writes through `write` to the chosen destination.
template <class Write>
void emit(const std::string& path, std::ostream& out, Write&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + path);
}

CalibrationResult calibrate_rule(const RunSettings& s) {
  const ExperimentConfig& cfg = s.experiment;
  if (const auto* gap = std::get_if<GapRule>(&cfg.rule))
    return calibrate_gap_c(cfg.profile, cfg.truth, gap->signals(), cfg.budget, s.calibration);
  if (const auto* fixed = std::get_if<FixedSampleRule>(&cfg.rule)) {
    if (fixed->kind == FixedSampleKind::top_m)
      return calibrate_topm_n(cfg.profile, cfg.truth, fixed->m, cfg.budget, s.calibration);
    if (!s.target_fnr) throw ConfigError("calibrate.target_fnr: required to calibrate the BH sample size");
    return calibrate_bh_n(cfg.profile, cfg.truth, fixed->alpha, *s.target_fnr, s.calibration);
  }
  throw ConfigError("rule.type: calibration supports gap, bh and top-m rules, not " + rule_name(cfg.rule));
}

void apply_calibration(RunSettings& s, const CalibrationResult& result) {
  ExperimentConfig& cfg = s.experiment;
  if (const auto* gap = std::get_if<GapRule>(&cfg.rule)) {
    cfg.rule = GapRule(gap->signals(), result.chosen);
  } else if (auto* fixed = std::get_if<FixedSampleRule>(&cfg.rule)) {
    fixed->n = static_cast<std::size_t>(result.chosen);
  }
}

// Conditional metrics are only bounded for the gap-intersection rule when
// 1 <= l < u <= J-1.
void check_metric_compatibility(const RunSettings& s) {
  const ExperimentConfig& cfg = s.experiment;
  const auto* gi = std::get_if<GapIntersectionRule>(&cfg.rule);
  if (!gi) return;
  std::vector<MetricKind> kinds = cfg.metrics;
  kinds.push_back(s.bound_metric);
  for (MetricKind k : kinds)
    if (is_conditional(k))
      bound_constants(k, RuleClass::gap_intersection, cfg.profile.size(), 0, gi->lower(), gi->upper());
}

int cmd_run(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  RunSettings s = load(opts);
  check_metric_compatibility(s);
  if (s.threshold_source == ThresholdSource::calibrate) {
    const CalibrationResult cal = calibrate_rule(s);
    apply_calibration(s, cal);
    err << "calibrated " << cal.parameter << " = " << format_double(cal.chosen) << '\n';
  }
  const ExperimentReport report = run_experiment(s.experiment, opts.workers);
  emit(s.output_path, out, [&](std::ostream& os) { write_report(os, report, s.format); });
  if (report.horizon_hits > 0) err << "warning: " << report.horizon_hits << " trials reached the horizon\n";
  return kExitOk;
}

int cmd_calibrate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  const RunSettings s = load(opts);
  try {
    const CalibrationResult result = calibrate_rule(s);
    emit(s.output_path, out, [&](std::ostream& os) { write_calibration(os, result, s.format); });
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << '\n';
    emit(s.output_path, out, [&](std::ostream& os) { write_calibration(os, e.partial(), s.format); });
    return kExitRuntime;
  }
  return kExitOk;
}

std::vector<std::size_t> parse_rows(const std::string& text, StudyTable table) {
  std::vector<std::size_t> rows;
  if (text == "all") {
    for (const TablePreset& p : table_presets(table)) rows.push_back(p.m);
    return rows;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      rows.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--rows: expected comma-separated integers, got '" + item + "'");
    }
  }
  return rows;
}

int cmd_reproduce(const std::string& which, const std::string& rows_text, const CommonOptions& opts,
                  std::ostream& out) {
  StudyTable table;
  try {
    table = parse_study_table(which);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::vector<std::size_t> rows = parse_rows(rows_text, table);
  const std::size_t reps = opts.reps.value_or(10'000);
  if (reps < 1) throw ConfigError("--reps: must be >= 1");
  const std::vector<TableRow> result = reproduce_table(table, rows, reps, opts.seed.value_or(1), opts.workers);
  write_table(out, table, result, OutputFormat::text);
  if (!opts.out_path.empty()) {
    const OutputFormat format = opts.format ? parse_output_format(*opts.format) : OutputFormat::csv;
    emit(opts.out_path, out, [&](std::ostream& os) { write_table(os, table, result, format); });
  }
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& alphas, std::ostream& out, std::ostream& err) {
  RunSettings s = load(opts);
  std::vector<ErrorBudget> budgets = s.sweep_budgets;
  if (!alphas.empty()) {
    try {
      budgets = parse_budget_list(alphas);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--alphas: ") + e.what());
    }
  }
  if (budgets.empty()) throw ConfigError("sweep.budgets: no error budgets given (use --alphas or [sweep] budgets)");
  const SweepReport sweep =
      asymptotic_sweep(s.experiment, budgets, s.sweep_replications, opts.workers, s.bound_metric);
  emit(s.output_path, out, [&](std::ostream& os) { write_sweep(os, sweep, s.format); });
  for (const SweepRow& row : sweep.rows)
    if (row.horizon_hits > 0)
      err << "warning: " << row.horizon_hits << " trials reached the horizon at alpha = " << format_double(row.budget.alpha)
          << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential multiple testing with gap and gap-intersection rules"};
  app.require_subcommand(1);

  CommonOptions run_opts, cal_opts, rep_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a configuration file");
  add_common(run, run_opts, true);
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate a threshold or sample size by Monte Carlo");
  add_common(calibrate, cal_opts, true);

  auto* reproduce = app.add_subcommand("reproduce", "Rerun the Gaussian J=10 (table1) or J=100 (table2) study");
  std::string which;
  std::string rows_text = "all";
  reproduce->add_option("which", which, "table1 or table2")->required();
  reproduce->add_option("--rows", rows_text, "Comma-separated m values, or 'all'");
  add_common(reproduce, rep_opts, false);

  auto* sweep = app.add_subcommand("sweep", "Compare expected sample size to its first-order benchmark");
  std::string alphas;
  sweep->add_option("--alphas", alphas, "Error budgets, e.g. 1e-2,1e-4 or 1e-2:1e-3");
  add_common(sweep, sweep_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, out, err);
    if (*calibrate) return cmd_calibrate(cal_opts, out, err);
    if (*reproduce) return cmd_reproduce(which, rows_text, rep_opts, out);
    if (*sweep) return cmd_sweep(sweep_opts, alphas, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CalibrationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace seqfdr::cli
