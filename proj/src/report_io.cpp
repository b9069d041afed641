#include "seqfdr/report_io.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace seqfdr {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::runtime_error("malformed number '" + text + "' in report");
  return v;
}

template <class Int>
Int parse_integer(const std::string& text) {
  Int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::runtime_error("malformed integer '" + text + "' in report");
  return v;
}

std::string percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return os.str();
}

std::string fixed(double x, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

json estimate_json(const MetricEstimate& e) { return {{"value", e.value}, {"se", e.se}, {"n_effective", e.n_effective}}; }

MetricEstimate estimate_from_json(const json& j) {
  return {j.at("value").get<double>(), j.at("se").get<double>(), j.at("n_effective").get<std::size_t>()};
}

// Left-aligned columns padded to the widest cell.
void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

}  // namespace

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  out << kReportCsvHeader << '\n';
  const std::string prefix = rule_name(cfg.rule) + "," + std::to_string(cfg.profile.size()) + "," +
                             rule_size_label(cfg.rule) + "," + rule_threshold_label(cfg.rule) + "," +
                             std::to_string(cfg.replications) + "," + std::to_string(cfg.master_seed) + "," +
                             format_double(report.mean_stopping_time.value) + "," +
                             format_double(report.mean_stopping_time.se) + ",";
  for (const auto& [kind, est] : report.metrics)
    out << prefix << to_string(kind) << ',' << format_double(est.value) << ',' << format_double(est.se) << ','
        << est.n_effective << ',' << report.horizon_hits << '\n';
  for (const auto& [key, value] : describe(cfg)) out << "# " << key << '=' << value << '\n';
  for (const auto& [reason, n] : report.stopped_by) out << "# stopped_by." << to_string(reason) << '=' << n << '\n';
  out << "# ET.n_effective=" << report.mean_stopping_time.n_effective << '\n';
  out << "# wall_time=" << format_double(report.wall_time) << '\n';
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  json doc;
  json config = json::object();
  for (const auto& [key, value] : describe(cfg)) config[key] = value;
  doc["config"] = config;
  doc["rule"] = rule_name(cfg.rule);
  doc["J"] = cfg.profile.size();
  doc["m_or_bounds"] = rule_size_label(cfg.rule);
  doc["threshold"] = rule_threshold_label(cfg.rule);
  doc["reps"] = cfg.replications;
  doc["seed"] = cfg.master_seed;
  doc["mean_stopping_time"] = estimate_json(report.mean_stopping_time);
  json metrics = json::object();
  for (const auto& [kind, est] : report.metrics) metrics[std::string(to_string(kind))] = estimate_json(est);
  doc["metrics"] = metrics;
  json reasons = json::object();
  for (const auto& [reason, n] : report.stopped_by) reasons[std::string(to_string(reason))] = n;
  doc["stopped_by"] = reasons;
  doc["horizon_hits"] = report.horizon_hits;
  doc["wall_time"] = report.wall_time;
  out << doc.dump(2) << '\n';
}

void write_report_text(std::ostream& out, const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::vector<std::vector<std::string>> header = {
      {"rule", rule_name(cfg.rule)},
      {"J", std::to_string(cfg.profile.size())},
      {"signals", std::to_string(cfg.truth.size())},
      {"m/bounds", rule_size_label(cfg.rule)},
      {"threshold", rule_threshold_label(cfg.rule)},
      {"replications", std::to_string(cfg.replications)},
      {"seed", std::to_string(cfg.master_seed)},
      {"ET", fixed(report.mean_stopping_time.value, 2) + " (" + fixed(report.mean_stopping_time.se, 2) + ")"},
      {"horizon hits", std::to_string(report.horizon_hits)},
  };
  write_aligned(out, header);
  out << '\n';
  std::vector<std::vector<std::string>> rows = {{"metric", "value", "se", "n_effective"}};
  for (const auto& [kind, est] : report.metrics) {
    const bool rate = kind != MetricKind::pfer && kind != MetricKind::pfer2;
    rows.push_back({std::string(to_string(kind)), rate ? percent(est.value) + "%" : fixed(est.value, 4),
                    rate ? percent(est.se) + "%" : fixed(est.se, 4), std::to_string(est.n_effective)});
  }
  write_aligned(out, rows);
}

void write_report(std::ostream& out, const ExperimentReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: write_report_csv(out, report); break;
    case OutputFormat::json: write_report_json(out, report); break;
    case OutputFormat::text: write_report_text(out, report); break;
  }
}

ParsedReport read_report_csv(std::istream& in) {
  ParsedReport parsed;
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader) throw std::runtime_error("report CSV header not found");
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) parsed.provenance[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 13) throw std::runtime_error("report CSV row has " + std::to_string(cells.size()) + " cells");
    if (first) {
      parsed.rule = cells[0];
      parsed.streams = parse_integer<std::size_t>(cells[1]);
      parsed.size_label = cells[2];
      parsed.threshold_label = cells[3];
      parsed.replications = parse_integer<std::size_t>(cells[4]);
      parsed.seed = parse_integer<std::uint64_t>(cells[5]);
      parsed.mean_stopping_time.value = parse_double(cells[6]);
      parsed.mean_stopping_time.se = parse_double(cells[7]);
      parsed.horizon_hits = parse_integer<std::size_t>(cells[12]);
      first = false;
    }
    parsed.metrics.emplace_back(cells[8], MetricEstimate{parse_double(cells[9]), parse_double(cells[10]),
                                                         parse_integer<std::size_t>(cells[11])});
  }
  if (auto it = parsed.provenance.find("ET.n_effective"); it != parsed.provenance.end())
    parsed.mean_stopping_time.n_effective = parse_integer<std::size_t>(it->second);
  return parsed;
}

ParsedReport read_report_json(std::istream& in) {
  const json doc = json::parse(in);
  ParsedReport parsed;
  parsed.rule = doc.at("rule").get<std::string>();
  parsed.streams = doc.at("J").get<std::size_t>();
  parsed.size_label = doc.at("m_or_bounds").get<std::string>();
  parsed.threshold_label = doc.at("threshold").get<std::string>();
  parsed.replications = doc.at("reps").get<std::size_t>();
  parsed.seed = doc.at("seed").get<std::uint64_t>();
  parsed.mean_stopping_time = estimate_from_json(doc.at("mean_stopping_time"));
  for (const auto& [name, est] : doc.at("metrics").items()) parsed.metrics.emplace_back(name, estimate_from_json(est));
  parsed.horizon_hits = doc.at("horizon_hits").get<std::size_t>();
  for (const auto& [key, value] : doc.at("config").items()) parsed.provenance[key] = value.get<std::string>();
  return parsed;
}

void write_calibration(std::ostream& out, const CalibrationResult& result, OutputFormat format) {
  std::vector<CalibrationPoint> points = result.trace;
  std::sort(points.begin(), points.end(),
            [](const CalibrationPoint& a, const CalibrationPoint& b) { return a.value < b.value; });
  const MetricEstimate* fdr = nullptr;
  const MetricEstimate* fnr = nullptr;
  for (const auto& [kind, est] : result.achieved) {
    if (kind == MetricKind::fdr) fdr = &est;
    if (kind == MetricKind::fnr) fnr = &est;
  }

  switch (format) {
    case OutputFormat::csv: {
      out << "rule,parameter,kind,value,fdr,fdr_se,fnr,fnr_se,accepted,replications,seed\n";
      for (const CalibrationPoint& p : points)
        out << result.rule << ',' << result.parameter << ",search," << format_double(p.value) << ','
            << format_double(p.fdr.value) << ',' << format_double(p.fdr.se) << ',' << format_double(p.fnr.value) << ','
            << format_double(p.fnr.se) << ',' << (p.accepted ? 1 : 0) << ',' << result.replications << ','
            << result.search_seed << '\n';
      if (fdr && fnr)
        out << result.rule << ',' << result.parameter << ",achieved," << format_double(result.chosen) << ','
            << format_double(fdr->value) << ',' << format_double(fdr->se) << ',' << format_double(fnr->value) << ','
            << format_double(fnr->se) << ",," << result.replications << ',' << result.evaluation_seed << '\n';
      out << "# grid=" << result.grid << '\n';
      break;
    }
    case OutputFormat::json: {
      json doc;
      doc["rule"] = result.rule;
      doc["parameter"] = result.parameter;
      doc["chosen"] = result.chosen;
      doc["replications"] = result.replications;
      doc["grid"] = result.grid;
      doc["search_seed"] = result.search_seed;
      doc["evaluation_seed"] = result.evaluation_seed;
      json achieved = json::object();
      for (const auto& [kind, est] : result.achieved) achieved[std::string(to_string(kind))] = estimate_json(est);
      doc["achieved"] = achieved;
      json trace = json::array();
      for (const CalibrationPoint& p : points)
        trace.push_back({{"value", p.value},
                         {"fdr", estimate_json(p.fdr)},
                         {"fnr", estimate_json(p.fnr)},
                         {"accepted", p.accepted}});
      doc["trace"] = trace;
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::text: {
      std::vector<std::vector<std::string>> rows = {{result.parameter, "FDR %", "FNR %", "ok"}};
      for (const CalibrationPoint& p : points)
        rows.push_back({format_double(p.value), percent(p.fdr.value) + " (" + percent(p.fdr.se) + ")",
                        percent(p.fnr.value) + " (" + percent(p.fnr.se) + ")", p.accepted ? "yes" : "no"});
      write_aligned(out, rows);
      if (!result.achieved.empty() && fdr && fnr) {
        out << "\nchosen " << result.parameter << " = " << format_double(result.chosen) << ": FDR " << percent(fdr->value)
            << "% (" << percent(fdr->se) << "), FNR " << percent(fnr->value) << "% (" << percent(fnr->se)
            << ") at evaluation seed " << result.evaluation_seed << '\n';
      }
      break;
    }
  }
}

void write_sweep(std::ostream& out, const SweepReport& sweep, OutputFormat format) {
  auto join = [](const std::vector<double>& xs) {
    std::string s;
    for (double x : xs) s += (s.empty() ? "" : " ") + format_double(x);
    return s;
  };
  switch (format) {
    case OutputFormat::csv:
      out << "alpha,beta,thresholds,ET,ET_se,kappa,ratio,horizon_hits\n";
      for (const SweepRow& r : sweep.rows)
        out << format_double(r.budget.alpha) << ',' << format_double(r.budget.beta) << ',' << join(r.thresholds) << ','
            << format_double(r.mean_stopping_time.value) << ',' << format_double(r.mean_stopping_time.se) << ','
            << format_double(r.kappa) << ',' << format_double(r.ratio) << ',' << r.horizon_hits << '\n';
      break;
    case OutputFormat::json: {
      json rows = json::array();
      for (const SweepRow& r : sweep.rows)
        rows.push_back({{"alpha", r.budget.alpha},
                        {"beta", r.budget.beta},
                        {"thresholds", r.thresholds},
                        {"mean_stopping_time", estimate_json(r.mean_stopping_time)},
                        {"kappa", r.kappa},
                        {"ratio", r.ratio},
                        {"horizon_hits", r.horizon_hits}});
      out << json{{"rule", sweep.rule}, {"signals", sweep.signals}, {"rows", rows}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::text: {
      std::vector<std::vector<std::string>> rows = {{"alpha", "beta", "thresholds", "ET (se)", "kappa", "ET/kappa"}};
      for (const SweepRow& r : sweep.rows) {
        std::string th;
        for (double x : r.thresholds) th += (th.empty() ? "" : " ") + fixed(x, 4);
        rows.push_back({format_double(r.budget.alpha), format_double(r.budget.beta), th,
                        fixed(r.mean_stopping_time.value, 2) + " (" + fixed(r.mean_stopping_time.se, 2) + ")",
                        fixed(r.kappa, 2), fixed(r.ratio, 4) + (r.horizon_hits ? " [horizon hits]" : "")});
      }
      write_aligned(out, rows);
      break;
    }
  }
}

void write_table(std::ostream& out, StudyTable table, const std::vector<TableRow>& rows, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv:
      out << kTableCsvHeader << '\n';
      for (const TableRow& r : rows) {
        const TablePreset& p = r.preset;
        out << p.m << ',' << format_double(p.c) << ',' << format_double(r.gap_et.value) << ','
            << format_double(r.gap_et.se) << ',' << format_double(r.gap_fdr.value) << ',' << format_double(r.gap_fdr.se)
            << ',' << format_double(r.gap_fnr.value) << ',' << format_double(r.gap_fnr.se) << ',' << p.bh_n << ','
            << format_double(r.bh_savings) << ',' << format_double(r.bh_fdr.value) << ',' << format_double(r.bh_fdr.se)
            << ',' << format_double(r.bh_fnr.value) << ',' << format_double(r.bh_fnr.se) << ',' << p.topm_n << ','
            << format_double(r.topm_savings) << ',' << format_double(r.topm_fdr.value) << ','
            << format_double(r.topm_fdr.se) << ',' << format_double(r.topm_fnr.value) << ','
            << format_double(r.topm_fnr.se) << ',' << r.horizon_hits << '\n';
      }
      break;
    case OutputFormat::json: {
      json doc = json::array();
      for (const TableRow& r : rows)
        doc.push_back({{"m", r.preset.m},
                       {"c", r.preset.c},
                       {"gap", {{"ET", estimate_json(r.gap_et)}, {"FDR", estimate_json(r.gap_fdr)},
                                {"FNR", estimate_json(r.gap_fnr)}}},
                       {"bh", {{"n", r.preset.bh_n}, {"savings", r.bh_savings}, {"FDR", estimate_json(r.bh_fdr)},
                               {"FNR", estimate_json(r.bh_fnr)}}},
                       {"bhm", {{"n", r.preset.topm_n}, {"savings", r.topm_savings},
                                {"FDR", estimate_json(r.topm_fdr)}, {"FNR", estimate_json(r.topm_fnr)}}},
                       {"horizon_hits", r.horizon_hits}});
      out << json{{"table", std::string(to_string(table))}, {"J", table_streams(table)}, {"rows", doc}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::text: {
      auto est = [](const MetricEstimate& e) { return percent(e.value) + " (" + percent(e.se) + ")"; };
      std::vector<std::vector<std::string>> cells = {{"m", "c", "ET", "FDR (%)", "FNR (%)", "|", "BH n (Savings)",
                                                      "FDR (%)", "FNR (%)", "|", "BH_m n (Savings)", "FDR (%)",
                                                      "FNR (%)"}};
      for (const TableRow& r : rows) {
        const TablePreset& p = r.preset;
        cells.push_back({std::to_string(p.m), fixed(p.c, 1),
                         fixed(r.gap_et.value, 1) + " (" + fixed(r.gap_et.se, 2) + ")", est(r.gap_fdr), est(r.gap_fnr),
                         "|", std::to_string(p.bh_n) + " (" + fixed(100.0 * r.bh_savings, 0) + "%)", est(r.bh_fdr),
                         est(r.bh_fnr), "|", std::to_string(p.topm_n) + " (" + fixed(100.0 * r.topm_savings, 0) + "%)",
                         est(r.topm_fdr), est(r.topm_fnr)});
      }
      out << "J = " << table_streams(table) << " streams, N(0,1) vs N(1/2,1)\n";
      write_aligned(out, cells);
      break;
    }
  }
}

}  // namespace seqfdr
