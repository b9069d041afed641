#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "seqfdr/calibration.hpp"
#include "seqfdr/config.hpp"
#include "seqfdr/engine.hpp"

namespace seqfdr {

inline constexpr const char* kReportCsvHeader =
    "rule,J,m_or_bounds,threshold,reps,seed,ET,ET_se,metric,value,se,n_effective,horizon_hits";

/// One metric row per requested metric under kReportCsvHeader, followed by
/// "# key=value" provenance lines carrying the resolved configuration.
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_report_json(std::ostream& out, const ExperimentReport& report);
void write_report_text(std::ostream& out, const ExperimentReport& report);
void write_report(std::ostream& out, const ExperimentReport& report, OutputFormat format);

/// Flat view of a written report, as read back by the report parsers.
struct ParsedReport {
  std::string rule;
  std::size_t streams = 0;
  std::string size_label;
  std::string threshold_label;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  MetricEstimate mean_stopping_time;
  std::vector<std::pair<std::string, MetricEstimate>> metrics;
  std::size_t horizon_hits = 0;
  std::map<std::string, std::string> provenance;
};

ParsedReport read_report_csv(std::istream& in);
ParsedReport read_report_json(std::istream& in);

void write_calibration(std::ostream& out, const CalibrationResult& result, OutputFormat format);
void write_sweep(std::ostream& out, const SweepReport& sweep, OutputFormat format);

inline constexpr const char* kTableCsvHeader =
    "m,c,ET,ET_se,gap_FDR,gap_FDR_se,gap_FNR,gap_FNR_se,"
    "bh_n,bh_savings,bh_FDR,bh_FDR_se,bh_FNR,bh_FNR_se,"
    "bhm_n,bhm_savings,bhm_FDR,bhm_FDR_se,bhm_FNR,bhm_FNR_se,horizon_hits";

/// Table rows; rates as fractions in CSV/JSON, percentages with two
/// decimals in text.
void write_table(std::ostream& out, StudyTable table, const std::vector<TableRow>& rows, OutputFormat format);

}  // namespace seqfdr
