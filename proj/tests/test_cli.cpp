#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "seqfdr/cli.hpp"
#include "seqfdr/config.hpp"
#include "seqfdr/report_io.hpp"

using namespace seqfdr;

namespace {

const char* const kGapConfig = R"(# comment
[streams]
family = gaussian-mean
null = 0
alt = 0.5
J = 10

[truth]
count = 5

[rule]
type = gap
m = 5
c = 2.1

[budget]
alpha = 0.05
beta = 0.05

[run]
replications = 500
seed = 9
metrics = fdr,fnr,pfer
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("seqfdr_test_" + name);
  std::ofstream(path) << text;
  return path;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "seqfdr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    std::istringstream in(kGapConfig);
    const RunSettings s = parse_config(in);
    CHECK(s.experiment.replications == 500);
    CHECK(s.experiment.master_seed == 9);
    CHECK(s.experiment.truth == SignalSet::first(5, 10));
    CHECK(std::get<GapRule>(s.experiment.rule).threshold() == 2.1);
    CHECK(s.experiment.metrics.size() == 3);
  }

  TEST_CASE("config errors name the field") {
    auto fails_with = [](const std::string& text, const std::string& key) {
      std::istringstream in(text);
      try {
        parse_config(in);
        FAIL("expected a configuration error");
      } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CAPTURE(msg);
        CAPTURE(key);
        CHECK(std::string(e.what()).find(key) != std::string::npos);
      }
    };
    fails_with(replace(kGapConfig, "alpha = 0.05", "alpha = 1.5"), "budget.alpha");
    fails_with(replace(kGapConfig, "m = 5", "m = 5\nwidth = 3"), "rule.width");
    fails_with(replace(kGapConfig, "[run]", "[extra]\nx = 1\n[run]"), "extra");
    fails_with(replace(kGapConfig, "count = 5", "indices = 1,11"), "truth.indices");
    fails_with(replace(kGapConfig, "c = 2.1", "c = fast"), "rule.c");
    fails_with(replace(kGapConfig, "type = gap", "type = holm"), "rule.type");
  }

  TEST_CASE("formula thresholds and one-based indices") {
    std::istringstream in(replace(replace(kGapConfig, "c = 2.1", "c = auto"), "count = 5", "indices = 2,4,6,8,10"));
    const RunSettings s = parse_config(in);
    CHECK(s.threshold_source == ThresholdSource::formula);
    CHECK(std::get<GapRule>(s.experiment.rule).threshold() == doctest::Approx(gap_threshold({0.05, 0.05}, 5, 10)));
    CHECK(s.experiment.truth == SignalSet({1, 3, 5, 7, 9}, 10));
    const auto d = describe(s.experiment);
    bool found = false;
    for (const auto& [k, v] : d)
      if (k == "truth.indices") found = v == "2,4,6,8,10";
    CHECK(found);
  }

  TEST_CASE("example configurations load") {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(SEQFDR_CONFIG_DIR)) {
      if (entry.path().extension() != ".ini") continue;
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(load_config(entry.path().string()));
      ++count;
    }
    CHECK(count >= 5);
  }

  TEST_CASE("budget lists") {
    const auto b = parse_budget_list("1e-2, 1e-4:1e-3");
    REQUIRE(b.size() == 2);
    CHECK(b[0] == ErrorBudget{1e-2, 1e-2});
    CHECK(b[1] == ErrorBudget{1e-4, 1e-3});
    CHECK_THROWS(parse_budget_list("2"));
  }

  TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 2.0e-300, 123456789.123456789, 0.04660000000000001})
      CHECK(std::stod(format_double(x)) == x);
  }

  TEST_CASE("run writes a CSV report with provenance") {
    const auto path = write_temp("gap.ini", kGapConfig);
    const Outcome r = invoke({"run", "--config", path.string(), "--workers", "2"});
    CHECK(r.code == cli::kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() > 4);
    CHECK(lines[0] == "rule,J,m_or_bounds,threshold,reps,seed,ET,ET_se,metric,value,se,n_effective,horizon_hits");
    CHECK(lines[1].rfind("gap,10,5,2.1,500,9,", 0) == 0);
    CHECK(r.out.find("# run.seed=9") != std::string::npos);
    CHECK(r.out.find("# rule.c=2.1") != std::string::npos);
  }

  TEST_CASE("reports round-trip through their parsers") {
    const auto path = write_temp("gap_rt.ini", kGapConfig);
    for (const std::string format : {"csv", "json"}) {
      const Outcome r = invoke({"run", "--config", path.string(), "--format", format});
      REQUIRE(r.code == 0);
      std::istringstream in(r.out);
      const ParsedReport p = format == "csv" ? read_report_csv(in) : read_report_json(in);

      std::istringstream cfg(kGapConfig);
      const ExperimentReport want = run_experiment(parse_config(cfg).experiment);
      CHECK(p.rule == "gap");
      CHECK(p.streams == 10);
      CHECK(p.replications == 500);
      CHECK(p.seed == 9);
      CHECK(p.mean_stopping_time == want.mean_stopping_time);
      CHECK(p.horizon_hits == want.horizon_hits);
      REQUIRE(p.metrics.size() == want.metrics.size());
      for (std::size_t i = 0; i < p.metrics.size(); ++i) {
        CHECK(p.metrics[i].first == to_string(want.metrics[i].first));
        CHECK(p.metrics[i].second == want.metrics[i].second);
      }
      CHECK(p.provenance.at("rule.type") == "gap");
    }
  }

  TEST_CASE("report to a file via --out") {
    const auto path = write_temp("gap_out.ini", kGapConfig);
    const auto out = std::filesystem::temp_directory_path() / "seqfdr_test_report.txt";
    const Outcome r = invoke({"run", "--config", path.string(), "--format", "text", "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(out);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("fdr") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"run"}).code == 2);
    CHECK(invoke({"run", "--config", "/nonexistent/file.ini"}).code == 2);

    const auto bad = write_temp("bad_alpha.ini", replace(kGapConfig, "alpha = 0.05", "alpha = 1.5"));
    const Outcome b = invoke({"run", "--config", bad.string()});
    CHECK(b.code == cli::kExitConfig);
    CHECK(b.err.find("budget.alpha") != std::string::npos);

    const std::string gi = replace(replace(kGapConfig, "type = gap\nm = 5\nc = 2.1", "type = gap-intersection\nl = 0\nu = 7\na = auto\nb = auto\nc = auto\nd = auto"),
                                   "metrics = fdr,fnr,pfer", "metrics = pfdr");
    const Outcome g = invoke({"run", "--config", write_temp("gi_pfdr.ini", gi).string()});
    CHECK(g.code == cli::kExitRuntime);
    CHECK(g.err.find("1 <= l") != std::string::npos);

    const std::string inter = replace(kGapConfig, "type = gap\nm = 5\nc = 2.1", "type = intersection\na = 3\nb = 3");
    const Outcome c = invoke({"calibrate", "--config", write_temp("inter.ini", inter).string()});
    CHECK(c.code == cli::kExitConfig);
  }

  TEST_CASE("calibrate with an unreachable target exits 1 with the trace") {
    const std::string text = replace(replace(replace(kGapConfig, "c = 2.1", "c = calibrate"), "alpha = 0.05\nbeta = 0.05",
                                             "alpha = 1e-9\nbeta = 1e-9"),
                                     "[run]", "[calibrate]\nc_cap = 3\n\n[run]");
    const Outcome r = invoke({"calibrate", "--config", write_temp("cap.ini", text).string(), "--reps", "1000"});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.out.find("gap,c,search,") != std::string::npos);
  }

  TEST_CASE("calibrate writes the chosen value and trace") {
    const std::string text = replace(kGapConfig, "c = 2.1", "c = calibrate");
    const Outcome r = invoke({"calibrate", "--config", write_temp("cal.ini", text).string(), "--reps", "1000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("gap,c,achieved,") != std::string::npos);
    CHECK(r.out.find("# grid=") != std::string::npos);
  }

  TEST_CASE("reproduce with an empty row list prints only the header") {
    const Outcome r = invoke({"reproduce", "table1", "--rows", ""});
    CHECK(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].rfind("m  c  ET", 0) == 0);
    CHECK(invoke({"reproduce", "table3"}).code == 2);
    CHECK(invoke({"reproduce", "table1", "--rows", "x"}).code == 2);
  }

  TEST_CASE("reproduce writes text and CSV") {
    const auto out = std::filesystem::temp_directory_path() / "seqfdr_test_table.csv";
    const Outcome r = invoke({"reproduce", "table1", "--rows", "1,9", "--reps", "100", "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(lines_of(r.out).size() == 4);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == kTableCsvHeader);
  }

  TEST_CASE("sweep rows") {
    const std::string text = replace(kGapConfig, "c = 2.1", "c = auto");
    const auto path = write_temp("sweep.ini", text);
    const Outcome one = invoke({"sweep", "--config", path.string(), "--alphas", "1e-3", "--reps", "100"});
    CHECK(one.code == 0);
    CHECK(lines_of(one.out).size() == 2);
    CHECK(lines_of(one.out)[0] == "alpha,beta,thresholds,ET,ET_se,kappa,ratio,horizon_hits");
    const Outcome none = invoke({"sweep", "--config", path.string()});
    CHECK(none.code == 2);
  }
}
