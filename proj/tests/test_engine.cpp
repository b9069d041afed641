#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "seqfdr/engine.hpp"

using namespace seqfdr;

namespace {

ExperimentConfig gap_config(std::size_t reps) {
  ExperimentConfig c{StreamProfile::homogeneous(StreamModel::gaussian(0.0, 0.5), 10), SignalSet::first(5, 10),
                     GapRule(5, 2.1)};
  c.replications = reps;
  c.master_seed = 123;
  c.metrics = {MetricKind::fdr, MetricKind::fnr, MetricKind::fwe1, MetricKind::fwe2, MetricKind::pfdr, MetricKind::pfnr};
  return c;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("trials are pure functions of the index") {
    const ExperimentConfig c = gap_config(10);
    CHECK(run_trial(c, 3) == run_trial(c, 3));
    CHECK(run_trial(c, 3).index == 3);
    for (std::size_t i = 0; i < 200; ++i) REQUIRE(run_trial(c, i).counts.r() == 5);
  }

  TEST_CASE("reports do not depend on the worker count") {
    const ExperimentConfig c = gap_config(1000);
    const ExperimentReport one = run_experiment(c, 1);
    CHECK(same_results(one, run_experiment(c, 3)));
    CHECK(same_results(one, run_experiment(c, 8)));
    CHECK(one.horizon_hits == 0);
    CHECK(one.mean_stopping_time.n_effective == 1000);
  }

  TEST_CASE("trial substreams are uncorrelated") {
    const ExperimentConfig c = gap_config(20'000);
    const std::vector<TrialRecord> t = run_trials(c);
    constexpr std::size_t kPairs = 10'000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < kPairs; ++i) {
      const double x = static_cast<double>(t[2 * i].stopping_time), y = static_cast<double>(t[2 * i + 1].stopping_time);
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
    const double n = kPairs;
    const double corr = (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(n));
  }

  TEST_CASE("report invariants hold exactly") {
    const ExperimentConfig c = gap_config(3000);
    const ExperimentReport r = run_experiment(c);
    const double j = 10.0;
    CHECK(r.metric(MetricKind::fdr).value <= r.metric(MetricKind::fwe1).value);
    CHECK(r.metric(MetricKind::fwe1).value <= j * r.metric(MetricKind::fdr).value);
    CHECK(r.metric(MetricKind::fnr).value <= r.metric(MetricKind::fwe2).value);
    CHECK(r.metric(MetricKind::fwe2).value <= j * r.metric(MetricKind::fnr).value);
    CHECK(r.metric(MetricKind::pfdr) == r.metric(MetricKind::fdr));
    CHECK(r.metric(MetricKind::pfnr) == r.metric(MetricKind::fnr));
    CHECK_THROWS(r.metric(MetricKind::pcer));
  }

  TEST_CASE("empty conditioning set surfaces as an error") {
    ExperimentConfig c = gap_config(3);
    c.metrics = {MetricKind::pfdr};
    std::vector<TrialRecord> t(3);
    for (std::size_t i = 0; i < 3; ++i) {
      t[i].index = i;
      t[i].stopping_time = 1;
      t[i].counts = ConfusionCounts(0, 5, 0, 10);
      t[i].stopped_by = StopReason::gap;
    }
    CHECK_THROWS_AS(summarize(c, t), std::domain_error);
  }

  TEST_CASE("configuration validation") {
    ExperimentConfig c = gap_config(0);
    CHECK_THROWS(c.validate());
    c = gap_config(10);
    c.rule = GapRule(10, 1.0);
    CHECK_THROWS(c.validate());
    c = gap_config(10);
    c.horizon = 0;
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("rule labels") {
    CHECK(rule_name(RuleSpec(GapRule(5, 2.1))) == "gap");
    CHECK(rule_size_label(RuleSpec(GapIntersectionRule(2, 7, {1, 1, 1, 1}))) == "2..7");
    CHECK(rule_name(RuleSpec(FixedSampleRule::top_m(10, 3))) == "top-m");
    CHECK(rule_threshold_label(RuleSpec(FixedSampleRule::bh(52, 0.05))) == "52");
  }

  TEST_CASE("asymptotic sweep rows") {
    ExperimentConfig c = gap_config(1);
    c.horizon = 100'000;
    const std::vector<ErrorBudget> budgets{{1e-2, 1e-2}, {1e-6, 1e-6}};
    const SweepReport s = asymptotic_sweep(c, budgets, 300, 0);
    REQUIRE(s.rows.size() == 2);
    CHECK(std::abs(s.rows[1].thresholds.at(0) - 17.0344) <= 1e-4);
    CHECK(std::abs(s.rows[1].kappa - 55.26) <= 0.01);
    for (const SweepRow& row : s.rows) {
      CHECK(row.ratio == doctest::Approx(row.mean_stopping_time.value / row.kappa));
      CHECK(row.horizon_hits == 0);
    }
    CHECK(s.rows[0].ratio > s.rows[1].ratio);
  }

  TEST_CASE("gap-intersection sweep uses the three-case benchmark") {
    for (std::size_t a : {2u, 4u, 7u}) {
      ExperimentConfig c{StreamProfile::homogeneous(StreamModel::gaussian(0.0, 1.0), 10), SignalSet::first(a, 10),
                         GapIntersectionRule(2, 7, {1, 1, 1, 1})};
      const std::vector<ErrorBudget> budgets{{1e-3, 1e-3}};
      const SweepReport s = asymptotic_sweep(c, budgets, 100, 0);
      CHECK(s.rows[0].kappa == doctest::Approx(kappa_gi({1e-3, 1e-3}, 0.5, 0.5, a, 2, 7)));
      CHECK(s.rows[0].thresholds.size() == 4);
    }
  }

  TEST_CASE("study table presets") {
    CHECK(table_streams(StudyTable::table1) == 10);
    CHECK(table_streams(StudyTable::table2) == 100);
    CHECK(parse_study_table("table2") == StudyTable::table2);
    CHECK_THROWS(parse_study_table("table3"));
    const std::size_t rows[] = {9};
    const auto t = reproduce_table(StudyTable::table1, rows, 200, 5);
    REQUIRE(t.size() == 1);
    CHECK(t[0].preset.c == 3.4);
    CHECK(t[0].bh_savings == doctest::Approx(savings(t[0].gap_et.value, t[0].preset.bh_n)));
    CHECK(t[0].topm_savings == doctest::Approx(1.0 - t[0].gap_et.value / static_cast<double>(t[0].preset.topm_n)));
    const std::size_t bad[] = {10};
    CHECK_THROWS(reproduce_table(StudyTable::table1, bad, 10, 5));
  }
}
