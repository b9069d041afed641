#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "seqfdr/metrics.hpp"

using namespace seqfdr;

namespace {

std::vector<ConfusionCounts> random_counts(std::mt19937_64& gen, std::size_t j, std::size_t n, std::size_t max_r) {
  std::vector<ConfusionCounts> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, j)(gen);
    const std::size_t r = std::uniform_int_distribution<std::size_t>(0, std::min(max_r, j))(gen);
    const std::size_t v = std::uniform_int_distribution<std::size_t>(r > a ? r - a : 0, std::min(r, j - a))(gen);
    const std::size_t w = a - (r - v);
    out.emplace_back(v, w, r, j);
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("confusion counts") {
    const SignalSet truth({0, 1}, 4);
    const ConfusionCounts c = confusion(SignalSet({1, 2}, 4), truth);
    CHECK(c.v() == 1);
    CHECK(c.w() == 1);
    CHECK(c.r() == 2);
    CHECK(c.accepted() == 2);
    CHECK(confusion(truth, truth) == ConfusionCounts(0, 0, 2, 4));
    CHECK(confusion(truth.complement(), truth) == ConfusionCounts(2, 2, 2, 4));
    CHECK_THROWS(confusion(SignalSet({1}, 5), truth));
  }

  TEST_CASE("invalid counts are unrepresentable") {
    CHECK_THROWS(ConfusionCounts(0, 2, 4, 4));
    CHECK_THROWS(ConfusionCounts(3, 0, 2, 4));
  }

  TEST_CASE("per-trial values") {
    CHECK(*per_trial(MetricKind::fdr, ConfusionCounts(1, 0, 2, 4), 2) == 0.5);
    CHECK_FALSE(per_trial(MetricKind::pfdr, ConfusionCounts(0, 0, 0, 4), 2).has_value());
    CHECK_FALSE(per_trial(MetricKind::pfnr, ConfusionCounts(0, 0, 4, 4), 2).has_value());
    const ConfusionCounts c(2, 1, 3, 10);
    CHECK(*per_trial(MetricKind::fwe1, c, 4) == 1.0);
    CHECK(*per_trial(MetricKind::fwe2, c, 4) == 1.0);
    CHECK(*per_trial(MetricKind::fnr, c, 4) == doctest::Approx(1.0 / 7.0));
    CHECK(*per_trial(MetricKind::pcer, c, 4) == doctest::Approx(0.2));
    CHECK(*per_trial(MetricKind::fpr, c, 4) == doctest::Approx(0.5));
    CHECK(*per_trial(MetricKind::pfer, c, 4) == 2.0);
    CHECK(*per_trial(MetricKind::pfer2, c, 4) == 1.0);
  }

  TEST_CASE("aggregate examples") {
    const std::vector<ConfusionCounts> t{{1, 0, 2, 4}, {0, 0, 1, 4}, {1, 0, 1, 4}};
    CHECK(aggregate(MetricKind::fdr, t, 1).value == doctest::Approx(0.5));
    const std::vector<ConfusionCounts> u{{1, 0, 2, 4}, {0, 0, 0, 4}, {1, 0, 1, 4}};
    const MetricEstimate p = aggregate(MetricKind::pfdr, u, 1);
    CHECK(p.value == doctest::Approx(0.75));
    CHECK(p.n_effective == 2);
    const std::vector<ConfusionCounts> z(5, ConfusionCounts(0, 0, 1, 4));
    const MetricEstimate f = aggregate(MetricKind::fwe1, z, 1);
    CHECK(f.value == 0.0);
    CHECK(f.se == 0.0);
  }

  TEST_CASE("empty conditioning set is an error naming the metric") {
    const std::vector<ConfusionCounts> none(3, ConfusionCounts(0, 1, 0, 4));
    try {
      aggregate(MetricKind::pfdr, none, 1);
      FAIL("expected an error");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("pfdr") != std::string::npos);
    }
  }

  TEST_CASE("mean and standard error") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const MetricEstimate e = mean_estimate(x);
    CHECK(e.value == 2.5);
    // sample sd = sqrt(5/3)
    CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.n_effective == 4);
    const std::vector<double> one{7.0};
    CHECK(mean_estimate(one).se == 0.0);
  }

  TEST_CASE("metric names round-trip") {
    for (MetricKind k : kAllMetrics) CHECK(parse_metric(to_string(k)) == k);
    CHECK(is_conditional(MetricKind::pfnr));
    CHECK_FALSE(is_conditional(MetricKind::fdr));
    CHECK_THROWS(parse_metric("tpr"));
  }

  TEST_CASE("sandwich holds exactly on random trial sets") {
    std::mt19937_64 gen(8);
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t j = 2 + rep % 20;
      const auto t = random_counts(gen, j, 500, j);
      const double jd = static_cast<double>(j);
      const double fdr = aggregate(MetricKind::fdr, t, 1).value, fwe1 = aggregate(MetricKind::fwe1, t, 1).value;
      const double fnr = aggregate(MetricKind::fnr, t, 1).value, fwe2 = aggregate(MetricKind::fwe2, t, 1).value;
      REQUIRE(fdr <= fwe1);
      REQUIRE(fwe1 <= jd * fdr);
      REQUIRE(fnr <= fwe2);
      REQUIRE(fwe2 <= jd * fnr);
      for (const auto& c : t) {
        const double d = *per_trial(MetricKind::fdr, c, 1), f = *per_trial(MetricKind::fwe1, c, 1);
        REQUIRE(d <= f);
        REQUIRE(f <= jd * d);
      }
    }
  }

  TEST_CASE("slippage trial sets give fdr equal to fwe1") {
    std::mt19937_64 gen(12);
    const auto t = random_counts(gen, 10, 5000, 1);
    CHECK(aggregate(MetricKind::fdr, t, 1).value == aggregate(MetricKind::fwe1, t, 1).value);
  }

  TEST_CASE("conditional metrics equal unconditional ones when r is fixed") {
    std::vector<ConfusionCounts> t;
    std::mt19937_64 gen(13);
    for (int i = 0; i < 3000; ++i) {
      const std::size_t v = std::uniform_int_distribution<std::size_t>(0, 3)(gen);
      t.emplace_back(v, v, 3, 10);
    }
    CHECK(aggregate(MetricKind::pfdr, t, 3) == aggregate(MetricKind::fdr, t, 3));
    CHECK(aggregate(MetricKind::pfnr, t, 3) == aggregate(MetricKind::fnr, t, 3));
  }

  TEST_CASE("pfer equals m times fpr") {
    std::mt19937_64 gen(14);
    const auto t = random_counts(gen, 10, 4000, 10);
    const double pfer = aggregate(MetricKind::pfer, t, 4).value;
    const double fpr = aggregate(MetricKind::fpr, t, 4).value;
    CHECK(std::abs(pfer - 4.0 * fpr) <= 1e-12 * pfer);
  }

  TEST_CASE("bound constants") {
    const BoundConstants fdr = bound_constants(MetricKind::fdr, RuleClass::gap, 10, 5, 0, 0);
    CHECK(fdr.c1_type1 == 1.0);
    CHECK(fdr.c2 == doctest::Approx(0.1));
    CHECK_THROWS(bound_constants(MetricKind::pfdr, RuleClass::gap_intersection, 10, 0, 0, 5));
    CHECK_THROWS(bound_constants(MetricKind::pfnr, RuleClass::gap_intersection, 10, 0, 1, 10));
    CHECK_NOTHROW(bound_constants(MetricKind::pfdr, RuleClass::gap_intersection, 10, 0, 1, 9));
    const BoundConstants pfer = bound_constants(MetricKind::pfer, RuleClass::gap, 10, 5, 0, 0);
    CHECK(pfer.c1_type1 == 5.0);
    CHECK(pfer.c1_type2 == 5.0);
    CHECK(pfer.c2 == 1.0);
    const BoundConstants gi = bound_constants(MetricKind::pfer, RuleClass::gap_intersection, 10, 0, 2, 7);
    CHECK(gi.c1_type1 == 7.0);
    CHECK(gi.c1_type2 == 8.0);
    const BoundConstants fwe = bound_constants(MetricKind::fwe1, RuleClass::gap, 10, 5, 0, 0);
    CHECK(fwe.c2 == 1.0);
  }
}
