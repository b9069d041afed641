#include "seqfdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqfdr {

ConfusionCounts::ConfusionCounts(std::size_t v, std::size_t w, std::size_t r, std::size_t j)
    : v_(v), w_(w), r_(r), j_(j) {
  if (r_ > j_ || v_ > r_ || w_ > j_ - r_)
    throw std::invalid_argument("inconsistent confusion counts (v=" + std::to_string(v) + ", w=" + std::to_string(w) +
                                ", r=" + std::to_string(r) + ", j=" + std::to_string(j) + ")");
}

ConfusionCounts confusion(const SignalSet& rejected, const SignalSet& truth) {
  if (rejected.universe() != truth.universe())
    throw std::out_of_range("rejected set and truth refer to different numbers of streams");
  std::size_t true_positives = 0;
  for (std::size_t j : rejected.members())
    if (truth.contains(j)) ++true_positives;
  const std::size_t r = rejected.size();
  return {r - true_positives, truth.size() - true_positives, r, truth.universe()};
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::fwe1: return "fwe1";
    case MetricKind::fwe2: return "fwe2";
    case MetricKind::fdr: return "fdr";
    case MetricKind::fnr: return "fnr";
    case MetricKind::pfdr: return "pfdr";
    case MetricKind::pfnr: return "pfnr";
    case MetricKind::pcer: return "pcer";
    case MetricKind::fpr: return "fpr";
    case MetricKind::pfer: return "pfer";
    case MetricKind::pfer2: return "pfer2";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  for (MetricKind k : kAllMetrics)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

bool is_conditional(MetricKind kind) noexcept { return kind == MetricKind::pfdr || kind == MetricKind::pfnr; }

std::optional<double> per_trial(MetricKind kind, const ConfusionCounts& c, std::size_t fpr_divisor) {
  const auto v = static_cast<double>(c.v());
  const auto w = static_cast<double>(c.w());
  const auto r = static_cast<double>(c.r());
  const auto accepted = static_cast<double>(c.accepted());
  switch (kind) {
    case MetricKind::fwe1: return c.v() >= 1 ? 1.0 : 0.0;
    case MetricKind::fwe2: return c.w() >= 1 ? 1.0 : 0.0;
    case MetricKind::fdr: return v / std::max(r, 1.0);
    case MetricKind::fnr: return w / std::max(accepted, 1.0);
    case MetricKind::pfdr:
      if (c.r() == 0) return std::nullopt;
      return v / r;
    case MetricKind::pfnr:
      if (c.accepted() == 0) return std::nullopt;
      return w / accepted;
    case MetricKind::pcer: return v / static_cast<double>(c.j());
    case MetricKind::fpr:
      if (fpr_divisor == 0) throw std::invalid_argument("fpr needs a positive divisor m");
      return v / static_cast<double>(fpr_divisor);
    case MetricKind::pfer: return v;
    case MetricKind::pfer2: return w;
  }
  return std::nullopt;
}

MetricEstimate mean_estimate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot estimate a mean from zero values");
  // Neumaier summation keeps totals independent of magnitude ordering.
  auto compensated_sum = [&](auto&& term) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : values) {
      const double t = term(x);
      const double s = sum + t;
      comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
      sum = s;
    }
    return sum + comp;
  };
  const auto n = static_cast<double>(values.size());
  const double mean = compensated_sum([](double x) { return x; }) / n;
  double se = 0.0;
  if (values.size() > 1) {
    const double ss = compensated_sum([mean](double x) { return (x - mean) * (x - mean); });
    se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return {mean, se, values.size()};
}

MetricEstimate aggregate(MetricKind kind, std::span<const ConfusionCounts> trials, std::size_t fpr_divisor) {
  if (trials.empty()) throw std::invalid_argument("cannot aggregate " + std::string(to_string(kind)) + " over zero trials");
  std::vector<double> values;
  values.reserve(trials.size());
  for (const ConfusionCounts& c : trials)
    if (auto x = per_trial(kind, c, fpr_divisor)) values.push_back(*x);
  if (values.empty())
    throw std::domain_error(std::string(to_string(kind)) +
                            " is undefined: its conditioning event never occurred in " + std::to_string(trials.size()) +
                            " trials");
  return mean_estimate(values);
}

BoundConstants bound_constants(MetricKind kind, RuleClass rule, std::size_t streams, std::size_t m, std::size_t lower,
                               std::size_t upper, std::size_t fpr_divisor) {
  const auto jd = static_cast<double>(streams);
  if (rule == RuleClass::gap && (m < 1 || m + 1 > streams))
    throw std::invalid_argument("gap rule bound constants need 1 <= m <= J-1");
  if (rule == RuleClass::gap_intersection && !(lower < upper && upper <= streams))
    throw std::invalid_argument("gap-intersection bound constants need 0 <= l < u <= J");

  // Largest possible V and W for the rule class.
  const double max_v = static_cast<double>(rule == RuleClass::gap ? m : upper);
  const double max_w = jd - static_cast<double>(rule == RuleClass::gap ? m : lower);

  switch (kind) {
    case MetricKind::fwe1:
    case MetricKind::fwe2: return {1.0, 1.0, 1.0};
    case MetricKind::fdr:
    case MetricKind::fnr: return {1.0, 1.0, 1.0 / jd};
    case MetricKind::pfdr:
    case MetricKind::pfnr:
      if (rule == RuleClass::gap_intersection && (lower < 1 || upper + 1 > streams))
        throw std::invalid_argument(
            "pfdr/pfnr bounds for the gap-intersection rule require 1 <= l < u <= J-1 (got l = " +
            std::to_string(lower) + ", u = " + std::to_string(upper) + ")");
      return {1.0, 1.0, 1.0 / jd};
    case MetricKind::pfer:
    case MetricKind::pfer2: return {max_v, max_w, 1.0};
    case MetricKind::pcer: return {max_v / jd, max_w / jd, 1.0 / jd};
    case MetricKind::fpr: {
      const double div = static_cast<double>(fpr_divisor != 0 ? fpr_divisor : (rule == RuleClass::gap ? m : upper));
      if (div <= 0.0) throw std::invalid_argument("fpr needs a positive divisor");
      return {max_v / div, max_w / div, 1.0 / div};
    }
  }
  return {};
}

}  // namespace seqfdr
