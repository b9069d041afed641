#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqfdr/model.hpp"

namespace seqfdr {

/// Per-trial confusion counts: V false positives, W false negatives,
/// R rejections out of J streams.
class ConfusionCounts {
 public:
  ConfusionCounts() = default;
  /// Throws unless 0 <= v <= r <= j and 0 <= w <= j - r.
  ConfusionCounts(std::size_t v, std::size_t w, std::size_t r, std::size_t j);

  std::size_t v() const noexcept { return v_; }
  std::size_t w() const noexcept { return w_; }
  std::size_t r() const noexcept { return r_; }
  std::size_t j() const noexcept { return j_; }
  std::size_t accepted() const noexcept { return j_ - r_; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;

 private:
  std::size_t v_ = 0;
  std::size_t w_ = 0;
  std::size_t r_ = 0;
  std::size_t j_ = 0;
};

ConfusionCounts confusion(const SignalSet& rejected, const SignalSet& truth);

enum class MetricKind { fwe1, fwe2, fdr, fnr, pfdr, pfnr, pcer, fpr, pfer, pfer2 };

inline constexpr MetricKind kAllMetrics[] = {MetricKind::fwe1, MetricKind::fwe2, MetricKind::fdr, MetricKind::fnr,
                                             MetricKind::pfdr, MetricKind::pfnr, MetricKind::pcer, MetricKind::fpr,
                                             MetricKind::pfer, MetricKind::pfer2};

std::string_view to_string(MetricKind kind);
MetricKind parse_metric(std::string_view name);

/// True for pfdr/pfnr, whose per-trial value is only defined on an event.
bool is_conditional(MetricKind kind) noexcept;

/// Contribution of one trial to a metric.  `fpr_divisor` is the m in
/// E(V/m).  Conditional metrics return nullopt outside their event
/// (R = 0 for pfdr, R = J for pfnr).
std::optional<double> per_trial(MetricKind kind, const ConfusionCounts& counts, std::size_t fpr_divisor);

struct MetricEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n_effective = 0;

  friend bool operator==(const MetricEstimate&, const MetricEstimate&) = default;
};

/// Mean and standard error (sample sd / sqrt(n)) of a sequence of values,
/// summed in order with compensation.
MetricEstimate mean_estimate(std::span<const double> values);

/// Aggregates per-trial contributions in trial order.  Throws
/// std::domain_error naming the metric if a conditional metric has an empty
/// conditioning set.
MetricEstimate aggregate(MetricKind kind, std::span<const ConfusionCounts> trials, std::size_t fpr_divisor);

enum class RuleClass { gap, gap_intersection };

/// Constants relating a metric to the familywise error rates:
///   metric_i <= c1_type{i} * FWE_i  for the rule class,
///   metric_i >= c2 * FWE_i          for any procedure.
struct BoundConstants {
  double c1_type1 = 1.0;
  double c1_type2 = 1.0;
  double c2 = 1.0;
};

/// For the gap rule `m` is the signal count; for the gap-intersection rule
/// `lower`/`upper` are the bounds.  `fpr_divisor` defaults to m (or u) when 0.
BoundConstants bound_constants(MetricKind kind, RuleClass rule, std::size_t streams, std::size_t m, std::size_t lower,
                               std::size_t upper, std::size_t fpr_divisor = 0);

}  // namespace seqfdr
