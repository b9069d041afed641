#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "seqfdr/model.hpp"
#include "seqfdr/rng.hpp"
#include "seqfdr/stats.hpp"

namespace seqfdr {

enum class StopReason { gap, tau1, tau2, tau3, intersection, fixed_sample, horizon };

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view name);

/// Outcome of one multiple-testing procedure: when sampling stopped and
/// which nulls were rejected.
struct Decision {
  std::size_t stopping_time = 0;
  SignalSet rejected;
  StopReason stopped_by = StopReason::horizon;

  bool horizon_hit() const noexcept { return stopped_by == StopReason::horizon; }
};

/// Gap rule for an exactly known number of signals m: stop once the m-th and
/// (m+1)-th largest LLRs are at least c apart and reject the top m streams.
class GapRule {
 public:
  GapRule(std::size_t signals, double threshold);

  std::size_t signals() const noexcept { return m_; }
  double threshold() const noexcept { return c_; }

  /// Throws if m is not in [1, J-1].
  void validate(std::size_t streams) const;

  bool should_stop(const OrderView& view) const { return view.gap_at(m_) >= c_; }
  SignalSet decide(const OrderView& view) const { return {view.top(m_), view.size()}; }

 private:
  std::size_t m_;
  double c_;
};

struct GiThresholds {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  friend bool operator==(const GiThresholds&, const GiThresholds&) = default;
};

/// Gap-intersection rule for a signal count known to lie in [lower, upper].
///
/// Stops at the first of
///   tau1: value(l+1) <= -a and value(l) - value(l+1) >= c
///   tau2: l <= p(n) <= u and no statistic inside (-a, b)
///   tau3: value(u) >= b and value(u) - value(u+1) >= d
/// and rejects the top p' streams, p' = clamp(p(T), l, u).
class GapIntersectionRule {
 public:
  GapIntersectionRule(std::size_t lower, std::size_t upper, GiThresholds thresholds);

  std::size_t lower() const noexcept { return lower_; }
  std::size_t upper() const noexcept { return upper_; }
  const GiThresholds& thresholds() const noexcept { return th_; }

  /// Throws unless 0 <= l < u <= J.
  void validate(std::size_t streams) const;

  /// Lowest-numbered stopping condition that holds, if any.
  std::optional<StopReason> should_stop(const OrderView& view) const;
  SignalSet decide(const OrderView& view) const;

  static std::size_t clamp_count(std::size_t positives, std::size_t lower, std::size_t upper) noexcept;

 private:
  std::size_t lower_;
  std::size_t upper_;
  GiThresholds th_;
};

/// Intersection rule without prior bounds: stop once every LLR has left
/// (-a, b), reject the positive ones.
class IntersectionRule {
 public:
  IntersectionRule(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  bool should_stop(const OrderView& view) const noexcept;
  SignalSet decide(const OrderView& view) const { return {view.top(view.positive_count()), view.size()}; }

 private:
  double a_;
  double b_;
};

enum class FixedSampleKind { bh, top_m };

/// Fixed-sample baselines: n observations from every stream, then either
/// Benjamini-Hochberg at level alpha or the m smallest p-values.
struct FixedSampleRule {
  FixedSampleKind kind = FixedSampleKind::bh;
  std::size_t n = 1;
  double alpha = 0.05;
  std::size_t m = 1;

  static FixedSampleRule bh(std::size_t n, double alpha);
  static FixedSampleRule top_m(std::size_t n, std::size_t m);
  void validate(std::size_t streams) const;
};

using SequentialRule = std::variant<GapRule, GapIntersectionRule, IntersectionRule>;

/// Samples every stream once per step until the rule fires or `horizon`
/// steps have elapsed.  On horizon exhaustion the rule's decision at the
/// final state is returned with stopped_by = horizon.
Decision run_sequential(const SequentialRule& rule, const StreamProfile& profile, const SignalSet& truth,
                        std::size_t horizon, CounterRng& rng);

/// Draws n observations per stream (in the same time-major order as the
/// sequential runner) and applies the fixed-sample rule.
Decision run_fixed_sample(const FixedSampleRule& rule, const StreamProfile& profile, const SignalSet& truth,
                          CounterRng& rng);

/// One-sided z-test p-value for a unit-variance Gaussian mean, from the
/// sum of n observations.  Only gaussian-mean models are supported.
double p_value(double sum, std::size_t n, const StreamModel& model);

/// Benjamini-Hochberg step-up: rejects the k smallest p-values where
/// k = max{i : p_(i) <= i * alpha / J}.
SignalSet bh_decide(std::span<const double> pvalues, double alpha);

/// The m smallest p-values, ties to the lower index.
SignalSet top_m_decide(std::span<const double> pvalues, std::size_t m);

}  // namespace seqfdr
