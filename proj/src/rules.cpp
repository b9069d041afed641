#include "seqfdr/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seqfdr {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::gap: return "gap";
    case StopReason::tau1: return "tau1";
    case StopReason::tau2: return "tau2";
    case StopReason::tau3: return "tau3";
    case StopReason::intersection: return "intersection";
    case StopReason::fixed_sample: return "fixed-sample";
    case StopReason::horizon: return "horizon";
  }
  return "unknown";
}

StopReason parse_stop_reason(std::string_view name) {
  for (auto r : {StopReason::gap, StopReason::tau1, StopReason::tau2, StopReason::tau3, StopReason::intersection,
                 StopReason::fixed_sample, StopReason::horizon})
    if (to_string(r) == name) return r;
  throw std::invalid_argument("unknown stop reason '" + std::string(name) + "'");
}

GapRule::GapRule(std::size_t signals, double threshold) : m_(signals), c_(threshold) {
  if (m_ < 1) throw std::invalid_argument("gap rule needs m >= 1");
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw std::invalid_argument("gap rule threshold c must be positive");
}

void GapRule::validate(std::size_t streams) const {
  if (m_ + 1 > streams)
    throw std::invalid_argument("gap rule needs 1 <= m <= J-1 (m = " + std::to_string(m_) +
                                ", J = " + std::to_string(streams) + ")");
}

GapIntersectionRule::GapIntersectionRule(std::size_t lower, std::size_t upper, GiThresholds thresholds)
    : lower_(lower), upper_(upper), th_(thresholds) {
  if (lower_ >= upper_) throw std::invalid_argument("gap-intersection rule needs l < u");
  for (double t : {th_.a, th_.b, th_.c, th_.d})
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("gap-intersection thresholds a, b, c, d must be positive");
}

void GapIntersectionRule::validate(std::size_t streams) const {
  if (upper_ > streams)
    throw std::invalid_argument("gap-intersection rule needs u <= J (u = " + std::to_string(upper_) +
                                ", J = " + std::to_string(streams) + ")");
}

std::optional<StopReason> GapIntersectionRule::should_stop(const OrderView& view) const {
  if (view.value(lower_ + 1) <= -th_.a && view.gap_at(lower_) >= th_.c) return StopReason::tau1;
  const std::size_t p = view.positive_count();
  if (p >= lower_ && p <= upper_) {
    const bool outside = std::all_of(view.sorted().begin(), view.sorted().end(),
                                     [&](double x) { return x <= -th_.a || x >= th_.b; });
    if (outside) return StopReason::tau2;
  }
  if (view.value(upper_) >= th_.b && view.gap_at(upper_) >= th_.d) return StopReason::tau3;
  return std::nullopt;
}

std::size_t GapIntersectionRule::clamp_count(std::size_t positives, std::size_t lower, std::size_t upper) noexcept {
  return std::clamp(positives, lower, upper);
}

SignalSet GapIntersectionRule::decide(const OrderView& view) const {
  return {view.top(clamp_count(view.positive_count(), lower_, upper_)), view.size()};
}

IntersectionRule::IntersectionRule(double a, double b) : a_(a), b_(b) {
  if (!(a_ > 0.0) || !(b_ > 0.0) || !std::isfinite(a_) || !std::isfinite(b_))
    throw std::invalid_argument("intersection rule thresholds must be positive");
}

bool IntersectionRule::should_stop(const OrderView& view) const noexcept {
  return std::all_of(view.sorted().begin(), view.sorted().end(), [&](double x) { return x <= -a_ || x >= b_; });
}

FixedSampleRule FixedSampleRule::bh(std::size_t n, double alpha) {
  FixedSampleRule r{FixedSampleKind::bh, n, alpha, 1};
  if (n < 1) throw std::invalid_argument("fixed sample size n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("BH level alpha must lie in (0, 1)");
  return r;
}

FixedSampleRule FixedSampleRule::top_m(std::size_t n, std::size_t m) {
  FixedSampleRule r{FixedSampleKind::top_m, n, 0.05, m};
  if (n < 1) throw std::invalid_argument("fixed sample size n must be >= 1");
  if (m < 1) throw std::invalid_argument("top-m rule needs m >= 1");
  return r;
}

void FixedSampleRule::validate(std::size_t streams) const {
  if (kind == FixedSampleKind::top_m && m + 1 > streams)
    throw std::invalid_argument("top-m rule needs 1 <= m <= J-1");
}

namespace {

template <class Rule>
void validate_rule(const Rule& rule, std::size_t streams) {
  if constexpr (requires { rule.validate(streams); }) rule.validate(streams);
}

// Draws one observation per stream (in stream order) into `obs`.
void draw_step(const StreamProfile& profile, const SignalSet& truth, CounterRng& rng, std::span<double> obs) {
  for (std::size_t j = 0; j < profile.size(); ++j)
    obs[j] = profile[j].sample(truth.contains(j) ? Hypothesis::alt : Hypothesis::null, rng);
}

}  // namespace

Decision run_sequential(const SequentialRule& rule, const StreamProfile& profile, const SignalSet& truth,
                        std::size_t horizon, CounterRng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (truth.universe() != profile.size()) throw std::invalid_argument("truth does not match the number of streams");
  std::visit([&](const auto& r) { validate_rule(r, profile.size()); }, rule);

  const std::size_t streams = profile.size();
  std::vector<double> obs(streams);
  std::vector<double> increments(streams);
  LlrState state(streams);
  OrderView view;

  while (state.time() < horizon) {
    draw_step(profile, truth, rng, obs);
    for (std::size_t j = 0; j < streams; ++j) increments[j] = profile[j].llr_increment(obs[j]);
    state.advance(increments);
    view.rebuild(state.lambda());

    const std::optional<Decision> decision = std::visit(
        [&](const auto& r) -> std::optional<Decision> {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, GapRule>) {
            if (r.should_stop(view)) return Decision{state.time(), r.decide(view), StopReason::gap};
          } else if constexpr (std::is_same_v<R, GapIntersectionRule>) {
            if (auto tag = r.should_stop(view)) return Decision{state.time(), r.decide(view), *tag};
          } else {
            if (r.should_stop(view)) return Decision{state.time(), r.decide(view), StopReason::intersection};
          }
          return std::nullopt;
        },
        rule);
    if (decision) return *decision;
  }

  SignalSet rejected = std::visit([&](const auto& r) { return r.decide(view); }, rule);
  return {state.time(), std::move(rejected), StopReason::horizon};
}

Decision run_fixed_sample(const FixedSampleRule& rule, const StreamProfile& profile, const SignalSet& truth,
                          CounterRng& rng) {
  if (truth.universe() != profile.size()) throw std::invalid_argument("truth does not match the number of streams");
  rule.validate(profile.size());
  const std::size_t streams = profile.size();
  std::vector<double> obs(streams);
  std::vector<double> sums(streams, 0.0);
  for (std::size_t t = 0; t < rule.n; ++t) {
    draw_step(profile, truth, rng, obs);
    for (std::size_t j = 0; j < streams; ++j) sums[j] += obs[j];
  }
  std::vector<double> pvalues(streams);
  for (std::size_t j = 0; j < streams; ++j) pvalues[j] = p_value(sums[j], rule.n, profile[j]);
  SignalSet rejected =
      rule.kind == FixedSampleKind::bh ? bh_decide(pvalues, rule.alpha) : top_m_decide(pvalues, rule.m);
  return {rule.n, std::move(rejected), StopReason::fixed_sample};
}

double p_value(double sum, std::size_t n, const StreamModel& model) {
  if (model.family() != Family::gaussian_mean)
    throw std::invalid_argument("p-values are only defined for the gaussian-mean family");
  if (n < 1) throw std::invalid_argument("p-value needs n >= 1");
  const double z = (sum - static_cast<double>(n) * model.null_param()) / std::sqrt(static_cast<double>(n));
  const double directed = model.alt_param() > model.null_param() ? z : -z;
  return 0.5 * std::erfc(directed / std::sqrt(2.0));
}

namespace {

std::vector<std::size_t> ascending_order(std::span<const double> pvalues) {
  std::vector<std::size_t> order(pvalues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b] || (pvalues[a] == pvalues[b] && a < b);
  });
  return order;
}

}  // namespace

SignalSet bh_decide(std::span<const double> pvalues, double alpha) {
  const std::size_t streams = pvalues.size();
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
  const std::vector<std::size_t> order = ascending_order(pvalues);
  std::size_t k = 0;
  for (std::size_t i = streams; i >= 1; --i) {
    if (pvalues[order[i - 1]] <= static_cast<double>(i) * alpha / static_cast<double>(streams)) {
      k = i;
      break;
    }
  }
  return {std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)), streams};
}

SignalSet top_m_decide(std::span<const double> pvalues, std::size_t m) {
  if (m < 1 || m + 1 > pvalues.size()) throw std::invalid_argument("top-m rule needs 1 <= m <= J-1");
  const std::vector<std::size_t> order = ascending_order(pvalues);
  return {std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m)), pvalues.size()};
}

}  // namespace seqfdr
