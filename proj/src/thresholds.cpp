#include "seqfdr/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seqfdr {

void ErrorBudget::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1), got " + std::to_string(beta));
}

namespace {

void check_c1(double c1) {
  if (!(c1 > 0.0) || !std::isfinite(c1)) throw std::invalid_argument("bound constant C1 must be positive");
}

}  // namespace

double gap_threshold(const ErrorBudget& budget, std::size_t m, std::size_t streams, double c1) {
  budget.validate();
  check_c1(c1);
  if (m < 1 || m + 1 > streams)
    throw std::invalid_argument("gap threshold needs 1 <= m <= J-1 (m = " + std::to_string(m) +
                                ", J = " + std::to_string(streams) + ")");
  const double level = std::min(budget.alpha / c1, budget.beta / c1);
  const double pairs = static_cast<double>(m) * static_cast<double>(streams - m);
  return std::abs(std::log(level)) + std::log(pairs);
}

GiThresholds gi_thresholds(const ErrorBudget& budget, std::size_t streams, std::size_t lower, std::size_t upper,
                           double c1) {
  budget.validate();
  check_c1(c1);
  if (!(lower < upper && upper <= streams))
    throw std::invalid_argument("gap-intersection thresholds need 0 <= l < u <= J (l = " + std::to_string(lower) +
                                ", u = " + std::to_string(upper) + ", J = " + std::to_string(streams) + ")");
  const double log_a = std::abs(std::log(budget.alpha / c1));
  const double log_b = std::abs(std::log(budget.beta / c1));
  const double j = static_cast<double>(streams);
  return {log_b + std::log(j), log_a + std::log(j), log_a + std::log((j - static_cast<double>(lower)) * j),
          log_b + std::log(static_cast<double>(upper) * j)};
}

double kappa_gap(const ErrorBudget& budget, double eta0, double eta1) {
  budget.validate();
  if (!(eta0 + eta1 > 0.0)) throw std::invalid_argument("kappa needs eta0 + eta1 > 0");
  return std::abs(std::log(std::min(budget.alpha, budget.beta))) / (eta0 + eta1);
}

double kappa_gi(const ErrorBudget& budget, double eta0, double eta1, std::size_t signals, std::size_t lower,
                std::size_t upper) {
  budget.validate();
  if (signals < lower || signals > upper)
    throw std::invalid_argument("kappa for the gap-intersection rule needs l <= |A| <= u (|A| = " +
                                std::to_string(signals) + ")");
  if (!(eta0 > 0.0) || !(eta1 > 0.0)) throw std::invalid_argument("kappa needs positive information numbers");
  const double la = std::abs(std::log(budget.alpha));
  const double lb = std::abs(std::log(budget.beta));
  if (signals == lower) return std::max(lb / eta0, la / (eta0 + eta1));
  if (signals == upper) return std::max(la / eta1, lb / (eta0 + eta1));
  return std::max(lb / eta0, la / eta1);
}

}  // namespace seqfdr
