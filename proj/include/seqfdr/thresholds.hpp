#pragma once

#include <cstddef>

#include "seqfdr/rules.hpp"

namespace seqfdr {

/// Nominal type 1 / type 2 error levels, both strictly inside (0, 1).
struct ErrorBudget {
  double alpha = 0.05;
  double beta = 0.05;

  void validate() const;
  friend bool operator==(const ErrorBudget&, const ErrorBudget&) = default;
};

/// Gap-rule threshold c = |log((alpha/C1) ^ (beta/C1))| + log(m (J - m)).
double gap_threshold(const ErrorBudget& budget, std::size_t m, std::size_t streams, double c1 = 1.0);

/// Gap-intersection thresholds with alpha, beta scaled by 1/C1:
///   a = |log beta| + log J            b = |log alpha| + log J
///   c = |log alpha| + log((J - l) J)  d = |log beta| + log(u J)
GiThresholds gi_thresholds(const ErrorBudget& budget, std::size_t streams, std::size_t lower, std::size_t upper,
                           double c1 = 1.0);

/// First-order expected sample size of the gap rule:
/// |log(alpha ^ beta)| / (eta0 + eta1).
double kappa_gap(const ErrorBudget& budget, double eta0, double eta1);

/// First-order expected sample size of the gap-intersection rule, by
/// whether |A| sits on the lower bound, strictly inside, or on the upper
/// bound.  eta0 / eta1 may be +inf when the corresponding side is empty.
double kappa_gi(const ErrorBudget& budget, double eta0, double eta1, std::size_t signals, std::size_t lower,
                std::size_t upper);

}  // namespace seqfdr
