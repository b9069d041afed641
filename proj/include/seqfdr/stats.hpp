#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seqfdr {

/// Running log-likelihood ratios lambda^j(n) of all streams at time n.
class LlrState {
 public:
  explicit LlrState(std::size_t streams) : lambda_(streams, 0.0) {}
  LlrState(std::size_t time, std::vector<double> lambda) : time_(time), lambda_(std::move(lambda)) {}

  /// Adds one increment per stream and moves time forward by one step.
  void advance(std::span<const double> increments);

  std::size_t time() const noexcept { return time_; }
  std::size_t size() const noexcept { return lambda_.size(); }
  std::span<const double> lambda() const noexcept { return lambda_; }

 private:
  std::size_t time_ = 0;
  std::vector<double> lambda_;
};

/// Descending order statistics of an LLR vector.
///
/// Ranks are one-based: value(1) is the largest statistic, value(J) the
/// smallest.  Ties are broken by placing the lower stream index first.
/// Out-of-range ranks follow the sentinel convention value(0) = +inf and
/// value(J+1) = -inf.
class OrderView {
 public:
  OrderView() = default;
  explicit OrderView(std::span<const double> lambda) { rebuild(lambda); }

  /// Recomputes the view in place, reusing storage.
  void rebuild(std::span<const double> lambda);

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }
  /// index_map()[k] is the (zero-based) stream holding the (k+1)-th largest value.
  std::span<const std::size_t> index_map() const noexcept { return index_; }
  std::size_t positive_count() const noexcept { return positive_; }

  double value(std::size_t rank) const noexcept;
  /// value(k) - value(k+1) for 0 <= k <= J; +inf at both ends.
  double gap_at(std::size_t k) const;

  /// Zero-based stream indices of the `count` largest statistics, ascending.
  std::vector<std::size_t> top(std::size_t count) const;

 private:
  std::vector<double> sorted_;
  std::vector<std::size_t> index_;
  std::size_t positive_ = 0;
};

}  // namespace seqfdr
