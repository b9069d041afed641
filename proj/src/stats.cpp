#include "seqfdr/stats.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seqfdr {

void LlrState::advance(std::span<const double> increments) {
  if (increments.size() != lambda_.size())
    throw std::invalid_argument("expected " + std::to_string(lambda_.size()) + " increments, got " +
                                std::to_string(increments.size()));
  for (std::size_t j = 0; j < lambda_.size(); ++j) lambda_[j] += increments[j];
  ++time_;
}

void OrderView::rebuild(std::span<const double> lambda) {
  const std::size_t n = lambda.size();
  index_.resize(n);
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  std::sort(index_.begin(), index_.end(), [&](std::size_t a, std::size_t b) {
    return lambda[a] > lambda[b] || (lambda[a] == lambda[b] && a < b);
  });
  sorted_.resize(n);
  positive_ = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sorted_[k] = lambda[index_[k]];
    if (sorted_[k] > 0.0) ++positive_;
  }
}

double OrderView::value(std::size_t rank) const noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (rank == 0) return inf;
  if (rank > sorted_.size()) return -inf;
  return sorted_[rank - 1];
}

double OrderView::gap_at(std::size_t k) const {
  if (k > sorted_.size())
    throw std::out_of_range("gap index " + std::to_string(k) + " outside [0, " + std::to_string(sorted_.size()) + "]");
  if (k == 0 || k == sorted_.size()) return std::numeric_limits<double>::infinity();
  return sorted_[k - 1] - sorted_[k];
}

std::vector<std::size_t> OrderView::top(std::size_t count) const {
  count = std::min(count, index_.size());
  std::vector<std::size_t> out(index_.begin(), index_.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace seqfdr
