#include "seqfdr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqfdr {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::gaussian_mean: return "gaussian-mean";
    case Family::bernoulli: return "bernoulli";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian-mean" || name == "gaussian") return Family::gaussian_mean;
  if (name == "bernoulli") return Family::bernoulli;
  throw std::invalid_argument("unknown stream family '" + std::string(name) + "'");
}

StreamModel::StreamModel(Family family, double null_param, double alt_param)
    : family_(family), null_(null_param), alt_(alt_param) {
  if (!std::isfinite(null_) || !std::isfinite(alt_))
    throw std::invalid_argument("stream model parameters must be finite");
  if (null_ == alt_) throw std::invalid_argument("null and alternative parameters must differ");
  switch (family_) {
    case Family::gaussian_mean:
      slope_ = alt_ - null_;
      offset_ = -(alt_ * alt_ - null_ * null_) / 2.0;
      break;
    case Family::bernoulli:
      if (!(null_ > 0.0 && null_ < 1.0 && alt_ > 0.0 && alt_ < 1.0))
        throw std::invalid_argument("bernoulli parameters must lie strictly inside (0, 1)");
      // x * log(p1/p0) + (1 - x) * log(q1/q0)
      offset_ = std::log1p(-alt_) - std::log1p(-null_);
      slope_ = std::log(alt_) - std::log(null_) - offset_;
      break;
  }
}

double StreamModel::llr_increment(double x) const {
  if (family_ == Family::bernoulli && x != 0.0 && x != 1.0)
    throw std::domain_error("bernoulli observation must be 0 or 1");
  if (!std::isfinite(x)) throw std::domain_error("observation must be finite");
  return slope_ * x + offset_;
}

double StreamModel::sample(Hypothesis state, CounterRng& rng) const {
  const double param = state == Hypothesis::alt ? alt_ : null_;
  switch (family_) {
    case Family::gaussian_mean: return param + rng.normal();
    case Family::bernoulli: return rng.uniform() < param ? 1.0 : 0.0;
  }
  return 0.0;
}

InfoNumbers StreamModel::info() const noexcept {
  switch (family_) {
    case Family::gaussian_mean: {
      const double d = alt_ - null_;
      return {d * d / 2.0, d * d / 2.0, d * d, d * d};
    }
    case Family::bernoulli: {
      // llr(1) - llr(0) = slope_, so Var_p[llr] = p (1 - p) slope_^2.
      const double up = slope_ + offset_;
      const double down = offset_;
      const double i1 = alt_ * up + (1.0 - alt_) * down;
      const double i0 = -(null_ * up + (1.0 - null_) * down);
      return {i0, i1, null_ * (1.0 - null_) * slope_ * slope_, alt_ * (1.0 - alt_) * slope_ * slope_};
    }
  }
  return {};
}

StreamProfile::StreamProfile(std::vector<StreamModel> models) : models_(std::move(models)) {
  if (models_.size() < 2) throw std::invalid_argument("a stream profile needs at least two streams");
}

StreamProfile StreamProfile::homogeneous(const StreamModel& model, std::size_t streams) {
  return StreamProfile(std::vector<StreamModel>(streams, model));
}

bool StreamProfile::is_homogeneous() const noexcept {
  return std::all_of(models_.begin(), models_.end(), [&](const StreamModel& m) { return m == models_.front(); });
}

SignalSet::SignalSet(std::vector<std::size_t> members, std::size_t universe)
    : members_(std::move(members)), universe_(universe) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw std::invalid_argument("signal set contains duplicate stream indices");
  if (!members_.empty() && members_.back() >= universe_)
    throw std::out_of_range("signal set index " + std::to_string(members_.back() + 1) + " exceeds J = " +
                            std::to_string(universe_));
}

SignalSet SignalSet::first(std::size_t count, std::size_t universe) {
  if (count > universe) throw std::out_of_range("signal count exceeds number of streams");
  std::vector<std::size_t> members(count);
  for (std::size_t j = 0; j < count; ++j) members[j] = j;
  return SignalSet(std::move(members), universe);
}

bool SignalSet::contains(std::size_t j) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), j);
}

SignalSet SignalSet::complement() const {
  std::vector<std::size_t> out;
  out.reserve(universe_ - members_.size());
  auto it = members_.begin();
  for (std::size_t j = 0; j < universe_; ++j) {
    if (it != members_.end() && *it == j) {
      ++it;
      continue;
    }
    out.push_back(j);
  }
  return SignalSet(std::move(out), universe_);
}

Eta eta(const StreamProfile& profile, const SignalSet& signals) {
  if (signals.universe() != profile.size())
    throw std::invalid_argument("signal set universe does not match the number of streams");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eta out{inf, inf, false, false};
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const InfoNumbers info = profile[j].info();
    if (signals.contains(j)) {
      out.eta1 = std::min(out.eta1, info.i1);
      out.eta1_defined = true;
    } else {
      out.eta0 = std::min(out.eta0, info.i0);
      out.eta0_defined = true;
    }
  }
  return out;
}

}  // namespace seqfdr
