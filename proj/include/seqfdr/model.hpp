#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqfdr/rng.hpp"

namespace seqfdr {

enum class Family { gaussian_mean, bernoulli };
enum class Hypothesis { null, alt };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Kullback-Leibler information numbers of one stream and the variances of
/// the per-observation log-likelihood ratio, all in nats.
struct InfoNumbers {
  double i0 = 0.0;  // E_0[-llr]
  double i1 = 0.0;  // E_1[llr]
  double v0 = 0.0;  // Var_0[llr]
  double v1 = 0.0;  // Var_1[llr]
};

/// A simple null/alternative pair for one stream.
///
/// gaussian_mean: N(null_param, 1) vs N(alt_param, 1).
/// bernoulli:     Bernoulli(null_param) vs Bernoulli(alt_param), both in (0, 1).
class StreamModel {
 public:
  StreamModel(Family family, double null_param, double alt_param);

  static StreamModel gaussian(double null_mean, double alt_mean) {
    return {Family::gaussian_mean, null_mean, alt_mean};
  }
  static StreamModel bernoulli(double null_p, double alt_p) { return {Family::bernoulli, null_p, alt_p}; }

  Family family() const noexcept { return family_; }
  double null_param() const noexcept { return null_; }
  double alt_param() const noexcept { return alt_; }

  /// The same pair with the roles of null and alternative exchanged.
  StreamModel swapped() const { return {family_, alt_, null_}; }

  /// log f1(x) - log f0(x).  Throws std::domain_error for observations
  /// outside the family's support.
  double llr_increment(double x) const;

  double sample(Hypothesis state, CounterRng& rng) const;

  InfoNumbers info() const noexcept;

  friend bool operator==(const StreamModel&, const StreamModel&) = default;

 private:
  Family family_;
  double null_;
  double alt_;
  // Cached increment coefficients: llr(x) = slope_ * x + offset_.
  double slope_ = 0.0;
  double offset_ = 0.0;
};

class StreamProfile {
 public:
  explicit StreamProfile(std::vector<StreamModel> models);
  static StreamProfile homogeneous(const StreamModel& model, std::size_t streams);

  std::size_t size() const noexcept { return models_.size(); }
  const StreamModel& operator[](std::size_t j) const { return models_[j]; }
  std::span<const StreamModel> models() const noexcept { return models_; }
  bool is_homogeneous() const noexcept;

  friend bool operator==(const StreamProfile&, const StreamProfile&) = default;

 private:
  std::vector<StreamModel> models_;
};

/// A subset of the stream indices {0, ..., universe-1}, kept sorted.
/// Indices are zero-based in code; configuration files and reports use
/// one-based stream numbers.
class SignalSet {
 public:
  SignalSet() = default;
  SignalSet(std::vector<std::size_t> members, std::size_t universe);
  SignalSet(std::initializer_list<std::size_t> members, std::size_t universe)
      : SignalSet(std::vector<std::size_t>(members), universe) {}

  /// {0, ..., count-1}
  static SignalSet first(std::size_t count, std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(std::size_t j) const noexcept;
  std::span<const std::size_t> members() const noexcept { return members_; }
  SignalSet complement() const;

  friend bool operator==(const SignalSet&, const SignalSet&) = default;

 private:
  std::vector<std::size_t> members_;
  std::size_t universe_ = 0;
};

/// Worst-case information numbers over a signal set: eta0 is the minimum
/// I0 over noise streams, eta1 the minimum I1 over signal streams.  An empty
/// side yields +inf with its flag cleared.
struct Eta {
  double eta0;
  double eta1;
  bool eta0_defined;
  bool eta1_defined;
};

Eta eta(const StreamProfile& profile, const SignalSet& signals);

}  // namespace seqfdr
