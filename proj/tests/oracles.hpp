#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "seqfdr/model.hpp"

namespace oracle {

inline double log_normal_pdf(double x, double mu) {
  return -0.5 * (x - mu) * (x - mu) - 0.5 * std::log(2 * std::numbers::pi);
}

// Composite Simpson on [lo, hi].
template <class F>
double simpson(F f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline seqfdr::InfoNumbers gaussian_info(double mu0, double mu1) {
  auto llr = [&](double x) { return log_normal_pdf(x, mu1) - log_normal_pdf(x, mu0); };
  auto moment = [&](double mu, auto g) {
    return simpson([&](double x) { return std::exp(log_normal_pdf(x, mu)) * g(x); }, mu - 14.0, mu + 14.0, 20000);
  };
  seqfdr::InfoNumbers r;
  r.i1 = moment(mu1, llr);
  r.i0 = -moment(mu0, llr);
  r.v1 = moment(mu1, [&](double x) { return (llr(x) - r.i1) * (llr(x) - r.i1); });
  r.v0 = moment(mu0, [&](double x) { return (llr(x) + r.i0) * (llr(x) + r.i0); });
  return r;
}

inline seqfdr::InfoNumbers bernoulli_info(double p0, double p1) {
  const double l1 = std::log(p1 / p0), l0 = std::log((1 - p1) / (1 - p0));
  seqfdr::InfoNumbers r;
  r.i1 = p1 * l1 + (1 - p1) * l0;
  r.i0 = -(p0 * l1 + (1 - p0) * l0);
  r.v1 = p1 * (l1 - r.i1) * (l1 - r.i1) + (1 - p1) * (l0 - r.i1) * (l0 - r.i1);
  r.v0 = p0 * (l1 + r.i0) * (l1 + r.i0) + (1 - p0) * (l0 + r.i0) * (l0 + r.i0);
  return r;
}

inline bool info_close(const seqfdr::InfoNumbers& got, const seqfdr::InfoNumbers& want, double rel) {
  auto ok = [rel](double a, double b) { return std::abs(a - b) <= rel * std::abs(b); };
  return ok(got.i0, want.i0) && ok(got.i1, want.i1) && ok(got.v0, want.v0) && ok(got.v1, want.v1);
}

// Brute-force step-up: the largest k with at least k p-values <= k alpha / J.
inline std::vector<std::size_t> bh(const std::vector<double>& p, double alpha) {
  const std::size_t j = p.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k <= j; ++k) {
    const double cut = static_cast<double>(k) * alpha / static_cast<double>(j);
    std::size_t below = 0;
    for (double x : p) below += x <= cut;
    if (below >= k) best = k;
  }
  std::vector<std::size_t> out;
  if (best == 0) return out;
  const double cut = static_cast<double>(best) * alpha / static_cast<double>(j);
  for (std::size_t i = 0; i < j; ++i)
    if (p[i] <= cut) out.push_back(i);
  return out;
}

struct FormulaPoint {
  double alpha, beta, c1, eta0, eta1;
  std::size_t j, m, l, u, a;
};

// Deterministic grid of parameter points covering the admissible ranges.
inline std::vector<FormulaPoint> formula_grid(unsigned seed, std::size_t count) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> logu(-20.0, -0.05), info(0.01, 3.0), unit;
  std::vector<FormulaPoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    FormulaPoint p{};
    p.alpha = std::exp(logu(gen));
    p.beta = std::exp(logu(gen));
    p.c1 = 1.0 + 4.0 * unit(gen);
    p.eta0 = info(gen);
    p.eta1 = info(gen);
    p.j = 2 + i % 50;
    p.m = 1 + i % (p.j - 1);
    p.l = i % p.j;
    p.u = p.l + 1 + (i / 3) % (p.j - p.l);
    p.a = p.l + i % (p.u - p.l + 1);
    out.push_back(p);
  }
  return out;
}

inline double gap_c(const FormulaPoint& p) {
  const double la = std::abs(std::log(p.alpha / p.c1)), lb = std::abs(std::log(p.beta / p.c1));
  return std::max(la, lb) + std::log(static_cast<double>(p.m) * static_cast<double>(p.j - p.m));
}

inline double gi_a(const FormulaPoint& p) { return std::abs(std::log(p.beta / p.c1)) + std::log(static_cast<double>(p.j)); }
inline double gi_b(const FormulaPoint& p) { return std::abs(std::log(p.alpha / p.c1)) + std::log(static_cast<double>(p.j)); }
inline double gi_c(const FormulaPoint& p) {
  return std::abs(std::log(p.alpha / p.c1)) + std::log(static_cast<double>(p.j - p.l) * static_cast<double>(p.j));
}
inline double gi_d(const FormulaPoint& p) {
  return std::abs(std::log(p.beta / p.c1)) + std::log(static_cast<double>(p.u) * static_cast<double>(p.j));
}

inline double kappa_gap(const FormulaPoint& p) {
  return std::max(std::abs(std::log(p.alpha)), std::abs(std::log(p.beta))) / (p.eta0 + p.eta1);
}

inline double kappa_gi(const FormulaPoint& p) {
  const double ka = std::abs(std::log(p.alpha)), kb = std::abs(std::log(p.beta));
  if (p.a == p.l) return std::max(kb / p.eta0, ka / (p.eta0 + p.eta1));
  if (p.a == p.u) return std::max(ka / p.eta1, kb / (p.eta0 + p.eta1));
  return std::max(kb / p.eta0, ka / p.eta1);
}

}  // namespace oracle
