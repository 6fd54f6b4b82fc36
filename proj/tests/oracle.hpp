#pragma once

// Independent small-N oracle for the count statistic's distribution.
//
// The step-up count Delta depends on a q-value vector only through how many
// entries fall at or below each threshold t_i = i*gamma/N. Partitioning
// [0,1] into the cells [0,t_1], (t_1,t_2], ..., (t_N,1] therefore reduces
// the problem to the joint distribution of the cell counts, which is a
// convolution of two multinomials: one for the n-m honest sensors (marginal
// cdf of p) and one for the m Byzantines (marginal cdf of 1-p). Exhaustive
// enumeration of both multinomials gives the pmf exactly (up to quadrature
// of the normal tail, which is closed-form here), with no Monte Carlo and
// no shared code with the library's sampling path beyond the normal cdf.

#include <cmath>
#include <functional>
#include <vector>

#include "fdrdet/normal.hpp"
#include "fdrdet/scene.hpp"

namespace oracle {

/// Marginal cdf of an honest sensor's p-value under G1.
inline double cdf_p_honest(double v, const fdrdet::TargetModel& target) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double in_disc = target.in_disc_fraction();
  const double phi = std::sqrt(target.signal_power);
  const double detect = fdrdet::gauss_upper_tail(fdrdet::gauss_upper_tail_inv(v) - phi);
  return in_disc * detect + (1.0 - in_disc) * v;
}

/// Marginal cdf of a Byzantine sensor's reported value q = 1 - p under G1.
inline double cdf_q_byzantine(double v, const fdrdet::TargetModel& target) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  return 1.0 - cdf_p_honest(1.0 - v, target);
}

/// Per-cell probabilities for the N+1 threshold cells of one sensor.
inline std::vector<double> cell_probs(int n, double gamma,
                                      const std::function<double(double)>& cdf) {
  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(n) + 1);
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double c = cdf(static_cast<double>(i) * gamma / n);
    cells.push_back(c - prev);
    prev = c;
  }
  cells.push_back(1.0 - prev);
  return cells;
}

/// Count statistic from cell counts: largest i with #\{q <= t_i\} >= i.
inline int count_from_cells(const std::vector<int>& cells, int n) {
  int delta = 0, cum = 0;
  for (int i = 1; i <= n; ++i) {
    cum += cells[static_cast<std::size_t>(i) - 1];
    if (cum >= i) delta = i;
  }
  return delta;
}

namespace detail {

/// Enumerates all count vectors of `total` items over `probs.size()` cells
/// with their multinomial probabilities.
inline void enumerate_multinomial(
    const std::vector<double>& probs, int total,
    const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<int> counts(probs.size(), 0);
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t cell, int left,
                                                          double weight) {
    if (cell + 1 == probs.size()) {
      counts[cell] = left;
      visit(counts, weight * std::pow(probs[cell], left));
      return;
    }
    double w = 1.0;
    for (int k = 0; k <= left; ++k) {
      counts[cell] = k;
      // w = C(left, k) * probs[cell]^k, built incrementally.
      rec(cell + 1, left - k, weight * w);
      w *= probs[cell] * static_cast<double>(left - k) / static_cast<double>(k + 1);
    }
  };
  rec(0, total, 1.0);
}

}  // namespace detail

/// Exact pmf of Delta for n sensors of which m are Byzantine, under G1.
/// Cost is O(C(n-m+N, N) * C(m+N, N)); intended for n <= ~8.
inline std::vector<double> count_pmf_g1(int n, int m, double gamma,
                                        const fdrdet::TargetModel& target) {
  const std::vector<double> honest_cells =
      cell_probs(n, gamma, [&](double v) { return cdf_p_honest(v, target); });
  const std::vector<double> byz_cells =
      cell_probs(n, gamma, [&](double v) { return cdf_q_byzantine(v, target); });
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  detail::enumerate_multinomial(honest_cells, n - m, [&](const std::vector<int>& hc, double hw) {
    detail::enumerate_multinomial(byz_cells, m, [&](const std::vector<int>& bc, double bw) {
      std::vector<int> cells(hc.size());
      for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = hc[i] + bc[i];
      pmf[static_cast<std::size_t>(count_from_cells(cells, n))] += hw * bw;
    });
  });
  return pmf;
}

/// Same enumeration under G0 (all marginals uniform); must reproduce the
/// closed-form null pmf.
inline std::vector<double> count_pmf_g0(int n, double gamma) {
  const std::vector<double> cells = cell_probs(n, gamma, [](double v) { return v; });
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  detail::enumerate_multinomial(cells, n, [&](const std::vector<int>& c, double w) {
    pmf[static_cast<std::size_t>(count_from_cells(c, n))] += w;
  });
  return pmf;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace oracle
