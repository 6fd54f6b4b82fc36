#include "fdrdet/bh.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fdrdet {

void FdrLevel::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("FdrLevel: gamma must lie in (0,1)");
  }
}

BhResult bh_count(const PValueVector& q, FdrLevel gamma) {
  gamma.validate();
  const auto n = q.p.size();
  if (n == 0) throw std::invalid_argument("bh_count: empty p-value vector");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return q.p[static_cast<std::size_t>(a)] <
                                              q.p[static_cast<std::size_t>(b)]; });

  const double step = gamma.gamma / static_cast<double>(n);
  int d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q.p[static_cast<std::size_t>(order[i])] <= static_cast<double>(i + 1) * step) {
      d = static_cast<int>(i + 1);
    }
  }

  BhResult res;
  res.count = d;
  res.rejected.assign(order.begin(), order.begin() + d);
  return res;
}

int bh_count_value(std::span<const double> q, double gamma, std::vector<double>& scratch) {
  const auto n = q.size();
  if (n == 0) throw std::invalid_argument("bh_count_value: empty p-value vector");
  scratch.assign(q.begin(), q.end());
  std::sort(scratch.begin(), scratch.end());
  const double step = gamma / static_cast<double>(n);
  int d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (scratch[i] <= static_cast<double>(i + 1) * step) d = static_cast<int>(i + 1);
  }
  return d;
}

std::vector<bool> signal_truth(const Deployment& dep, const TargetModel& target, Hypothesis hyp) {
  std::vector<bool> truth(dep.radii.size(), false);
  if (hyp == Hypothesis::G1) {
    for (std::size_t i = 0; i < dep.radii.size(); ++i) {
      truth[i] = dep.radii[i] <= target.influence_radius;
    }
  }
  return truth;
}

FdrAccounting fdr_accounting(const std::vector<int>& rejections, const std::vector<bool>& truth) {
  FdrAccounting acc;
  std::vector<bool> rejected(truth.size(), false);
  for (const int i : rejections) {
    if (i < 0 || static_cast<std::size_t>(i) >= truth.size()) {
      throw std::invalid_argument("fdr_accounting: rejection index out of range");
    }
    rejected[static_cast<std::size_t>(i)] = true;
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (rejected[i]) {
      (truth[i] ? acc.true_detections : acc.false_alarms)++;
    } else {
      (truth[i] ? acc.misses : acc.correct_rejections)++;
    }
  }
  return acc;
}

double fdr_realization(const std::vector<int>& rejections, const std::vector<bool>& truth) {
  const FdrAccounting acc = fdr_accounting(rejections, truth);
  const int total = acc.false_alarms + acc.true_detections;
  return total > 0 ? static_cast<double>(acc.false_alarms) / total : 0.0;
}

int count_identical(const PValueVector& q, double p_fa) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) {
    throw std::invalid_argument("count_identical: p_fa must lie in (0,1)");
  }
  int c = 0;
  for (const double v : q.p) c += (v <= p_fa) ? 1 : 0;
  return c;
}

}  // namespace fdrdet
