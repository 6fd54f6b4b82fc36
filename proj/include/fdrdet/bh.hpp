#pragma once

#include <span>
#include <vector>

#include "fdrdet/scene.hpp"

namespace fdrdet {

struct FdrLevel {
  double gamma = 0.1;  // FDR control level, in (0,1)
  void validate() const;
};

/// Outcome of the Benjamini-Hochberg step-up procedure on one q-vector.
struct BhResult {
  int count = 0;               // Delta, number of local H1 declarations
  std::vector<int> rejected;   // sensor indices declared H1
};

/// Step-up rule: d = largest i with q_(i) <= i*gamma/N, reject the d smallest.
BhResult bh_count(const PValueVector& q, FdrLevel gamma);

/// Count-only variant for Monte Carlo loops; sorts `scratch` in place.
int bh_count_value(std::span<const double> q, double gamma, std::vector<double>& scratch);

/// Per-sensor ground truth of H1 (signal actually received).
std::vector<bool> signal_truth(const Deployment& dep, const TargetModel& target, Hypothesis hyp);

/// Realized false-discovery fraction A = F/(F+S), 0 when nothing rejected.
double fdr_realization(const std::vector<int>& rejections, const std::vector<bool>& truth);

/// Table-I style bookkeeping against ground truth.
struct FdrAccounting {
  int false_alarms = 0;        // F
  int true_detections = 0;     // S
  int correct_rejections = 0;  // W
  int misses = 0;              // T of Table I
};

FdrAccounting fdr_accounting(const std::vector<int>& rejections, const std::vector<bool>& truth);

/// Identical-threshold baseline: number of q-values at or below p_fa.
int count_identical(const PValueVector& q, double p_fa);

}  // namespace fdrdet
