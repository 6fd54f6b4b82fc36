#include "fdrdet/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "fdrdet/normal.hpp"

namespace fdrdet {

void TargetModel::validate() const {
  if (!(roi_radius > 0.0)) {
    throw std::invalid_argument("TargetModel: roi_radius must be positive");
  }
  if (signal_power < 0.0) {
    throw std::invalid_argument("TargetModel: signal_power must be non-negative");
  }
  if (influence_radius < 0.0 || influence_radius > roi_radius) {
    throw std::invalid_argument("TargetModel: influence_radius must lie in [0, roi_radius]");
  }
}

double deployment_radius_from_uniform(double u, double roi_radius) {
  return roi_radius * std::sqrt(u);
}

Deployment sample_deployment(int n, double roi_radius, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_deployment: n must be >= 1");
  if (!(roi_radius > 0.0)) {
    throw std::invalid_argument("sample_deployment: roi_radius must be positive");
  }
  Deployment dep;
  dep.radii.resize(static_cast<std::size_t>(n));
  for (double& r : dep.radii) r = deployment_radius_from_uniform(rng.uniform(), roi_radius);
  return dep;
}

double signal_amplitude(double radius, const TargetModel& target, Hypothesis hyp) {
  if (hyp == Hypothesis::G0) return 0.0;
  return radius <= target.influence_radius ? std::sqrt(target.signal_power) : 0.0;
}

ObservationVector observe(const std::vector<double>& amplitudes, Hypothesis hyp, Rng& rng) {
  ObservationVector obs;
  obs.hypothesis = hyp;
  obs.s.resize(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) obs.s[i] = amplitudes[i] + rng.normal();
  return obs;
}

double p_value(double s) { return gauss_upper_tail(s); }

PValueVector p_values(const ObservationVector& obs) {
  PValueVector pv;
  pv.p.resize(obs.s.size());
  for (std::size_t i = 0; i < obs.s.size(); ++i) pv.p[i] = p_value(obs.s[i]);
  return pv;
}

int byzantine_count(int n, double alpha) {
  return static_cast<int>(std::floor(alpha * n + 0.5));
}

ByzantineMask sample_byzantine_mask(int n, double alpha, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_byzantine_mask: n must be >= 1");
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("sample_byzantine_mask: alpha must lie in [0,1]");
  }
  ByzantineMask mask;
  mask.alpha = alpha;
  mask.count = byzantine_count(n, alpha);
  mask.flags.assign(static_cast<std::size_t>(n), false);

  // Partial Fisher-Yates over sensor indices.
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < mask.count; ++k) {
    const auto j = k + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    mask.flags[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = true;
  }
  return mask;
}

PValueVector apply_byzantine(const PValueVector& p, const ByzantineMask& mask) {
  if (p.p.size() != mask.flags.size()) {
    throw std::invalid_argument("apply_byzantine: p-value vector and mask lengths differ");
  }
  PValueVector q = p;
  for (std::size_t i = 0; i < q.p.size(); ++i) {
    if (mask.flags[i]) q.p[i] = 1.0 - q.p[i];
  }
  return q;
}

}  // namespace fdrdet
