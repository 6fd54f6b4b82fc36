#include "fdrdet/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdrdet {

namespace {
void check_same_support(const CountPmf& pmf0, const CountPmf& pmf1) {
  if (pmf0.probs.size() != pmf1.probs.size()) {
    throw std::invalid_argument("distance measure: pmfs must share a support");
  }
}
}  // namespace

GlobalDetector design_global_threshold(const CountPmf& pmf0, double p_fa_target, double gamma) {
  if (!(p_fa_target > 0.0 && p_fa_target < 1.0)) {
    throw std::invalid_argument("design_global_threshold: p_fa_target must lie in (0,1)");
  }
  const int n = pmf0.max_count();
  GlobalDetector det;
  det.gamma = gamma;
  for (int t = 0; t <= n; ++t) {
    const double tail = pmf0.tail_above(t);
    if (tail <= p_fa_target) {
      det.threshold = t;
      const double atom = pmf0.probs[static_cast<std::size_t>(t)];
      det.randomization = atom > 0.0 ? (p_fa_target - tail) / atom : 0.0;
      det.randomization = std::clamp(det.randomization, 0.0, 1.0);
      return det;
    }
  }
  det.threshold = n;
  det.randomization = 0.0;
  return det;
}

double global_pfa(const CountPmf& pmf0, const GlobalDetector& det) {
  return pmf0.tail_above(det.threshold) +
         det.randomization * pmf0.probs[static_cast<std::size_t>(det.threshold)];
}

double global_pd(const CountPmf& pmf1, const GlobalDetector& det) {
  if (det.threshold < 0 || det.threshold > pmf1.max_count()) {
    throw std::invalid_argument("global_pd: detector threshold outside the pmf support");
  }
  return pmf1.tail_above(det.threshold) +
         det.randomization * pmf1.probs[static_cast<std::size_t>(det.threshold)];
}

RocCurve roc(const CountPmf& pmf0, const CountPmf& pmf1, std::span<const double> pfa_grid) {
  check_same_support(pmf0, pmf1);
  RocCurve curve;
  curve.points.reserve(pfa_grid.size());
  for (const double pfa : pfa_grid) {
    const GlobalDetector det = design_global_threshold(pmf0, pfa);
    curve.points.emplace_back(pfa, global_pd(pmf1, det));
  }
  return curve;
}

double deflection(const CountPmf& pmf0, const CountPmf& pmf1) {
  check_same_support(pmf0, pmf1);
  const double var0 = pmf0.variance();
  if (var0 <= 0.0) throw std::domain_error("deflection: zero variance under G0");
  const double d = pmf1.mean() - pmf0.mean();
  return d * d / var0;
}

double kl_divergence(const CountPmf& pmf0, const CountPmf& pmf1) {
  check_same_support(pmf0, pmf1);
  double kl = 0.0;
  for (std::size_t i = 0; i < pmf1.probs.size(); ++i) {
    const double p1 = pmf1.probs[i];
    if (p1 == 0.0) continue;  // 0*log 0 = 0
    const double p0 = pmf0.probs[i];
    if (p0 == 0.0) return std::numeric_limits<double>::infinity();
    kl += p1 * std::log(p1 / p0);
  }
  return kl;
}

double bhattacharyya(const CountPmf& pmf0, const CountPmf& pmf1) {
  check_same_support(pmf0, pmf1);
  double bc = 0.0;
  for (std::size_t i = 0; i < pmf0.probs.size(); ++i) {
    bc += std::sqrt(pmf0.probs[i] * pmf1.probs[i]);
  }
  return -std::log(bc);
}

double ks_distance(const CountPmf& pmf0, const CountPmf& pmf1) {
  check_same_support(pmf0, pmf1);
  double d = 0.0, c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < pmf0.probs.size(); ++i) {
    c0 += pmf0.probs[i];
    c1 += pmf1.probs[i];
    d = std::max(d, std::abs(c0 - c1));
  }
  return d;
}

double score_measure(DistanceMeasure measure, const CountPmf& pmf0, const CountPmf& pmf1,
                     double p_fa_target) {
  switch (measure) {
    case DistanceMeasure::Deflection:
      return deflection(pmf0, pmf1);
    case DistanceMeasure::KullbackLeibler:
      return kl_divergence(pmf0, pmf1);
    case DistanceMeasure::Bhattacharyya:
      return bhattacharyya(pmf0, pmf1);
    case DistanceMeasure::KolmogorovSmirnov:
      return ks_distance(pmf0, pmf1);
    case DistanceMeasure::RocPd:
      return global_pd(pmf1, design_global_threshold(pmf0, p_fa_target));
  }
  throw std::invalid_argument("score_measure: unknown measure");
}

std::vector<double> default_gamma_grid() {
  return {0.005, 0.008, 0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5};
}

GammaSearchResult optimize_gamma(DistanceMeasure measure, std::span<const double> grid, int n,
                                 int m, const TargetModel& target, const GammaSearchConfig& cfg) {
  if (grid.empty()) throw std::invalid_argument("optimize_gamma: empty gamma grid");
  GammaSearchResult result;
  result.scores.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double gamma = grid[k];
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("optimize_gamma: gamma grid values must lie in (0,1)");
    }
    const CountPmf pmf0 = pmf_g0_exact(n, gamma);
    // The per-gamma seed is fixed by the gamma value so the argmax is
    // deterministic and independent of grid ordering.
    const CountPmf pmf1 =
        pmf_g1_exact(n, m, gamma, target,
                     Rng::mix64(cfg.seed ^ Rng::hash_tag("gamma-grid") ^
                                static_cast<std::uint64_t>(gamma * 1e9)),
                     cfg.samples, cfg.workers);
    GammaScore gs;
    gs.gamma = gamma;
    gs.score = score_measure(measure, pmf0, pmf1, cfg.p_fa_target);
    gs.detector = design_global_threshold(pmf0, cfg.p_fa_target, gamma);
    result.scores.push_back(gs);
  }
  const GammaScore* best = nullptr;
  for (const auto& gs : result.scores) {
    if (best == nullptr || gs.score > best->score ||
        (gs.score == best->score && gs.gamma < best->gamma)) {
      best = &gs;
    }
  }
  result.best_gamma = best->gamma;
  return result;
}

}  // namespace fdrdet
