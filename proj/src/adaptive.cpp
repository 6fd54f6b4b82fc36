#include "fdrdet/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdrdet/bh.hpp"
#include "fdrdet/parallel.hpp"

namespace fdrdet {

double conover_ks(std::span<const int> samples, const CountPmf& ref_pmf) {
  if (samples.empty()) throw std::invalid_argument("conover_ks: empty sample window");
  const int n_cells = static_cast<int>(ref_pmf.probs.size());
  std::vector<std::int64_t> hist(static_cast<std::size_t>(n_cells), 0);
  for (const int x : samples) {
    if (x < 0) throw std::invalid_argument("conover_ks: negative count");
    // Counts past the reference support only ever raise the tail of the
    // empirical cdf, so folding them into the last cell is exact.
    const int cell = std::min(x, n_cells - 1);
    ++hist[static_cast<std::size_t>(cell)];
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  double d = 0.0, h = 0.0;
  std::int64_t acc = 0;
  for (int i = 0; i < n_cells; ++i) {
    h += ref_pmf.probs[static_cast<std::size_t>(i)];
    acc += hist[static_cast<std::size_t>(i)];
    d = std::max(d, std::abs(h - static_cast<double>(acc) * inv_n));
  }
  return d;
}

std::size_t select_region(std::span<const int> samples,
                          std::span<const RegionHypothesis> hypotheses) {
  if (hypotheses.empty()) throw std::invalid_argument("select_region: no region hypotheses");
  std::size_t best = 0;
  double best_d = conover_ks(samples, hypotheses[0].ref_pmf);
  for (std::size_t r = 1; r < hypotheses.size(); ++r) {
    const double d = conover_ks(samples, hypotheses[r].ref_pmf);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

GlobalDetector adaptive_step(CountWindow& window, std::span<const RegionHypothesis> hypotheses,
                             const GlobalDetector& current, int new_count, bool decided_g1) {
  if (decided_g1) window.push(new_count);
  if (!window.full()) return current;
  const std::vector<int> samples = window.samples();
  return hypotheses[select_region(samples, hypotheses)].params;
}

AdaptiveController::AdaptiveController(std::vector<RegionHypothesis> hypotheses,
                                       std::size_t window_capacity, std::size_t initial_region,
                                       int switch_after)
    : hypotheses_(std::move(hypotheses)),
      window_(window_capacity),
      switch_after_(switch_after) {
  if (hypotheses_.empty()) {
    throw std::invalid_argument("AdaptiveController: no region hypotheses");
  }
  if (initial_region >= hypotheses_.size()) {
    throw std::invalid_argument("AdaptiveController: initial region out of range");
  }
  if (switch_after_ < 1) {
    throw std::invalid_argument("AdaptiveController: switch_after must be >= 1");
  }
  region_ = initial_region;
  candidate_ = initial_region;
  current_ = hypotheses_[region_].params;
}

const GlobalDetector& AdaptiveController::step(int new_count, bool decided_g1) {
  if (decided_g1) window_.push(new_count);
  if (!window_.full()) return current_;
  const std::vector<int> samples = window_.samples();
  const std::size_t pick = select_region(samples, hypotheses_);
  if (pick == region_) {
    candidate_ = region_;
    streak_ = 0;
    return current_;
  }
  if (pick == candidate_) {
    ++streak_;
  } else {
    candidate_ = pick;
    streak_ = 1;
  }
  if (streak_ >= switch_after_) {
    region_ = pick;
    current_ = hypotheses_[region_].params;
    streak_ = 0;
  }
  return current_;
}

std::vector<TimelinePoint> simulate_adaptive_timeline(
    int n, const TargetModel& target, const std::function<double(int)>& alpha_schedule,
    std::span<const RegionHypothesis> hypotheses, const GlobalDetector& initial,
    const TimelineConfig& cfg) {
  target.validate();
  if (n <= 0) throw std::invalid_argument("simulate_adaptive_timeline: n must be positive");
  if (cfg.horizon <= 0 || cfg.episodes <= 0) {
    throw std::invalid_argument("simulate_adaptive_timeline: empty timeline");
  }
  const auto horizon = static_cast<std::size_t>(cfg.horizon);
  const int workers = std::max(cfg.workers, 1);

  struct Accum {
    std::vector<std::int64_t> det_adaptive, det_fixed, region_sum;
  };
  std::vector<Accum> accum(static_cast<std::size_t>(workers));
  for (auto& a : accum) {
    a.det_adaptive.assign(horizon, 0);
    a.det_fixed.assign(horizon, 0);
    a.region_sum.assign(horizon, 0);
  }

  // The initial detector must be one of the region hypotheses so the
  // controller can track which region it currently occupies.
  std::size_t initial_region = hypotheses.size();
  for (std::size_t r = 0; r < hypotheses.size(); ++r) {
    if (hypotheses[r].params.gamma == initial.gamma &&
        hypotheses[r].params.threshold == initial.threshold &&
        hypotheses[r].params.randomization == initial.randomization) {
      initial_region = r;
      break;
    }
  }
  if (initial_region == hypotheses.size()) {
    throw std::invalid_argument(
        "simulate_adaptive_timeline: initial detector matches no region hypothesis");
  }

  const std::vector<RegionHypothesis> regions(hypotheses.begin(), hypotheses.end());
  parallel_for(cfg.episodes, workers, [&](std::int64_t begin, std::int64_t end, int worker) {
    Accum& a = accum[static_cast<std::size_t>(worker)];
    std::vector<double> scratch;
    std::vector<double> amplitudes(static_cast<std::size_t>(n));
    for (std::int64_t ep = begin; ep < end; ++ep) {
      Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(ep), "adaptive-episode");
      AdaptiveController ctl(regions, cfg.window, initial_region, cfg.switch_after);
      for (int t = 0; t < cfg.horizon; ++t) {
        const double alpha = alpha_schedule(t);
        const Deployment dep = sample_deployment(n, target.roi_radius, rng);
        for (int i = 0; i < n; ++i) {
          amplitudes[static_cast<std::size_t>(i)] =
              signal_amplitude(dep.radii[static_cast<std::size_t>(i)], target, Hypothesis::G1);
        }
        const ObservationVector obs = observe(amplitudes, Hypothesis::G1, rng);
        const PValueVector p = p_values(obs);
        const ByzantineMask mask = sample_byzantine_mask(n, alpha, rng);
        const PValueVector q = apply_byzantine(p, mask);

        const GlobalDetector& det_a = ctl.current();
        const GlobalDetector& det_f = initial;
        const int delta_a = bh_count_value(q.p, det_a.gamma, scratch);
        const int delta_f = det_f.gamma == det_a.gamma
                                ? delta_a
                                : bh_count_value(q.p, det_f.gamma, scratch);

        bool dec_a = delta_a > det_a.threshold;
        if (!dec_a && delta_a == det_a.threshold && det_a.randomization > 0.0) {
          dec_a = rng.uniform() <= det_a.randomization;
        }
        bool dec_f = delta_f > det_f.threshold;
        if (!dec_f && delta_f == det_f.threshold && det_f.randomization > 0.0) {
          dec_f = rng.uniform() <= det_f.randomization;
        }

        const auto tt = static_cast<std::size_t>(t);
        a.det_adaptive[tt] += dec_a ? 1 : 0;
        a.det_fixed[tt] += dec_f ? 1 : 0;
        a.region_sum[tt] += static_cast<std::int64_t>(ctl.current_region());
        ctl.step(delta_a, dec_a);
      }
    }
  });

  std::vector<TimelinePoint> timeline(horizon);
  const double inv_ep = 1.0 / static_cast<double>(cfg.episodes);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::int64_t da = 0, df = 0, rs = 0;
    for (const auto& a : accum) {
      da += a.det_adaptive[t];
      df += a.det_fixed[t];
      rs += a.region_sum[t];
    }
    TimelinePoint& pt = timeline[t];
    pt.t = static_cast<int>(t);
    pt.alpha_true = alpha_schedule(static_cast<int>(t));
    pt.pd_adaptive = static_cast<double>(da) * inv_ep;
    pt.pd_fixed = static_cast<double>(df) * inv_ep;
    pt.mean_region = static_cast<double>(rs) * inv_ep;
  }
  return timeline;
}

}  // namespace fdrdet
