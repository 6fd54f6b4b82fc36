#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "fdrdet/fusion.hpp"

namespace fdrdet {

/// One candidate attacker-fraction region: its representative alpha, the
/// reference count distribution under G1, and the detector parameters to
/// switch to when the region is selected.
struct RegionHypothesis {
  double alpha_ref = 0.0;
  CountPmf ref_pmf;
  GlobalDetector params;
};

/// FIFO of count values recorded at time steps with a G1 global decision.
class CountWindow {
 public:
  explicit CountWindow(std::size_t capacity) : capacity_(capacity) {}

  void push(int count) {
    if (samples_.size() == capacity_) samples_.pop_front();
    samples_.push_back(count);
  }
  bool full() const { return samples_.size() == capacity_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::vector<int> samples() const { return {samples_.begin(), samples_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<int> samples_;
};

/// Goodness-of-fit statistic for a discrete reference distribution:
/// D = max over the support of |H(x) - S_n(x)|.
double conover_ks(std::span<const int> samples, const CountPmf& ref_pmf);

/// Best-fitting region (argmin of D); ties break toward the lower index.
std::size_t select_region(std::span<const int> samples,
                          std::span<const RegionHypothesis> hypotheses);

/// One controller update: record the count on a G1 decision, and re-select
/// the region once the window is full.
GlobalDetector adaptive_step(CountWindow& window, std::span<const RegionHypothesis> hypotheses,
                             const GlobalDetector& current, int new_count, bool decided_g1);

/// Stateful wrapper around adaptive_step with optional switch hysteresis:
/// a region change is applied only after `switch_after` consecutive
/// identical selections (1 = immediate, the default).
class AdaptiveController {
 public:
  AdaptiveController(std::vector<RegionHypothesis> hypotheses, std::size_t window_capacity,
                     std::size_t initial_region = 0, int switch_after = 1);

  const GlobalDetector& current() const { return current_; }
  std::size_t current_region() const { return region_; }

  const GlobalDetector& step(int new_count, bool decided_g1);

 private:
  std::vector<RegionHypothesis> hypotheses_;
  CountWindow window_;
  GlobalDetector current_;
  std::size_t region_ = 0;
  int switch_after_ = 1;
  std::size_t candidate_ = 0;
  int streak_ = 0;
};

struct TimelineConfig {
  int horizon = 100;          // number of time steps per episode
  std::int64_t episodes = 10000;
  std::size_t window = 30;    // T0
  std::uint64_t seed = 1;
  int workers = 1;
  int switch_after = 1;
};

struct TimelinePoint {
  int t = 0;
  double alpha_true = 0.0;
  double pd_adaptive = 0.0;
  double pd_fixed = 0.0;
  double mean_region = 0.0;  // mean selected region index across episodes
};

/// Monte Carlo of the adaptive detector against a fixed-parameter detector
/// over a time-varying attacker fraction; every step is a G1 trial.
std::vector<TimelinePoint> simulate_adaptive_timeline(
    int n, const TargetModel& target, const std::function<double(int)>& alpha_schedule,
    std::span<const RegionHypothesis> hypotheses, const GlobalDetector& initial,
    const TimelineConfig& cfg);

}  // namespace fdrdet
