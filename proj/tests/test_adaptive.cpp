#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdrdet/adaptive.hpp"
#include "oracle.hpp"

using namespace fdrdet;

namespace {

const TargetModel kTableTarget{3.0, 3.0, 10.0};  // P0=3, d0=3, R=10

CountPmf make_pmf(std::vector<double> probs) {
  CountPmf pmf;
  pmf.probs = std::move(probs);
  return pmf;
}

/// Draws one value from a pmf by inverse-cdf.
int draw(const CountPmf& pmf, Rng& rng) {
  double u = rng.uniform(), acc = 0.0;
  for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
    acc += pmf.probs[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return pmf.max_count();
}

}  // namespace

TEST_CASE("goodness-of-fit hand cases") {
  // Support {0,1}, H(0)=0.75, H(1)=1; single sample [1]: S(0)=0, S(1)=1.
  const CountPmf ref = make_pmf({0.75, 0.25});
  const std::vector<int> one = {1};
  CHECK(conover_ks(one, ref) == doctest::Approx(0.75));
  // Empirical distribution equal to the reference atoms -> D = 0.
  const CountPmf half = make_pmf({0.5, 0.5});
  const std::vector<int> matched = {0, 1};
  CHECK(conover_ks(matched, half) == doctest::Approx(0.0));
  CHECK_THROWS_AS(conover_ks(std::vector<int>{}, ref), std::invalid_argument);
}

TEST_CASE("goodness-of-fit statistic is bounded and order invariant") {
  const CountPmf ref = make_pmf({0.3, 0.4, 0.2, 0.1});
  const std::vector<int> fwd = {0, 3, 1, 1, 2};
  const std::vector<int> rev = {2, 1, 1, 3, 0};
  const double d = conover_ks(fwd, ref);
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
  CHECK(conover_ks(rev, ref) == d);
  // Samples past the support fold into the tail.
  const std::vector<int> big = {9};
  CHECK(conover_ks(big, ref) == doctest::Approx(0.9));
}

TEST_CASE("region selection basics") {
  RegionHypothesis a;
  a.alpha_ref = 0.0;
  a.ref_pmf = make_pmf({0.5, 0.5});
  RegionHypothesis b = a;
  b.alpha_ref = 0.5;
  const std::vector<int> samples = {0, 1, 0};
  // Single hypothesis -> index 0; identical references -> tie -> lower index.
  CHECK(select_region(samples, std::vector<RegionHypothesis>{a}) == 0);
  CHECK(select_region(samples, std::vector<RegionHypothesis>{a, b}) == 0);
}

TEST_CASE("region selection separates the table scenarios") {
  // References: exact count pmfs at alpha=0 and alpha=1 for the N=4 table
  // scenario; 1000 draws from one reference should select it >= 95% of the
  // time over 100 repetitions.
  RegionHypothesis low, high;
  low.alpha_ref = 0.0;
  low.ref_pmf = make_pmf(oracle::count_pmf_g1(4, 0, 0.1, kTableTarget));
  high.alpha_ref = 1.0;
  high.ref_pmf = make_pmf(oracle::count_pmf_g1(4, 4, 0.1, kTableTarget));
  const std::vector<RegionHypothesis> regions = {low, high};
  int correct = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng = Rng::substream(53, static_cast<std::uint64_t>(rep), "test-select");
    std::vector<int> samples(1000);
    for (int& s : samples) s = draw(high.ref_pmf, rng);
    if (select_region(samples, regions) == 1) ++correct;
  }
  CHECK(correct >= 95);
}

TEST_CASE("adaptive step gating rules") {
  RegionHypothesis low, high;
  low.alpha_ref = 0.0;
  low.ref_pmf = make_pmf({0.05, 0.15, 0.8});
  low.params = GlobalDetector{0.25, 2, 0.1};
  high.alpha_ref = 0.5;
  high.ref_pmf = make_pmf({0.8, 0.15, 0.05});
  high.params = GlobalDetector{0.1, 1, 0.4};
  const std::vector<RegionHypothesis> regions = {low, high};

  CountWindow window(3);
  // G0 decisions leave the window untouched.
  GlobalDetector out = adaptive_step(window, regions, low.params, 2, false);
  CHECK(window.size() == 0);
  CHECK(out.threshold == low.params.threshold);
  // Partially filled window -> params unchanged.
  out = adaptive_step(window, regions, low.params, 0, true);
  CHECK(window.size() == 1);
  CHECK(out.gamma == low.params.gamma);
  // Window full of low counts -> matches the high-alpha reference.
  adaptive_step(window, regions, low.params, 0, true);
  out = adaptive_step(window, regions, low.params, 0, true);
  CHECK(window.full());
  CHECK(out.gamma == high.params.gamma);
  CHECK(out.threshold == high.params.threshold);
}

TEST_CASE("controller output stays within the configured parameter set") {
  RegionHypothesis low, high;
  low.ref_pmf = make_pmf({0.1, 0.9});
  low.params = GlobalDetector{0.25, 2, 0.1};
  high.ref_pmf = make_pmf({0.9, 0.1});
  high.params = GlobalDetector{0.1, 1, 0.4};
  AdaptiveController ctl({low, high}, 4, 0, 1);
  Rng rng = Rng::substream(59, 0, "test-controller");
  for (int t = 0; t < 200; ++t) {
    const GlobalDetector& det = ctl.step(static_cast<int>(rng.uniform_below(2)),
                                         rng.uniform() < 0.7);
    const bool is_low = det.gamma == low.params.gamma && det.threshold == low.params.threshold;
    const bool is_high = det.gamma == high.params.gamma && det.threshold == high.params.threshold;
    CHECK((is_low || is_high));
    CHECK(ctl.current_region() <= 1);
  }
  CHECK_THROWS_AS(AdaptiveController({}, 4, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(AdaptiveController({low}, 4, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(AdaptiveController({low}, 4, 0, 0), std::invalid_argument);
}

TEST_CASE("hysteresis delays a region change") {
  RegionHypothesis low, high;
  low.ref_pmf = make_pmf({0.05, 0.95});
  low.params = GlobalDetector{0.25, 2, 0.1};
  high.ref_pmf = make_pmf({0.95, 0.05});
  high.params = GlobalDetector{0.1, 1, 0.4};
  AdaptiveController ctl({low, high}, 2, 0, 3);
  // Two zero counts fill the window and clearly favor the high region, but
  // the switch waits for three consecutive identical selections.
  ctl.step(0, true);
  ctl.step(0, true);  // selection #1
  CHECK(ctl.current_region() == 0);
  ctl.step(0, true);  // selection #2
  CHECK(ctl.current_region() == 0);
  ctl.step(0, true);  // selection #3 -> switch
  CHECK(ctl.current_region() == 1);
}

TEST_CASE("timeline with no attackers shows no adaptive penalty") {
  const TargetModel target{5.0, 5.0, 10.0};
  const CountPmf pmf0_low = pmf_g0_exact(20, 0.25);
  const CountPmf pmf0_high = pmf_g0_exact(20, 0.1);
  RegionHypothesis low, high;
  low.alpha_ref = 0.0;
  low.ref_pmf = pmf_g1_exact(20, 0, 0.25, target, 61, 50000, 4);
  low.params = design_global_threshold(pmf0_low, 0.1, 0.25);
  high.alpha_ref = 0.5;
  high.ref_pmf = pmf_g1_exact(20, 10, 0.25, target, 67, 50000, 4);
  high.params = design_global_threshold(pmf0_high, 0.1, 0.1);
  TimelineConfig cfg;
  cfg.horizon = 40;
  cfg.episodes = 10000;
  cfg.window = 10;
  cfg.seed = 71;
  cfg.workers = 4;
  const auto timeline = simulate_adaptive_timeline(
      20, target, [](int) { return 0.0; }, std::vector<RegionHypothesis>{low, high},
      low.params, cfg);
  REQUIRE(timeline.size() == 40);
  for (const TimelinePoint& pt : timeline) {
    CHECK(pt.alpha_true == 0.0);
    CHECK(std::abs(pt.pd_adaptive - pt.pd_fixed) <= 0.02);
  }
}
