#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdrdet/scene.hpp"

namespace fdrdet {

enum class Provenance {
  Exact,
  MonteCarlo,
  AsymptoticBinomial,
  AsymptoticGaussian,
  AsymptoticPoissonLike,
};

/// Probability mass function of the count statistic Delta over {0..N}.
struct CountPmf {
  std::vector<double> probs;  // N+1 entries
  Hypothesis hypothesis = Hypothesis::G0;
  Provenance provenance = Provenance::Exact;

  int max_count() const { return static_cast<int>(probs.size()) - 1; }
  double mean() const;
  double variance() const;
  /// P(Delta > t); t = -1 gives 1.
  double tail_above(int t) const;
  std::vector<double> cdf() const;
  /// CSV serialization: header `i,prob`, one row per count.
  std::string to_csv() const;
};

/// Count pmf under G0, closed form (Byzantine-invariant).
CountPmf pmf_g0_exact(int n, double gamma);

/// Large-N limit of the G0 pmf, truncated at i_max.
std::vector<double> pmf_g0_asymptotic(double gamma, int i_max);

/// Marginal p-value density under G1 for the disc target model.
double marginal_p_pdf_g1(double u, const TargetModel& target);

/// Count pmf under G1 with m Byzantines, evaluated by Monte Carlo over the
/// sensors' marginal q-value distributions followed by the step-up count.
CountPmf pmf_g1_exact(int n, int m, double gamma, const TargetModel& target,
                      std::uint64_t seed, std::int64_t samples, int workers = 1);

/// Quantities of the large-N characterization of the step-up rule.
struct AsymptoticParams {
  double null_fraction = 0.0;      // A0 = 1 - d0^2/R^2
  double slope = 0.0;              // beta = (1/gamma - A0)/(1 - A0)
  double v_star = 0.0;             // rejection threshold on q-values
  double amplitude = 0.0;          // phi = sqrt(P0)
  double byzantine_fraction = 0.0; // alpha
  double pd_honest = 0.0;          // mean detection prob., honest sensor
  double pd_byzantine = 0.0;       // mean detection prob., Byzantine sensor
  double pd_mean = 0.0;            // alpha-mixture of the two
};

/// Solves F(v) = beta*v for the largest root in (0,1); v_star = 0 when no
/// positive root exists.
AsymptoticParams solve_vstar(double gamma, double alpha, const TargetModel& target);

/// Fills pd_honest / pd_byzantine / pd_mean from v_star (closed forms).
void avg_detection_probs(AsymptoticParams& params);

/// Single-binomial form of the asymptotic G1 pmf.
CountPmf pmf_g1_asymptotic(int n, const AsymptoticParams& params);

/// Two-population convolution form of the asymptotic G1 pmf.
CountPmf pmf_g1_asymptotic_convolution(int n, int m, const AsymptoticParams& params);

/// Gaussian (DeMoivre-Laplace) density approximation, evaluable at any x.
double pmf_g1_gaussian(int n, double pd, double x);

}  // namespace fdrdet
