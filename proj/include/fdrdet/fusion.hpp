#pragma once

#include <span>
#include <vector>

#include "fdrdet/pmf.hpp"

namespace fdrdet {

/// Randomized fusion rule: declare G1 when Delta > threshold, and with
/// probability `randomization` when Delta == threshold.
struct GlobalDetector {
  double gamma = 0.1;         // local FDR parameter in use
  int threshold = 0;          // T
  double randomization = 0.0; // kappa
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (P_FA, P_D)
};

enum class DistanceMeasure {
  Deflection,
  KullbackLeibler,
  Bhattacharyya,
  KolmogorovSmirnov,
  RocPd,  // direct P_D at the target P_FA
};

/// Picks the smallest (T, kappa) meeting the false-alarm target exactly.
GlobalDetector design_global_threshold(const CountPmf& pmf0, double p_fa_target,
                                       double gamma = 0.0);

/// Reconstructed P_FA of a detector against a G0 pmf.
double global_pfa(const CountPmf& pmf0, const GlobalDetector& det);

double global_pd(const CountPmf& pmf1, const GlobalDetector& det);

RocCurve roc(const CountPmf& pmf0, const CountPmf& pmf1, std::span<const double> pfa_grid);

double deflection(const CountPmf& pmf0, const CountPmf& pmf1);
double kl_divergence(const CountPmf& pmf0, const CountPmf& pmf1);
double bhattacharyya(const CountPmf& pmf0, const CountPmf& pmf1);
double ks_distance(const CountPmf& pmf0, const CountPmf& pmf1);

double score_measure(DistanceMeasure measure, const CountPmf& pmf0, const CountPmf& pmf1,
                     double p_fa_target);

struct GammaScore {
  double gamma = 0.0;
  double score = 0.0;
  GlobalDetector detector;
};

struct GammaSearchResult {
  double best_gamma = 0.0;
  std::vector<GammaScore> scores;
};

struct GammaSearchConfig {
  std::int64_t samples = 100000;  // Monte Carlo pmf1 sample count per gamma
  std::uint64_t seed = 1;
  int workers = 1;
  double p_fa_target = 0.1;  // used by the RocPd criterion and detector design
};

/// Default gamma grid; covers all values used in the reference experiments.
std::vector<double> default_gamma_grid();

/// Grid search for the local FDR parameter: per gamma, exact G0 pmf and a
/// seeded Monte Carlo G1 pmf are scored; ties break toward smaller gamma.
GammaSearchResult optimize_gamma(DistanceMeasure measure, std::span<const double> grid, int n,
                                 int m, const TargetModel& target, const GammaSearchConfig& cfg);

}  // namespace fdrdet
