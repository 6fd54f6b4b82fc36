#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdrdet/adaptive.hpp"
#include "fdrdet/fusion.hpp"

namespace fdrdet {

/// One experiment's parameter set; flat on purpose so a config file or the
/// command line can populate any field by name.
struct Scenario {
  int n = 20;                 // N, sensor count
  double roi_radius = 10.0;   // R
  double influence_radius = 5.0;  // d0
  double signal_power = 5.0;  // P0
  double alpha = 0.0;
  double gamma = 0.1;
  double p_fa_target = 0.1;
  std::int64_t trials = 50000;
  std::uint64_t seed = 1;
  int workers = 1;

  TargetModel target() const {
    return TargetModel{signal_power, influence_radius, roi_radius};
  }
  int byzantines() const;
  void validate() const;
};

/// key = value overrides collected from the command line; these win over
/// file values in parse_config.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses a flat `key = value` config file (# comments, blank lines ok),
/// then applies the overrides. Unknown keys and out-of-range values raise
/// std::invalid_argument naming the offending key.
Scenario parse_config(const std::string& path, const KeyValues& overrides);

/// Override-only variant (no file).
Scenario parse_overrides(const KeyValues& overrides);

/// Named-column result table with a reproducibility metadata block.
struct ExperimentResult {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Optional text key per row (e.g. distance-measure names); when present
  /// it is emitted as the first CSV column and `columns[0]` names it.
  std::vector<std::string> row_labels;

  /// `# key = value` metadata lines, a header row, then %.6g data rows.
  std::string to_csv() const;
};

/// Appends the scenario echo + seed to a result's metadata block.
void annotate(ExperimentResult& result, const Scenario& sc);

/// One end-to-end trial: deploy, observe, attack, step-up count.
int simulate_trial(const Scenario& sc, Hypothesis hyp, Rng& rng, std::vector<double>& scratch);

/// End-to-end Monte Carlo count histogram (per-trial substreams).
CountPmf simulate_count_pmf(const Scenario& sc, Hypothesis hyp);

/// Exact count pmf of the identical-local-threshold baseline (counts of
/// q-values at or below p_local are a sum of two independent binomials).
CountPmf pmf_identical(const Scenario& sc, Hypothesis hyp, double p_local);

/// Prop-2 numerical pmf next to the end-to-end simulated pmf for
/// alpha in {0, 0.5, 1}. Columns: alpha,i,numerical,simulated.
ExperimentResult run_tables(const Scenario& sc);

/// Mean realized FDR and mean count under both hypotheses per alpha.
/// Columns: alpha,fdr_g0,fdr_g1,mean_delta_g0,mean_delta_g1.
ExperimentResult run_fdr_sweep(const Scenario& sc, std::span<const double> alpha_grid);

/// Gamma grid search per distance measure.
/// Columns: measure,gamma_opt,score,threshold,randomization.
ExperimentResult run_design(const Scenario& sc, std::span<const double> gamma_grid);

/// ROC of the step-up scheme or the identical-threshold baseline.
/// Columns: p_fa,p_d.
ExperimentResult run_roc(const Scenario& sc, std::span<const double> pfa_grid,
                         bool identical_scheme, double p_local);

/// Fixed-parameter vs per-alpha-optimized detection probability sweep.
/// Columns: alpha,pd_fixed,pd_adaptive,gamma_opt.
ExperimentResult run_alpha_pd_sweep(const Scenario& sc, std::span<const double> alpha_grid);

struct AdaptiveRunConfig {
  int horizon = 100;
  std::size_t window = 30;         // T0
  int switch_after = 1;
  double alpha_before = 0.0;
  double alpha_after = 0.7;
  int switch_time = 30;
  std::vector<double> region_alphas = {0.0, 0.5};
  std::vector<double> region_gammas = {0.25, 0.1};
  std::int64_t ref_samples = 200000;  // Monte Carlo size for region reference pmfs
};

/// Adaptive-vs-fixed timeline under a step alpha schedule.
/// Columns: t,alpha_true,pd_adaptive,pd_fixed,selected_region.
ExperimentResult run_adaptive(const Scenario& sc, const AdaptiveRunConfig& cfg);

/// Single pmf dump. Columns: i,prob.
ExperimentResult run_pmf(const Scenario& sc, Hypothesis hyp, bool asymptotic);

}  // namespace fdrdet
