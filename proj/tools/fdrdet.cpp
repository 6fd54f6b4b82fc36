// fdrdet: experiment runner for FDR-based distributed detection under
// Byzantine data falsification. Every subcommand emits a CSV with a
// reproducibility metadata block; output is deterministic in the seed and
// independent of the worker count.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdrdet/sim.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  fdrdet::KeyValues overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "flat key = value config file");
  cmd->add_option("--out", opts.out_path, "output CSV path (default: stdout)");
  const auto add_kv = [cmd, &opts](const std::string& flag, const std::string& key,
                                   const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
  };
  add_kv("--N", "N", "sensor count");
  add_kv("--R", "R", "region-of-interest radius");
  add_kv("--d0", "d0", "target radius of influence");
  add_kv("--P0", "P0", "target signal power");
  add_kv("--alpha", "alpha", "Byzantine fraction");
  add_kv("--gamma", "gamma", "local FDR parameter");
  add_kv("--p-fa", "p_fa", "system false-alarm target");
  add_kv("--trials", "trials", "Monte Carlo trial count");
  add_kv("--seed", "seed", "64-bit master seed");
  add_kv("--workers", "workers", "worker thread count");
}

fdrdet::Scenario make_scenario(const CommonOpts& opts) {
  return opts.config_path.empty() ? fdrdet::parse_overrides(opts.overrides)
                                  : fdrdet::parse_config(opts.config_path, opts.overrides);
}

void emit(const fdrdet::ExperimentResult& result, const CommonOpts& opts) {
  const std::string csv = result.to_csv();
  if (opts.out_path.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + opts.out_path);
  out << csv;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FDR-based distributed detection experiments"};
  app.require_subcommand(1);

  CommonOpts tables_opts;
  CLI::App* tables = app.add_subcommand(
      "tables", "count pmf under G1: Monte Carlo evaluation vs end-to-end simulation");
  add_common(tables, tables_opts);

  CommonOpts fdr_opts;
  std::vector<double> fdr_alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  CLI::App* fdr = app.add_subcommand("fdr-sweep", "realized FDR and mean count vs alpha");
  add_common(fdr, fdr_opts);
  fdr->add_option("--alpha-grid", fdr_alphas, "alpha grid values");

  CommonOpts design_opts;
  std::vector<double> design_gammas;
  CLI::App* design = app.add_subcommand("design", "gamma grid search per distance measure");
  add_common(design, design_opts);
  design->add_option("--gamma-grid", design_gammas, "gamma grid values");

  CommonOpts roc_opts;
  std::string roc_scheme = "fdr";
  double roc_p_local = 0.005;
  double roc_lo = 0.02, roc_hi = 0.5;
  int roc_points = 25;
  CLI::App* roc_cmd = app.add_subcommand("roc", "receiver operating characteristic");
  add_common(roc_cmd, roc_opts);
  roc_cmd->add_option("--scheme", roc_scheme, "fdr | identical")
      ->check(CLI::IsMember({"fdr", "identical"}));
  roc_cmd->add_option("--p-local", roc_p_local, "local threshold of the identical scheme");
  roc_cmd->add_option("--pfa-min", roc_lo, "smallest grid P_FA");
  roc_cmd->add_option("--pfa-max", roc_hi, "largest grid P_FA");
  roc_cmd->add_option("--pfa-points", roc_points, "grid size")->check(CLI::PositiveNumber);

  CommonOpts apd_opts;
  std::vector<double> apd_alphas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  CLI::App* apd = app.add_subcommand("alpha-pd", "fixed vs optimized detection probability");
  add_common(apd, apd_opts);
  apd->add_option("--alpha-grid", apd_alphas, "alpha grid values");

  CommonOpts adp_opts;
  fdrdet::AdaptiveRunConfig adp_cfg;
  int adp_window = 30;
  CLI::App* adp = app.add_subcommand("adaptive", "adaptive vs fixed detector timeline");
  add_common(adp, adp_opts);
  adp->add_option("--horizon", adp_cfg.horizon, "time steps per episode");
  adp->add_option("--window", adp_window, "sliding window length T0");
  adp->add_option("--switch-after", adp_cfg.switch_after,
                  "consecutive identical selections required before switching");
  adp->add_option("--alpha-before", adp_cfg.alpha_before, "alpha before the switch time");
  adp->add_option("--alpha-after", adp_cfg.alpha_after, "alpha from the switch time onward");
  adp->add_option("--switch-time", adp_cfg.switch_time, "step at which alpha changes");
  adp->add_option("--region-alphas", adp_cfg.region_alphas, "representative region alphas");
  adp->add_option("--region-gammas", adp_cfg.region_gammas, "per-region gamma values");
  adp->add_option("--ref-samples", adp_cfg.ref_samples, "reference pmf Monte Carlo size");

  CommonOpts pmf_opts;
  std::string pmf_hyp = "g0";
  std::string pmf_form = "exact";
  CLI::App* pmf = app.add_subcommand("pmf", "single count pmf dump");
  add_common(pmf, pmf_opts);
  pmf->add_option("--hypothesis", pmf_hyp, "g0 | g1")->check(CLI::IsMember({"g0", "g1"}));
  pmf->add_option("--form", pmf_form, "exact | asymptotic")
      ->check(CLI::IsMember({"exact", "asymptotic"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (tables->parsed()) {
      emit(fdrdet::run_tables(make_scenario(tables_opts)), tables_opts);
    } else if (fdr->parsed()) {
      emit(fdrdet::run_fdr_sweep(make_scenario(fdr_opts), fdr_alphas), fdr_opts);
    } else if (design->parsed()) {
      if (design_gammas.empty()) design_gammas = fdrdet::default_gamma_grid();
      emit(fdrdet::run_design(make_scenario(design_opts), design_gammas), design_opts);
    } else if (roc_cmd->parsed()) {
      const std::vector<double> grid = linspace(roc_lo, roc_hi, roc_points);
      emit(fdrdet::run_roc(make_scenario(roc_opts), grid, roc_scheme == "identical", roc_p_local),
           roc_opts);
    } else if (apd->parsed()) {
      emit(fdrdet::run_alpha_pd_sweep(make_scenario(apd_opts), apd_alphas), apd_opts);
    } else if (adp->parsed()) {
      adp_cfg.window = static_cast<std::size_t>(adp_window);
      emit(fdrdet::run_adaptive(make_scenario(adp_opts), adp_cfg), adp_opts);
    } else if (pmf->parsed()) {
      emit(fdrdet::run_pmf(make_scenario(pmf_opts),
                           pmf_hyp == "g0" ? fdrdet::Hypothesis::G0 : fdrdet::Hypothesis::G1,
                           pmf_form == "asymptotic"),
           pmf_opts);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
