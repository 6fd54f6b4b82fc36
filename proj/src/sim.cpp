#include "fdrdet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fdrdet/bh.hpp"
#include "fdrdet/parallel.hpp"

namespace fdrdet {

namespace {

std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: value for '" + key + "' is not a number: " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: trailing characters in value for '" + key + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: value for '" + key +
                                "' is not a non-negative integer: " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: trailing characters in value for '" + key + "'");
  }
  return v;
}

void apply_key(Scenario& sc, const std::string& key, const std::string& value) {
  if (key == "N") {
    sc.n = static_cast<int>(parse_u64(key, value));
  } else if (key == "R") {
    sc.roi_radius = parse_double(key, value);
  } else if (key == "d0") {
    sc.influence_radius = parse_double(key, value);
  } else if (key == "P0") {
    sc.signal_power = parse_double(key, value);
  } else if (key == "alpha") {
    sc.alpha = parse_double(key, value);
  } else if (key == "gamma") {
    sc.gamma = parse_double(key, value);
  } else if (key == "p_fa") {
    sc.p_fa_target = parse_double(key, value);
  } else if (key == "trials") {
    sc.trials = static_cast<std::int64_t>(parse_u64(key, value));
  } else if (key == "seed") {
    sc.seed = parse_u64(key, value);
  } else if (key == "workers") {
    sc.workers = static_cast<int>(parse_u64(key, value));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

/// Deterministic per-(runner, alpha) seed so sub-experiments of one run
/// draw from unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, double alpha = 0.0) {
  const auto alpha_bits = static_cast<std::uint64_t>(std::llround(alpha * 1e9));
  return Rng::mix64(master ^ Rng::hash_tag(tag) ^ alpha_bits);
}

std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[static_cast<std::size_t>(n)] = 1.0;
    return pmf;
  }
  const double lp = std::log(p), lq = std::log1p(-p);
  for (int k = 0; k <= n; ++k) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    pmf[static_cast<std::size_t>(k)] = std::exp(lc + k * lp + (n - k) * lq);
  }
  return pmf;
}

const std::vector<std::pair<DistanceMeasure, std::string>>& measure_table() {
  static const std::vector<std::pair<DistanceMeasure, std::string>> table = {
      {DistanceMeasure::Deflection, "deflection"},
      {DistanceMeasure::KullbackLeibler, "kl"},
      {DistanceMeasure::Bhattacharyya, "bhattacharyya"},
      {DistanceMeasure::KolmogorovSmirnov, "ks"},
      {DistanceMeasure::RocPd, "roc"},
  };
  return table;
}

}  // namespace

int Scenario::byzantines() const { return byzantine_count(n, alpha); }

void Scenario::validate() const {
  if (n < 1) throw std::invalid_argument("config: 'N' must be >= 1");
  if (!(roi_radius > 0.0)) throw std::invalid_argument("config: 'R' must be positive");
  if (influence_radius < 0.0 || influence_radius > roi_radius) {
    throw std::invalid_argument("config: 'd0' must lie in [0, R]");
  }
  if (signal_power < 0.0) throw std::invalid_argument("config: 'P0' must be non-negative");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("config: 'alpha' must lie in [0,1]");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("config: 'gamma' must lie in (0,1)");
  }
  if (!(p_fa_target > 0.0 && p_fa_target < 1.0)) {
    throw std::invalid_argument("config: 'p_fa' must lie in (0,1)");
  }
  if (trials < 1) throw std::invalid_argument("config: 'trials' must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: 'workers' must be >= 1");
}

Scenario parse_overrides(const KeyValues& overrides) {
  Scenario sc;
  for (const auto& [key, value] : overrides) apply_key(sc, key, value);
  sc.validate();
  return sc;
}

Scenario parse_config(const std::string& path, const KeyValues& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file: " + path);
  Scenario sc;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not of the form key = value");
    }
    apply_key(sc, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  for (const auto& [key, value] : overrides) apply_key(sc, key, value);
  sc.validate();
  return sc;
}

std::string ExperimentResult::to_csv() const {
  std::ostringstream out;
  for (const auto& [key, value] : metadata) out << "# " << key << " = " << value << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << "\n";
  const bool labeled = !row_labels.empty();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (labeled) out << row_labels[r] << ',';
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out << ',';
      out << fmt_g6(rows[r][c]);
    }
    out << "\n";
  }
  return out.str();
}

void annotate(ExperimentResult& result, const Scenario& sc) {
  result.metadata.emplace_back("tool", "fdrdet 1.0.0");
  result.metadata.emplace_back("N", std::to_string(sc.n));
  result.metadata.emplace_back("R", fmt_g6(sc.roi_radius));
  result.metadata.emplace_back("d0", fmt_g6(sc.influence_radius));
  result.metadata.emplace_back("P0", fmt_g6(sc.signal_power));
  result.metadata.emplace_back("alpha", fmt_g6(sc.alpha));
  result.metadata.emplace_back("gamma", fmt_g6(sc.gamma));
  result.metadata.emplace_back("p_fa", fmt_g6(sc.p_fa_target));
  result.metadata.emplace_back("trials", std::to_string(sc.trials));
  result.metadata.emplace_back("seed", std::to_string(sc.seed));
}

int simulate_trial(const Scenario& sc, Hypothesis hyp, Rng& rng, std::vector<double>& scratch) {
  const TargetModel target = sc.target();
  const Deployment dep = sample_deployment(sc.n, sc.roi_radius, rng);
  scratch.resize(static_cast<std::size_t>(sc.n));
  for (int i = 0; i < sc.n; ++i) {
    scratch[static_cast<std::size_t>(i)] =
        signal_amplitude(dep.radii[static_cast<std::size_t>(i)], target, hyp);
  }
  const ObservationVector obs = observe(scratch, hyp, rng);
  const PValueVector p = p_values(obs);
  const ByzantineMask mask = sample_byzantine_mask(sc.n, sc.alpha, rng);
  const PValueVector q = apply_byzantine(p, mask);
  return bh_count_value(q.p, sc.gamma, scratch);
}

CountPmf simulate_count_pmf(const Scenario& sc, Hypothesis hyp) {
  sc.validate();
  const char* tag = hyp == Hypothesis::G0 ? "sim-count-g0" : "sim-count-g1";
  const int workers = std::max(sc.workers, 1);
  std::vector<std::vector<std::int64_t>> hists(
      static_cast<std::size_t>(workers),
      std::vector<std::int64_t>(static_cast<std::size_t>(sc.n) + 1, 0));
  parallel_for(sc.trials, workers, [&](std::int64_t begin, std::int64_t end, int worker) {
    std::vector<double> scratch;
    auto& hist = hists[static_cast<std::size_t>(worker)];
    for (std::int64_t t = begin; t < end; ++t) {
      Rng rng = Rng::substream(sc.seed, static_cast<std::uint64_t>(t), tag);
      ++hist[static_cast<std::size_t>(simulate_trial(sc, hyp, rng, scratch))];
    }
  });
  CountPmf pmf;
  pmf.hypothesis = hyp;
  pmf.provenance = Provenance::MonteCarlo;
  pmf.probs.assign(static_cast<std::size_t>(sc.n) + 1, 0.0);
  const double inv = 1.0 / static_cast<double>(sc.trials);
  for (std::size_t i = 0; i <= static_cast<std::size_t>(sc.n); ++i) {
    std::int64_t total = 0;
    for (const auto& hist : hists) total += hist[i];
    pmf.probs[i] = static_cast<double>(total) * inv;
  }
  return pmf;
}

CountPmf pmf_identical(const Scenario& sc, Hypothesis hyp, double p_local) {
  sc.validate();
  if (!(p_local > 0.0 && p_local < 1.0)) {
    throw std::invalid_argument("pmf_identical: local threshold must lie in (0,1)");
  }
  const TargetModel target = sc.target();
  double p_honest = p_local, p_byz = p_local;
  if (hyp == Hypothesis::G1) {
    const double in_disc = target.in_disc_fraction();
    const double phi = std::sqrt(target.signal_power);
    const auto detect = [&](double v) {
      return gauss_upper_tail(gauss_upper_tail_inv(v) - phi);
    };
    p_honest = in_disc * detect(p_local) + (1.0 - in_disc) * p_local;
    // A Byzantine reports q = 1-p, so q <= lambda means p >= 1-lambda.
    p_byz = in_disc * (1.0 - detect(1.0 - p_local)) + (1.0 - in_disc) * p_local;
  }
  const int m = sc.byzantines();
  const std::vector<double> byz = binomial_pmf(m, p_byz);
  const std::vector<double> honest = binomial_pmf(sc.n - m, p_honest);
  CountPmf pmf;
  pmf.hypothesis = hyp;
  pmf.provenance = Provenance::Exact;
  pmf.probs.assign(static_cast<std::size_t>(sc.n) + 1, 0.0);
  for (std::size_t a = 0; a < byz.size(); ++a) {
    for (std::size_t b = 0; b < honest.size(); ++b) {
      pmf.probs[a + b] += byz[a] * honest[b];
    }
  }
  return pmf;
}

ExperimentResult run_tables(const Scenario& sc) {
  sc.validate();
  ExperimentResult result;
  annotate(result, sc);
  result.columns = {"alpha", "i", "numerical", "simulated"};
  const TargetModel target = sc.target();
  for (const double alpha : {0.0, 0.5, 1.0}) {
    Scenario local = sc;
    local.alpha = alpha;
    const CountPmf numerical =
        pmf_g1_exact(sc.n, local.byzantines(), sc.gamma, target,
                     derive_seed(sc.seed, "tables-numerical", alpha), sc.trials, sc.workers);
    local.seed = derive_seed(sc.seed, "tables-simulated", alpha);
    const CountPmf simulated = simulate_count_pmf(local, Hypothesis::G1);
    for (int i = 0; i <= sc.n; ++i) {
      result.rows.push_back({alpha, static_cast<double>(i),
                             numerical.probs[static_cast<std::size_t>(i)],
                             simulated.probs[static_cast<std::size_t>(i)]});
    }
  }
  return result;
}

ExperimentResult run_fdr_sweep(const Scenario& sc, std::span<const double> alpha_grid) {
  sc.validate();
  if (alpha_grid.empty()) throw std::invalid_argument("run_fdr_sweep: empty alpha grid");
  ExperimentResult result;
  annotate(result, sc);
  result.columns = {"alpha", "fdr_g0", "fdr_g1", "mean_delta_g0", "mean_delta_g1"};
  const TargetModel target = sc.target();
  const FdrLevel level{sc.gamma};
  const auto n_trials = static_cast<std::size_t>(sc.trials);
  std::vector<double> fdr(n_trials), delta(n_trials);
  for (const double alpha : alpha_grid) {
    std::vector<double> row = {alpha, 0.0, 0.0, 0.0, 0.0};
    for (const Hypothesis hyp : {Hypothesis::G0, Hypothesis::G1}) {
      const char* tag = hyp == Hypothesis::G0 ? "fdr-sweep-g0" : "fdr-sweep-g1";
      const std::uint64_t seed = derive_seed(sc.seed, tag, alpha);
      parallel_for(sc.trials, sc.workers, [&](std::int64_t begin, std::int64_t end, int) {
        std::vector<double> amps;
        for (std::int64_t t = begin; t < end; ++t) {
          Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t), "trial");
          const Deployment dep = sample_deployment(sc.n, sc.roi_radius, rng);
          amps.resize(static_cast<std::size_t>(sc.n));
          for (int i = 0; i < sc.n; ++i) {
            amps[static_cast<std::size_t>(i)] =
                signal_amplitude(dep.radii[static_cast<std::size_t>(i)], target, hyp);
          }
          const ObservationVector obs = observe(amps, hyp, rng);
          const PValueVector p = p_values(obs);
          const ByzantineMask mask = sample_byzantine_mask(sc.n, alpha, rng);
          const PValueVector q = apply_byzantine(p, mask);
          const BhResult bh = bh_count(q, level);
          const std::vector<bool> truth = signal_truth(dep, target, hyp);
          const auto idx = static_cast<std::size_t>(t);
          fdr[idx] = fdr_realization(bh.rejected, truth);
          delta[idx] = static_cast<double>(bh.count);
        }
      });
      // Serial reduction in trial order keeps the sums independent of the
      // worker partition.
      double fdr_sum = 0.0, delta_sum = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        fdr_sum += fdr[t];
        delta_sum += delta[t];
      }
      const std::size_t slot = hyp == Hypothesis::G0 ? 1 : 2;
      row[slot] = fdr_sum / static_cast<double>(sc.trials);
      row[slot + 2] = delta_sum / static_cast<double>(sc.trials);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExperimentResult run_design(const Scenario& sc, std::span<const double> gamma_grid) {
  sc.validate();
  ExperimentResult result;
  annotate(result, sc);
  result.columns = {"measure", "gamma_opt", "score", "threshold", "randomization"};
  GammaSearchConfig cfg;
  cfg.samples = sc.trials;
  cfg.seed = derive_seed(sc.seed, "design");
  cfg.workers = sc.workers;
  cfg.p_fa_target = sc.p_fa_target;
  const TargetModel target = sc.target();
  for (const auto& [measure, name] : measure_table()) {
    const GammaSearchResult search =
        optimize_gamma(measure, gamma_grid, sc.n, sc.byzantines(), target, cfg);
    const GammaScore* best = nullptr;
    for (const auto& gs : search.scores) {
      if (gs.gamma == search.best_gamma) best = &gs;
    }
    result.row_labels.push_back(name);
    result.rows.push_back({best->gamma, best->score, static_cast<double>(best->detector.threshold),
                           best->detector.randomization});
  }
  return result;
}

ExperimentResult run_roc(const Scenario& sc, std::span<const double> pfa_grid,
                         bool identical_scheme, double p_local) {
  sc.validate();
  if (pfa_grid.empty()) throw std::invalid_argument("run_roc: empty p_fa grid");
  ExperimentResult result;
  annotate(result, sc);
  result.metadata.emplace_back("scheme", identical_scheme ? "identical" : "fdr");
  if (identical_scheme) result.metadata.emplace_back("p_local", fmt_g6(p_local));
  result.columns = {"p_fa", "p_d"};
  CountPmf pmf0, pmf1;
  if (identical_scheme) {
    pmf0 = pmf_identical(sc, Hypothesis::G0, p_local);
    pmf1 = pmf_identical(sc, Hypothesis::G1, p_local);
  } else {
    pmf0 = pmf_g0_exact(sc.n, sc.gamma);
    pmf1 = pmf_g1_exact(sc.n, sc.byzantines(), sc.gamma, sc.target(),
                        derive_seed(sc.seed, "roc-g1", sc.alpha), sc.trials, sc.workers);
  }
  const RocCurve curve = roc(pmf0, pmf1, pfa_grid);
  for (const auto& [pfa, pd] : curve.points) result.rows.push_back({pfa, pd});
  return result;
}

ExperimentResult run_alpha_pd_sweep(const Scenario& sc, std::span<const double> alpha_grid) {
  sc.validate();
  if (alpha_grid.empty()) throw std::invalid_argument("run_alpha_pd_sweep: empty alpha grid");
  ExperimentResult result;
  annotate(result, sc);
  result.columns = {"alpha", "pd_fixed", "pd_adaptive", "gamma_opt"};
  const TargetModel target = sc.target();
  const CountPmf pmf0_fixed = pmf_g0_exact(sc.n, sc.gamma);
  const GlobalDetector fixed = design_global_threshold(pmf0_fixed, sc.p_fa_target, sc.gamma);
  const std::vector<double> grid = default_gamma_grid();
  for (const double alpha : alpha_grid) {
    const int m = byzantine_count(sc.n, alpha);
    const CountPmf pmf1_fixed =
        pmf_g1_exact(sc.n, m, sc.gamma, target, derive_seed(sc.seed, "alpha-pd-fixed", alpha),
                     sc.trials, sc.workers);
    const double pd_fixed = global_pd(pmf1_fixed, fixed);
    GammaSearchConfig cfg;
    cfg.samples = sc.trials;
    cfg.seed = derive_seed(sc.seed, "alpha-pd-opt", alpha);
    cfg.workers = sc.workers;
    cfg.p_fa_target = sc.p_fa_target;
    const GammaSearchResult search =
        optimize_gamma(DistanceMeasure::RocPd, grid, sc.n, m, target, cfg);
    double pd_adaptive = 0.0;
    for (const auto& gs : search.scores) {
      if (gs.gamma == search.best_gamma) pd_adaptive = gs.score;
    }
    result.rows.push_back({alpha, pd_fixed, pd_adaptive, search.best_gamma});
  }
  return result;
}

ExperimentResult run_adaptive(const Scenario& sc, const AdaptiveRunConfig& cfg) {
  sc.validate();
  if (cfg.region_alphas.size() != cfg.region_gammas.size() || cfg.region_alphas.empty()) {
    throw std::invalid_argument("run_adaptive: region alpha/gamma lists must match and be non-empty");
  }
  const TargetModel target = sc.target();
  // Reference pmfs are evaluated at the initial operating gamma: the counts
  // being classified are produced by whatever gamma the detector currently
  // runs, and the cold-start detector is region 0's.
  const double gamma_ref = cfg.region_gammas.front();
  std::vector<RegionHypothesis> regions;
  regions.reserve(cfg.region_alphas.size());
  for (std::size_t r = 0; r < cfg.region_alphas.size(); ++r) {
    RegionHypothesis hyp;
    hyp.alpha_ref = cfg.region_alphas[r];
    hyp.ref_pmf = pmf_g1_exact(sc.n, byzantine_count(sc.n, hyp.alpha_ref), gamma_ref, target,
                               derive_seed(sc.seed, "adaptive-ref", hyp.alpha_ref),
                               cfg.ref_samples, sc.workers);
    const double gamma_r = cfg.region_gammas[r];
    hyp.params = design_global_threshold(pmf_g0_exact(sc.n, gamma_r), sc.p_fa_target, gamma_r);
    regions.push_back(std::move(hyp));
  }
  TimelineConfig tl;
  tl.horizon = cfg.horizon;
  tl.episodes = sc.trials;
  tl.window = cfg.window;
  tl.seed = derive_seed(sc.seed, "adaptive-timeline");
  tl.workers = sc.workers;
  tl.switch_after = cfg.switch_after;
  const auto schedule = [&cfg](int t) {
    return t < cfg.switch_time ? cfg.alpha_before : cfg.alpha_after;
  };
  const std::vector<TimelinePoint> timeline =
      simulate_adaptive_timeline(sc.n, target, schedule, regions, regions.front().params, tl);
  ExperimentResult result;
  annotate(result, sc);
  result.metadata.emplace_back("T0", std::to_string(cfg.window));
  result.metadata.emplace_back("switch_time", std::to_string(cfg.switch_time));
  result.columns = {"t", "alpha_true", "pd_adaptive", "pd_fixed", "selected_region"};
  for (const TimelinePoint& pt : timeline) {
    result.rows.push_back({static_cast<double>(pt.t), pt.alpha_true, pt.pd_adaptive, pt.pd_fixed,
                           pt.mean_region});
  }
  return result;
}

ExperimentResult run_pmf(const Scenario& sc, Hypothesis hyp, bool asymptotic) {
  sc.validate();
  ExperimentResult result;
  annotate(result, sc);
  result.metadata.emplace_back("hypothesis", hyp == Hypothesis::G0 ? "G0" : "G1");
  result.metadata.emplace_back("form", asymptotic ? "asymptotic" : "exact");
  result.columns = {"i", "prob"};
  CountPmf pmf;
  if (hyp == Hypothesis::G0) {
    if (asymptotic) {
      pmf.probs = pmf_g0_asymptotic(sc.gamma, sc.n);
      pmf.hypothesis = Hypothesis::G0;
      pmf.provenance = Provenance::AsymptoticPoissonLike;
    } else {
      pmf = pmf_g0_exact(sc.n, sc.gamma);
    }
  } else if (asymptotic) {
    AsymptoticParams params = solve_vstar(sc.gamma, sc.alpha, sc.target());
    avg_detection_probs(params);
    pmf = pmf_g1_asymptotic(sc.n, params);
  } else {
    pmf = pmf_g1_exact(sc.n, sc.byzantines(), sc.gamma, sc.target(),
                       derive_seed(sc.seed, "pmf-g1", sc.alpha), sc.trials, sc.workers);
  }
  for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
    result.rows.push_back({static_cast<double>(i), pmf.probs[i]});
  }
  return result;
}

}  // namespace fdrdet
