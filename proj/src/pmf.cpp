#include "fdrdet/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fdrdet/bh.hpp"
#include "fdrdet/normal.hpp"
#include "fdrdet/parallel.hpp"

namespace fdrdet {

namespace {
double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (p >= 1.0) {
    out.back() = 1.0;
    return out;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (int i = 0; i <= n; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(log_binom(n, i) + i * lp + (n - i) * lq);
  }
  return out;
}

double honest_cdf(double v, double phi) {  // F_H(v) = Q(Q^{-1}(v) - phi)
  return gauss_upper_tail(gauss_upper_tail_inv(v) - phi);
}

double byzantine_cdf(double v, double phi) {  // F_B(v) = 1 - Q(Q^{-1}(1-v) - phi)
  return 1.0 - gauss_upper_tail(gauss_upper_tail_inv(1.0 - v) - phi);
}
}  // namespace

double CountPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) m += static_cast<double>(i) * probs[i];
  return m;
}

double CountPmf::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = static_cast<double>(i) - m;
    v += d * d * probs[i];
  }
  return v;
}

double CountPmf::tail_above(int t) const {
  double s = 0.0;
  for (int i = std::max(t + 1, 0); i <= max_count(); ++i) s += probs[static_cast<std::size_t>(i)];
  return s;
}

std::vector<double> CountPmf::cdf() const {
  std::vector<double> c(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    c[i] = acc;
  }
  return c;
}

std::string CountPmf::to_csv() const {
  std::string out = "i,prob\n";
  char buf[64];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6g\n", i, probs[i]);
    out += buf;
  }
  return out;
}

CountPmf pmf_g0_exact(int n, double gamma) {
  if (n < 1) throw std::invalid_argument("pmf_g0_exact: n must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("pmf_g0_exact: gamma must lie in (0,1)");
  }
  CountPmf pmf;
  pmf.hypothesis = Hypothesis::G0;
  pmf.provenance = Provenance::Exact;
  pmf.probs.resize(static_cast<std::size_t>(n) + 1);
  pmf.probs[0] = 1.0 - gamma;  // 0^0 = 1 convention
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) * gamma / n;
    pmf.probs[static_cast<std::size_t>(i)] =
        std::exp(log_binom(n, i) + std::log1p(-gamma) + i * std::log(t) +
                 (n - i - 1) * std::log1p(-t));
  }
  pmf.probs[static_cast<std::size_t>(n)] = std::pow(gamma, n);
  return pmf;
}

std::vector<double> pmf_g0_asymptotic(double gamma, int i_max) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("pmf_g0_asymptotic: gamma must lie in (0,1)");
  }
  if (i_max < 0) throw std::invalid_argument("pmf_g0_asymptotic: i_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(i_max) + 1);
  out[0] = 1.0 - gamma;
  for (int i = 1; i <= i_max; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::exp(i * std::log(static_cast<double>(i)) - std::lgamma(i + 1.0) +
                 std::log1p(-gamma) + i * std::log(gamma) - i * gamma);
  }
  return out;
}

double marginal_p_pdf_g1(double u, const TargetModel& target) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("marginal_p_pdf_g1: u must lie in (0,1)");
  }
  target.validate();
  const double w = target.in_disc_fraction();
  if (w == 0.0 || target.signal_power == 0.0) return 1.0;
  const double phi = std::sqrt(target.signal_power);
  return w * std::exp(-0.5 * target.signal_power + phi * gauss_upper_tail_inv(u)) + (1.0 - w);
}

CountPmf pmf_g1_exact(int n, int m, double gamma, const TargetModel& target,
                      std::uint64_t seed, std::int64_t samples, int workers) {
  if (n < 1) throw std::invalid_argument("pmf_g1_exact: n must be >= 1");
  if (m < 0 || m > n) throw std::invalid_argument("pmf_g1_exact: m must lie in [0,n]");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("pmf_g1_exact: gamma must lie in (0,1)");
  }
  if (samples < 1) throw std::invalid_argument("pmf_g1_exact: samples must be >= 1");
  target.validate();

  const double w = target.in_disc_fraction();
  const double phi = std::sqrt(target.signal_power);
  const auto nu = static_cast<std::size_t>(n);

  std::vector<std::vector<std::int64_t>> hist(
      static_cast<std::size_t>(std::max(workers, 1)), std::vector<std::int64_t>(nu + 1, 0));

  parallel_for(samples, workers, [&](std::int64_t begin, std::int64_t end, int worker) {
    std::vector<double> q(nu);
    std::vector<char> byz(nu);
    std::vector<int> idx(nu);
    std::vector<double> scratch;
    auto& h = hist[static_cast<std::size_t>(worker)];
    for (std::int64_t s = begin; s < end; ++s) {
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(s), "pmf-g1-mc");
      // Uniform-random Byzantine subset of size m.
      std::fill(byz.begin(), byz.end(), 0);
      for (std::size_t i = 0; i < nu; ++i) idx[i] = static_cast<int>(i);
      for (int k = 0; k < m; ++k) {
        const auto j = k + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - k)));
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
        byz[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = 1;
      }
      for (std::size_t i = 0; i < nu; ++i) {
        // Marginal q-value draw: with probability d0^2/R^2 the sensor sees the
        // signal (p = Q(z + phi)); otherwise its p-value is uniform.
        double p;
        if (rng.uniform() < w) {
          p = gauss_upper_tail(rng.normal() + phi);
        } else {
          p = rng.uniform();
        }
        q[i] = byz[i] ? 1.0 - p : p;
      }
      h[static_cast<std::size_t>(bh_count_value(q, gamma, scratch))]++;
    }
  });

  CountPmf pmf;
  pmf.hypothesis = Hypothesis::G1;
  pmf.provenance = Provenance::MonteCarlo;
  pmf.probs.assign(nu + 1, 0.0);
  for (const auto& h : hist) {
    for (std::size_t i = 0; i <= nu; ++i) pmf.probs[i] += static_cast<double>(h[i]);
  }
  for (double& p : pmf.probs) p /= static_cast<double>(samples);
  return pmf;
}

AsymptoticParams solve_vstar(double gamma, double alpha, const TargetModel& target) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("solve_vstar: gamma must lie in (0,1)");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("solve_vstar: alpha must lie in [0,1]");
  }
  target.validate();
  const double w = target.in_disc_fraction();
  if (w == 0.0) {
    throw std::domain_error("solve_vstar: degenerate model, no sensor can see the signal (A0 = 1)");
  }

  AsymptoticParams params;
  params.null_fraction = 1.0 - w;
  params.slope = (1.0 / gamma - params.null_fraction) / w;
  params.amplitude = std::sqrt(target.signal_power);
  params.byzantine_fraction = alpha;
  params.v_star = 0.0;

  const double phi = params.amplitude;
  const double beta = params.slope;
  if (phi == 0.0) return params;  // F(v) = v < beta*v for beta > 1

  const auto excess = [&](double v) {
    return alpha * byzantine_cdf(v, phi) + (1.0 - alpha) * honest_cdf(v, phi) - beta * v;
  };

  // Largest sign change on a log grid, then bisection.
  constexpr int kGrid = 4096;
  const double lo = std::log(1e-15);
  const double hi = std::log(1.0 - 1e-12);
  double a = 0.0, b = 0.0;
  bool found = false;
  double prev_v = 0.0, prev_g = 0.0;
  for (int k = 0; k < kGrid; ++k) {
    const double v = std::exp(lo + (hi - lo) * k / (kGrid - 1));
    const double g = excess(v);
    if (k > 0 && prev_g > 0.0 && g <= 0.0) {
      a = prev_v;
      b = v;
      found = true;  // keep the last sign change
    }
    prev_v = v;
    prev_g = g;
  }
  if (!found) return params;

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (excess(mid) > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
    if (b - a <= 1e-17 * b) break;
  }
  params.v_star = 0.5 * (a + b);
  if (std::abs(excess(params.v_star)) > 1e-10) {
    throw std::runtime_error("solve_vstar: bisection failed to reach residual tolerance");
  }
  return params;
}

void avg_detection_probs(AsymptoticParams& params) {
  const double v = params.v_star;
  const double a0 = params.null_fraction;
  const double phi = params.amplitude;
  if (v <= 0.0) {
    params.pd_honest = 0.0;
    params.pd_byzantine = 0.0;
  } else {
    params.pd_honest = (1.0 - a0) * honest_cdf(v, phi) + a0 * v;
    params.pd_byzantine = (1.0 - a0) * byzantine_cdf(v, phi) + a0 * v;
  }
  params.pd_mean = params.byzantine_fraction * params.pd_byzantine +
                   (1.0 - params.byzantine_fraction) * params.pd_honest;
}

CountPmf pmf_g1_asymptotic(int n, const AsymptoticParams& params) {
  if (params.pd_mean < 0.0 || params.pd_mean > 1.0) {
    throw std::invalid_argument("pmf_g1_asymptotic: pd_mean must lie in [0,1]");
  }
  CountPmf pmf;
  pmf.hypothesis = Hypothesis::G1;
  pmf.provenance = Provenance::AsymptoticBinomial;
  pmf.probs = binomial_pmf(n, params.pd_mean);
  return pmf;
}

CountPmf pmf_g1_asymptotic_convolution(int n, int m, const AsymptoticParams& params) {
  if (m < 0 || m > n) {
    throw std::invalid_argument("pmf_g1_asymptotic_convolution: m must lie in [0,n]");
  }
  const std::vector<double> honest = binomial_pmf(n - m, params.pd_honest);
  const std::vector<double> byz = binomial_pmf(m, params.pd_byzantine);
  CountPmf pmf;
  pmf.hypothesis = Hypothesis::G1;
  pmf.provenance = Provenance::AsymptoticBinomial;
  pmf.probs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t k = 0; k < byz.size(); ++k) {
    for (std::size_t j = 0; j < honest.size(); ++j) pmf.probs[k + j] += byz[k] * honest[j];
  }
  return pmf;
}

double pmf_g1_gaussian(int n, double pd, double x) {
  if (!(pd > 0.0 && pd < 1.0)) {
    throw std::domain_error("pmf_g1_gaussian: degenerate variance, pd must lie in (0,1)");
  }
  const double var = n * pd * (1.0 - pd);
  const double d = x - n * pd;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

}  // namespace fdrdet
