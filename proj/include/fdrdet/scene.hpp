#pragma once

#include <vector>

#include "fdrdet/rng.hpp"

namespace fdrdet {

enum class Hypothesis { G0, G1 };

/// Disc signal model: amplitude sqrt(P0) inside the radius of influence,
/// zero outside. The ROI is the disc of radius roi_radius.
struct TargetModel {
  double signal_power = 0.0;      // P0
  double influence_radius = 0.0;  // d0
  double roi_radius = 1.0;        // R

  void validate() const;
  /// Fraction of a uniformly deployed sensor population inside the disc.
  double in_disc_fraction() const {
    return (influence_radius / roi_radius) * (influence_radius / roi_radius);
  }
};

struct Deployment {
  std::vector<double> radii;  // radial distance of each sensor from the target
};

struct ObservationVector {
  std::vector<double> s;
  Hypothesis hypothesis = Hypothesis::G0;
};

struct PValueVector {
  std::vector<double> p;
};

struct ByzantineMask {
  std::vector<bool> flags;
  int count = 0;       // number of Byzantines, round(alpha * N)
  double alpha = 0.0;  // attacker fraction
};

/// Inverse CDF of the radial deployment density f_R(r) = 2r/R^2.
double deployment_radius_from_uniform(double u, double roi_radius);

Deployment sample_deployment(int n, double roi_radius, Rng& rng);

double signal_amplitude(double radius, const TargetModel& target, Hypothesis hyp);

ObservationVector observe(const std::vector<double>& amplitudes, Hypothesis hyp, Rng& rng);

/// Upper-tail p-value of an observation under the no-signal null.
double p_value(double s);

PValueVector p_values(const ObservationVector& obs);

/// Number of Byzantines for a fraction alpha of n sensors (round half up).
int byzantine_count(int n, double alpha);

ByzantineMask sample_byzantine_mask(int n, double alpha, Rng& rng);

/// Flip p -> 1-p on the Byzantine coordinates.
PValueVector apply_byzantine(const PValueVector& p, const ByzantineMask& mask);

}  // namespace fdrdet
