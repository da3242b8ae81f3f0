#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "finsler/frame.hpp"
#include "finsler/metric_spec.hpp"

namespace finsler {

/// Sampling box: r in [r_lo, r_hi], s / r in [s_lo, s_hi].
struct SampleRange {
  double r_lo = 0.5;
  double r_hi = 2.0;
  double s_lo = -0.9;
  double s_hi = 0.9;
};

struct SampleOptions {
  int dim = 3;
  int count = 20;
  std::uint64_t seed = 1;
  double margin = kDefaultConeMargin;
  double u_lo = 0.5;
  double u_hi = 2.0;
};

struct SampledFrames {
  std::vector<RadialFrame> frames;
  int rejected = 0;  // draws that failed domain_check
};

/// Seeded frames inside the metric's admissible domain. x has a uniform
/// direction and |x| uniform in the r range; y is built from a uniform s / r
/// and a uniform direction orthogonal to x. Deterministic for a given seed.
SampledFrames sample_frames(const MetricSpec& spec, const SampleRange& range, const SampleOptions& opts);

/// A uniformly distributed unit vector.
template <class Rng>
Vector random_direction(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

}  // namespace finsler
