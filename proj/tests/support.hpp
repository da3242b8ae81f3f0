#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "finsler/frame.hpp"
#include "finsler/sampling.hpp"

namespace finsler::testing {

inline bool close(double a, double b, double rtol, double atol = 1e-12) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

// An ambient pair with prescribed r = |x|, s = <x, y> / |y| and |y| = u.
inline RadialFrame frame_at(double r, double s, int n = 3, double u = 1.3, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  const Vector dir = random_direction(n, rng);
  Vector w = random_direction(n, rng);
  w -= w.dot(dir) * dir;
  w /= w.norm();
  const double t = s / r;
  return frame_from_ambient(r * dir, u * (t * dir + std::sqrt(1.0 - t * t) * w));
}

inline Matrix random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

}  // namespace finsler::testing
