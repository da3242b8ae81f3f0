#include "finsler/sampling.hpp"

#include <cmath>
#include <random>

#include "finsler/error.hpp"

namespace finsler {

SampledFrames sample_frames(const MetricSpec& spec, const SampleRange& range, const SampleOptions& opts) {
  if (opts.dim < 2) throw ConfigError("dimension must be at least 2");
  if (opts.count < 0) throw ConfigError("frame count must be non-negative");
  if (!(range.r_lo > 0.0) || range.r_hi < range.r_lo || range.s_hi < range.s_lo ||
      range.s_lo <= -1.0 || range.s_hi >= 1.0)
    throw ConfigError("invalid sampling range");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ur(range.r_lo, range.r_hi);
  std::uniform_real_distribution<double> ut(range.s_lo, range.s_hi);
  std::uniform_real_distribution<double> uu(opts.u_lo, opts.u_hi);
  SampledFrames out;
  const int budget = 50 * std::max(opts.count, 1) + 100;
  int draws = 0;
  while (static_cast<int>(out.frames.size()) < opts.count) {
    if (++draws > budget)
      throw DomainError("could not sample " + std::to_string(opts.count) +
                        " valid frames; the sampling range barely meets the domain");
    const Vector dir = random_direction(opts.dim, rng);
    const double r = ur(rng);
    const double t = ut(rng);
    const double u = uu(rng);
    Vector w = random_direction(opts.dim, rng);
    w -= w.dot(dir) * dir;
    if (w.norm() < 1e-8) {
      ++out.rejected;
      continue;
    }
    w /= w.norm();
    const Vector x = r * dir;
    const Vector y = u * (t * dir + std::sqrt(1.0 - t * t) * w);
    const RadialFrame f = frame_from_ambient(x, y);
    if (!domain_check(spec, f, opts.margin)) {
      ++out.rejected;
      continue;
    }
    out.frames.push_back(f);
  }
  return out;
}

}  // namespace finsler
