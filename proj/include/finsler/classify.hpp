#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finsler/curvature.hpp"
#include "finsler/metric_spec.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

enum class Verdict { Holds, Fails, Inconclusive };
const char* to_string(Verdict v);

struct PropertyVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double max_residual = 0.0;     // over all evaluated frames
  double max_interior = 0.0;     // over frames away from the cone boundary
  double threshold = 0.0;
  std::string note;
};

struct FrameResult {
  RadialFrame frame;
  double F = 0.0;
  double P = 0.0;
  double Q = 0.0;
  ResidualReport residual{};
  double K_mean = 0.0;
  double K_spread = 0.0;
  /// ((n - 1) R1 + (r^2 - s^2) R3) / ((n - 1) phi^2), i.e. Ric / ((n - 1) F^2)
  double K_ricci = 0.0;
  double K_ricci_other = 0.0;  // same r, another s
  bool positive_definite = true;
  bool near_boundary = false;
};

struct ClassifyOptions {
  SampleRange range;
  SampleOptions sampling{};
  double tol = 1e-7;
  int flags = 4;
  /// Curvature used by the cfc residuals; the flag-curvature mean when unset.
  std::optional<double> K;
  /// Frames with 1 - |s| / r below this count as near the boundary.
  double boundary_band = 0.05;
  int min_frames = 20;
};

struct Classification {
  PropertyVerdict berwald, landsberg, cfc, einstein;
  double K_estimate = 0.0;
  double K_spread = 0.0;  // max - min of every flag sample
  std::vector<FrameResult> frames;
  int rejected = 0;  // draws outside the domain
  int skipped = 0;   // frames that failed to evaluate
  std::vector<std::string> warnings;
};

Classification classify(const MetricSpec& spec, const ClassifyOptions& opts);

}  // namespace finsler
