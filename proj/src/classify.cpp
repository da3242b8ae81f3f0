#include "finsler/classify.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    default: return "inconclusive";
  }
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double ricci_curvature(const RiemannData& R, const RadialFrame& f, double phi) {
  const int n = f.dim();
  return ((n - 1) * R.R1 + (f.r * f.r - f.s * f.s) * R.R3) / ((n - 1) * phi * phi);
}

template <class Residual>
PropertyVerdict decide(const std::vector<FrameResult>& frames, double tol, int min_frames, Residual residual) {
  PropertyVerdict v;
  v.threshold = tol;
  bool interior_fail = false, boundary_fail = false;
  for (const FrameResult& fr : frames) {
    const double r = residual(fr);
    v.max_residual = std::max(v.max_residual, r);
    if (!fr.near_boundary) v.max_interior = std::max(v.max_interior, r);
    if (r > tol) (fr.near_boundary ? boundary_fail : interior_fail) = true;
  }
  if (interior_fail) {
    v.verdict = Verdict::Fails;
  } else if (boundary_fail) {
    v.verdict = Verdict::Inconclusive;
    v.note = "residual above threshold only near the domain boundary";
  } else if (static_cast<int>(frames.size()) < min_frames) {
    v.verdict = Verdict::Inconclusive;
    v.note = "only " + std::to_string(frames.size()) + " frames evaluated";
  } else {
    v.verdict = Verdict::Holds;
  }
  return v;
}

}  // namespace

Classification classify(const MetricSpec& spec, const ClassifyOptions& opts) {
  Classification out;
  if (opts.sampling.dim == 2) out.warnings.push_back("n = 2: the characterizations assume n >= 3");
  const SampledFrames sampled = sample_frames(spec, opts.range, opts.sampling);
  out.rejected = sampled.rejected;

  CurvatureOptions copts;
  copts.flags = opts.flags;
  copts.seed = opts.sampling.seed;
  double kmin = INFINITY, kmax = -INFINITY, ksum = 0.0;
  int kcount = 0;
  std::vector<CurvatureReport> reports;
  int no_flag = 0;
  for (const RadialFrame& f : sampled.frames) {
    CurvatureReport rep;
    try {
      rep.frame = f;
      rep.phi = phi_jet(spec, BasePoint{f.r, f.s}, copts.degree);
      rep.metric = metric_tensor(rep.phi, f);
      rep.spray = spray_pq(rep.phi, f);
      rep.riemann = riemann_tensor(rep.spray, f);
    } catch (const DomainError& e) {
      ++out.skipped;
      if (out.skipped == 1) out.warnings.push_back(std::string("skipped frame: ") + e.what());
      continue;
    }
    try {
      rep.flag = flag_curvature(rep.metric, rep.riemann, f, copts.flags, copts.seed);
    } catch (const DomainError& e) {
      // Berwald and Landsberg residuals do not need flags
      if (++no_flag == 1) out.warnings.push_back(std::string("no flag curvature at some frames: ") + e.what());
      rep.flag = FlagCurvature{};
      rep.flag.mean = NAN;
    }
    reports.push_back(std::move(rep));
    for (double k : reports.back().flag.samples) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
      ksum += k;
      ++kcount;
    }
  }
  out.K_estimate = kcount ? ksum / kcount : 0.0;
  out.K_spread = kcount ? kmax - kmin : 0.0;
  const double K = opts.K.value_or(out.K_estimate);

  int indefinite = 0;
  for (CurvatureReport& rep : reports) {
    const RadialFrame& f = rep.frame;
    FrameResult fr;
    fr.frame = f;
    fr.F = f.u * rep.phi.value();
    fr.P = rep.spray.p();
    fr.Q = rep.spray.q();
    fr.residual = residuals(rep.phi, rep.spray, f, K);
    fr.K_mean = rep.flag.mean;
    fr.K_spread = rep.flag.spread;
    fr.K_ricci = ricci_curvature(rep.riemann, f, rep.phi.value());
    // the Einstein factor may depend on r only; compare with another s
    const double s2 = std::abs(f.s) > 0.25 * f.r ? -0.5 * f.s : f.s + 0.3 * f.r;
    try {
      const RadialFrame g = [&] {
        RadialFrame h = f;
        h.s = s2;
        return h;
      }();
      if (!domain_check(spec, g)) throw DomainError("comparison point outside the domain");
      const Jet phi2 = phi_jet(spec, BasePoint{f.r, s2});
      fr.K_ricci_other = ricci_curvature(riemann_tensor(spray_pq(phi2, g), g), g, phi2.value());
    } catch (const DomainError&) {
      fr.K_ricci_other = fr.K_ricci;
    }
    fr.positive_definite = rep.metric.positive_definite;
    if (!fr.positive_definite) ++indefinite;
    fr.near_boundary = 1.0 - std::abs(f.s) / f.r < opts.boundary_band;
    out.frames.push_back(fr);
  }
  if (indefinite > 0)
    out.warnings.push_back("metric tensor not positive definite at " + std::to_string(indefinite) +
                           " frame(s); not a Finsler metric there");

  out.berwald = decide(out.frames, opts.tol, opts.min_frames,
                       [](const FrameResult& fr) { return max_abs(fr.residual.berwald); });
  out.landsberg = decide(out.frames, opts.tol, opts.min_frames,
                         [](const FrameResult& fr) { return max_abs(fr.residual.landsberg); });
  out.cfc = decide(out.frames, opts.tol, opts.min_frames, [](const FrameResult& fr) {
    return std::isnan(fr.K_mean) ? INFINITY : std::max(max_abs(fr.residual.cfc), fr.K_spread);
  });
  out.einstein = decide(out.frames, opts.tol, opts.min_frames, [&](const FrameResult& fr) {
    const double d = std::abs(fr.K_ricci - fr.K_ricci_other);
    return opts.K ? std::max(d, std::abs(fr.residual.einstein)) : d;
  });
  return out;
}

}  // namespace finsler
