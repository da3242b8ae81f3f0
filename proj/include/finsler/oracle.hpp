#pragma once

// Ground truth from the definitions, by central differences of
// F(x, y) = |y| phi(|x|, <x, y> / |y|). Nothing here touches the closed forms
// of the metric, spray or curvature modules.

#include <span>

#include "finsler/curvature.hpp"
#include "finsler/error.hpp"
#include "finsler/frame.hpp"
#include "finsler/metric_spec.hpp"

namespace finsler {

/// Steps are relative: a y-step is h * max(1, |y|), an x-step h * max(1, |x|).
/// Derivatives of F^2 (inside G) use h * inner_scale, derivatives of G use
/// h * outer_scale. Each level of Richardson extrapolation removes one more
/// even power of the step.
struct FDConfig {
  double h = 1e-4;
  int richardson = 2;
  /// Richardson levels of the differences of G; negative means `richardson`.
  int outer_richardson = -1;
  double inner_scale = 200.0;
  double outer_scale = 700.0;
  /// Steps are halved until every stencil point passes domain_check; below
  /// this the computation gives up with StencilError.
  double h_min = 1e-7;
};

/// The stencil could not be kept inside the admissible domain.
class StencilError : public DomainError {
 public:
  using DomainError::DomainError;
};

double ambient_F(const MetricSpec& spec, const Vector& x, const Vector& y);

/// g_ij = 1/2 (F^2)_{y^i y^j}.
Matrix fd_metric(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg = {});
/// G^i = 1/4 g^{il} ((F^2)_{x^k y^l} y^k - (F^2)_{x^l}).
Vector fd_spray(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg = {});
/// B^i_jkl = d^3 G^i / dy^j dy^k dy^l.
DenseTensor fd_berwald(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg = {});
/// R^i_j = 2 G^i_{x^j} - y^k G^i_{x^k y^j} + 2 G^k G^i_{y^k y^j} - G^i_{y^k} G^k_{y^j}.
Matrix fd_riemann(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg = {});

/// Largest |a - b| over the entries whose size is at least `dominant` times the
/// largest entry of b, divided by that largest entry. 0 when b vanishes and a
/// is below `floor`.
double relative_dominant_error(std::span<const double> a, std::span<const double> b, double dominant = 0.1,
                               double floor = 1e-12);

}  // namespace finsler
