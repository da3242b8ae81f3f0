#pragma once

#include "finsler/frame.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric_spec.hpp"

namespace finsler {

/// Below |rho2| <= kRho2Degenerate * |rho| the closed-form inverse is skipped.
inline constexpr double kRho2Degenerate = 1e-12;

/// g_ij = rho delta_ij + rho0 x^i x^j + rho1 (x^i y^j + x^j y^i) / u + rho2 y^i y^j / u^2
/// and its inverse rho^{-1} (delta - tau x x - eta Y Y) with Y^i = y^i / u + lambda x^i.
struct MetricTensorData {
  double phi = 0.0;
  double rho = 0.0, rho0 = 0.0, rho1 = 0.0, rho2 = 0.0;
  /// False when rho2 is degenerate (Riemannian-like); the coefficients below
  /// are then NaN and g_inv is the direct inverse.
  bool analytic_inverse = false;
  double epsilon, delta, mu, tau, lambda, eta;
  /// 1 + (lambda + epsilon) s + lambda epsilon r^2. This is the pairing of
  /// Y^i with y^i / u + epsilon x^i, not |Y|^2.
  double Y2;
  Matrix g;
  Matrix g_inv;
  Matrix g_inv_direct;
  /// max |g_inv - g_inv_direct| / max |g_inv_direct|; 0 without the closed form.
  double inverse_mismatch = 0.0;
  bool positive_definite = false;
};

MetricTensorData metric_tensor(const Jet& phi, const RadialFrame& frame);
MetricTensorData metric_tensor(const MetricSpec& spec, const RadialFrame& frame);

/// F = u phi(r, s).
double finsler_norm(const MetricSpec& spec, const RadialFrame& frame);

/// G^i = u P y^i + u^2 Q x^i.
struct SprayData {
  Jet P;
  Jet Q;
  Vector G;

  double p() const { return P.value(); }
  double q() const { return Q.value(); }
};

/// Jets of Q and P (degree of phi minus two). Throws DomainError where
/// phi - s phi_s + (r^2 - s^2) phi_ss vanishes.
Jet spray_q(const Jet& phi);
Jet spray_p(const Jet& phi, const Jet& q);

SprayData spray_pq(const Jet& phi, const RadialFrame& frame);
SprayData spray_pq(const MetricSpec& spec, const RadialFrame& frame, int degree = kDefaultJetDegree);

Vector assemble_spray(double P, double Q, const RadialFrame& frame);

}  // namespace finsler
