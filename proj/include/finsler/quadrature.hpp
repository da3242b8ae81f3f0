#pragma once

#include <functional>

namespace finsler {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int subdivisions = 0;
};

struct QuadratureOptions {
  double tol = 1e-10;
  int max_panels = 1 << 20;
};

/// Adaptive Simpson on [a, b] (b < a allowed; the sign follows). Throws
/// QuadratureError when the panel budget runs out before the local error
/// estimates drop below their share of `tol`.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureOptions opts = {});

/// Composite Gauss-Legendre with a fixed node set. No error control, but the
/// result is a smooth function of the endpoints and of any parameter inside
/// `f`, which adaptive rules are not; finite differences of such integrals
/// stay clean.
double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels = 4);

}  // namespace finsler
