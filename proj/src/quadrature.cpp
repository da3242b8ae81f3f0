#include "finsler/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsler/error.hpp"

namespace finsler {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// 12-point Gauss-Legendre on [-1, 1], symmetric half.
constexpr std::array<double, 6> kNodes = {
    0.1252334085114689154724414, 0.3678314989981801937526915, 0.5873179542866174472967024,
    0.7699026741943046870368938, 0.9041172563704748566784659, 0.9815606342467192506905491};
constexpr std::array<double, 6> kWeights = {
    0.2491470458134027850005624, 0.2334925365383548087608499, 0.2031674267230659217490645,
    0.1600783285433462263346525, 0.1069393259953184309602547, 0.0471753363865118271946160};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureOptions opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  QuadratureResult out;
  if (a == b) return out;
  const double sign = b < a ? -1.0 : 1.0;
  if (b < a) std::swap(a, b);
  const double length = b - a;

  auto eval = [&](double t) {
    const double v = f(t);
    if (!std::isfinite(v))
      throw QuadratureError("integrand not finite at t = " + std::to_string(t));
    return v;
  };

  std::vector<Panel> stack;
  {
    const double m = 0.5 * (a + b);
    const double fa = eval(a), fm = eval(m), fb = eval(b);
    stack.push_back({a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb)});
  }
  int panels = 1;
  double total = 0.0, err = 0.0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double lm = 0.5 * (p.a + p.m), rm = 0.5 * (p.m + p.b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    const double local_tol = opts.tol * (p.b - p.a) / length;
    if (std::abs(delta) <= 15.0 * local_tol || p.b - p.a < 1e-14 * length) {
      total += left + right + delta / 15.0;
      err += std::abs(delta) / 15.0;
      continue;
    }
    if (++panels > opts.max_panels)
      throw QuadratureError("adaptive Simpson exhausted " + std::to_string(opts.max_panels) +
                            " panels on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "]; integrand nearly singular");
    stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right});
    stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left});
  }
  out.value = sign * total;
  out.error = err;
  out.subdivisions = panels;
  return out;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("panel count must be positive");
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    const double half = 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i)
      acc += kWeights[i] * (f(mid - half * kNodes[i]) + f(mid + half * kNodes[i]));
    total += acc * half;
  }
  return total;
}

}  // namespace finsler
