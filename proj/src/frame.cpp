#include "finsler/frame.hpp"

#include <algorithm>
#include <stdexcept>

#include "finsler/error.hpp"

namespace finsler {

RadialFrame frame_from_ambient(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y have different dimensions");
  if (x.size() < 2) throw std::invalid_argument("dimension must be at least 2");
  RadialFrame f;
  f.x = x;
  f.y = y;
  f.r = x.norm();
  f.u = y.norm();
  if (f.r == 0.0) throw DomainError("x is the origin");
  if (f.u == 0.0) throw DomainError("y is the zero vector");
  f.v = x.dot(y);
  // Cauchy-Schwarz can fail by an ulp.
  f.s = std::clamp(f.v / f.u, -f.r, f.r);
  return f;
}

}  // namespace finsler
