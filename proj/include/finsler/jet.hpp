#pragma once

// Truncated bivariate Taylor arithmetic in the reduced coordinates (r, s).
//
// A Jet of degree D at base point (r0, s0) stores the Taylor coefficients
//
//     c(i, j) = d^{i+j} f / dr^i ds^j (r0, s0) / (i! j!),   i + j <= D,
//
// densely, ordered by total degree. Every operation is exact truncation: the
// result holds the Taylor coefficients of the composite function up to the
// result degree. Operands of different degree combine at the smaller degree.

#include <span>
#include <vector>

namespace finsler {

struct BasePoint {
  double r = 0.0;
  double s = 0.0;
  friend bool operator==(const BasePoint&, const BasePoint&) = default;
};

class Jet {
 public:
  Jet() = default;
  /// Zero jet.
  Jet(int degree, BasePoint base);

  static Jet constant(double value, int degree, BasePoint base);
  /// The coordinate function r (value r0, dr = 1).
  static Jet variable_r(int degree, BasePoint base);
  /// The coordinate function s (value s0, ds = 1).
  static Jet variable_s(int degree, BasePoint base);

  static constexpr int size_for(int degree) { return (degree + 1) * (degree + 2) / 2; }
  static constexpr int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

  int degree() const { return degree_; }
  BasePoint base() const { return base_; }
  double value() const { return c_[0]; }

  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }
  std::span<const double> coefficients() const { return c_; }

  /// d^{i+j} f / dr^i ds^j at the base point. Requires i + j <= degree().
  double partial(int i, int j) const;

  /// Partial derivative jets; the degree drops by one.
  Jet d_r() const;
  Jet d_s() const;

  Jet truncated(int degree) const;

  /// Re-expand about (r0, s0 + ds). Exact for polynomials of degree <= D;
  /// otherwise the error is O(ds^{D+1}). Used only for tiny shifts.
  Jet shifted_s(double ds) const;

  /// Evaluate the Taylor polynomial at (r0 + dr, s0 + ds).
  double evaluate(double dr, double ds) const;

  /// f(a0 + h) = sum_k taylor[k] h^k where a0 = value() and h = *this - a0.
  /// `taylor` must have at least degree() + 1 entries.
  Jet compose(std::span<const double> taylor) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double v);
  Jet& operator-=(double v);
  Jet& operator*=(double v);
  Jet& operator/=(double v);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { return -b + a; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(Jet a, double b) { return a /= b; }
  friend Jet operator/(double a, const Jet& b);

 private:
  void check_compatible(const Jet& o) const;

  int degree_ = 0;
  BasePoint base_{};
  std::vector<double> c_ = std::vector<double>(1, 0.0);
};

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
/// a^p. Integer p uses repeated products and accepts any sign of the
/// constant term; other p require a positive constant term.
Jet pow(const Jet& a, double p);

}  // namespace finsler
