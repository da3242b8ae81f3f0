#include "finsler/jet.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "finsler/error.hpp"

namespace finsler {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Jet::Jet(int degree, BasePoint base)
    : degree_(degree), base_(base), c_(static_cast<std::size_t>(size_for(degree)), 0.0) {
  if (degree < 0) throw std::invalid_argument("jet degree must be non-negative");
}

Jet Jet::constant(double value, int degree, BasePoint base) {
  Jet j(degree, base);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable_r(int degree, BasePoint base) {
  Jet j = constant(base.r, degree, base);
  if (degree >= 1) j.coeff(1, 0) = 1.0;
  return j;
}

Jet Jet::variable_s(int degree, BasePoint base) {
  Jet j = constant(base.s, degree, base);
  if (degree >= 1) j.coeff(0, 1) = 1.0;
  return j;
}

double Jet::partial(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) {
    throw std::out_of_range("jet partial (" + std::to_string(i) + "," + std::to_string(j) +
                            ") exceeds degree " + std::to_string(degree_));
  }
  return coeff(i, j) * factorial(i) * factorial(j);
}

Jet Jet::d_r() const {
  if (degree_ == 0) throw std::out_of_range("cannot differentiate a degree-0 jet");
  Jet out(degree_ - 1, base_);
  for (int k = 0; k <= out.degree_; ++k)
    for (int j = 0; j <= k; ++j) {
      const int i = k - j;
      out.coeff(i, j) = (i + 1) * coeff(i + 1, j);
    }
  return out;
}

Jet Jet::d_s() const {
  if (degree_ == 0) throw std::out_of_range("cannot differentiate a degree-0 jet");
  Jet out(degree_ - 1, base_);
  for (int k = 0; k <= out.degree_; ++k)
    for (int j = 0; j <= k; ++j) {
      const int i = k - j;
      out.coeff(i, j) = (j + 1) * coeff(i, j + 1);
    }
  return out;
}

Jet Jet::truncated(int degree) const {
  if (degree > degree_) throw std::out_of_range("cannot raise jet degree by truncation");
  Jet out(degree, base_);
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

Jet Jet::shifted_s(double ds) const {
  Jet out(degree_, BasePoint{base_.r, base_.s + ds});
  for (int i = 0; i <= degree_; ++i) {
    for (int j = 0; i + j <= degree_; ++j) {
      // sum_{m >= j} c(i, m) C(m, j) ds^{m-j}
      double acc = 0.0;
      double binom = 1.0;  // C(m, j) for m = j
      double p = 1.0;
      for (int m = j; i + m <= degree_; ++m) {
        acc += coeff(i, m) * binom * p;
        binom = binom * (m + 1) / (m + 1 - j);
        p *= ds;
      }
      out.coeff(i, j) = acc;
    }
  }
  return out;
}

double Jet::evaluate(double dr, double ds) const {
  double acc = 0.0;
  for (int i = 0; i <= degree_; ++i) {
    double row = 0.0;
    for (int j = degree_ - i; j >= 0; --j) row = row * ds + coeff(i, j);
    acc += row * std::pow(dr, i);
  }
  return acc;
}

Jet Jet::compose(std::span<const double> taylor) const {
  if (static_cast<int>(taylor.size()) < degree_ + 1)
    throw std::invalid_argument("compose: not enough Taylor coefficients");
  Jet h = *this;
  h.c_[0] = 0.0;
  Jet out = constant(taylor[static_cast<std::size_t>(degree_)], degree_, base_);
  for (int k = degree_ - 1; k >= 0; --k) {
    out = out * h;
    out.c_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return out;
}

void Jet::check_compatible(const Jet& o) const {
  if (!(base_ == o.base_)) throw std::invalid_argument("jets at different base points");
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& v : out.c_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  check_compatible(o);
  if (o.degree_ < degree_) *this = truncated(o.degree_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_compatible(o);
  if (o.degree_ < degree_) *this = truncated(o.degree_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  const int d = std::min(a.degree_, b.degree_);
  Jet out(d, a.base_);
  for (int i1 = 0; i1 <= d; ++i1)
    for (int j1 = 0; i1 + j1 <= d; ++j1) {
      const double av = a.coeff(i1, j1);
      if (av == 0.0) continue;
      for (int i2 = 0; i1 + j1 + i2 <= d; ++i2)
        for (int j2 = 0; i1 + j1 + i2 + j2 <= d; ++j2)
          out.coeff(i1 + i2, j1 + j2) += av * b.coeff(i2, j2);
    }
  return out;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet operator/(double a, const Jet& b) { return reciprocal(b) * a; }

Jet& Jet::operator+=(double v) {
  c_[0] += v;
  return *this;
}

Jet& Jet::operator-=(double v) {
  c_[0] -= v;
  return *this;
}

Jet& Jet::operator*=(double v) {
  for (double& x : c_) x *= v;
  return *this;
}

Jet& Jet::operator/=(double v) {
  if (v == 0.0) throw DomainError("division by zero constant");
  for (double& x : c_) x /= v;
  return *this;
}

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0))
    throw DomainError("division by a jet with zero constant term");
  std::vector<double> t(static_cast<std::size_t>(a.degree() + 1));
  double p = 1.0 / a0;
  for (int k = 0; k <= a.degree(); ++k) {
    t[static_cast<std::size_t>(k)] = (k % 2 == 0 ? p : -p);
    p /= a0;
  }
  return a.compose(t);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0))
    throw DomainError("square root of non-positive value " + describe(a.value()));
  return pow(a, 0.5);
}

Jet exp(const Jet& a) {
  std::vector<double> t(static_cast<std::size_t>(a.degree() + 1));
  const double e = std::exp(a.value());
  if (!std::isfinite(e)) throw DomainError("exponential overflow");
  double f = 1.0;
  for (int k = 0; k <= a.degree(); ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = e / f;
  }
  return a.compose(t);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("logarithm of non-positive value " + describe(a0));
  std::vector<double> t(static_cast<std::size_t>(a.degree() + 1));
  t[0] = std::log(a0);
  double p = 1.0;
  for (int k = 1; k <= a.degree(); ++k) {
    p /= a0;
    t[static_cast<std::size_t>(k)] = (k % 2 == 1 ? p : -p) / k;
  }
  return a.compose(t);
}

Jet pow(const Jet& a, double p) {
  if (p == std::floor(p) && std::abs(p) <= 64.0) {
    const int n = static_cast<int>(std::abs(p));
    Jet result = Jet::constant(1.0, a.degree(), a.base());
    Jet base = a;
    int e = n;
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return p < 0 ? reciprocal(result) : result;
  }
  const double a0 = a.value();
  if (!(a0 > 0.0))
    throw DomainError("non-integer power of non-positive value " + describe(a0));
  std::vector<double> t(static_cast<std::size_t>(a.degree() + 1));
  // binom(p, k) a0^{p-k}
  double binom = 1.0;
  for (int k = 0; k <= a.degree(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    t[static_cast<std::size_t>(k)] = binom * std::pow(a0, p - k);
  }
  return a.compose(t);
}

}  // namespace finsler
