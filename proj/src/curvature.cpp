#include "finsler/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finsler/error.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

DenseTensor::DenseTensor(int n, int rank) : n_(n), rank_(rank) {
  std::size_t size = 1;
  for (int i = 0; i < rank; ++i) size *= static_cast<std::size_t>(n);
  data_.assign(size, 0.0);
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseTensor::symmetry_defect() const {
  const int n = n_;
  double worst = 0.0;
  if (rank_ == 3) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = (*this)(j, k, l);
          for (double w : {(*this)(k, j, l), (*this)(j, l, k), (*this)(l, k, j), (*this)(k, l, j), (*this)(l, j, k)})
            worst = std::max(worst, std::abs(v - w));
        }
  } else if (rank_ == 4) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const double v = (*this)(i, j, k, l);
            for (double w : {(*this)(i, k, j, l), (*this)(i, j, l, k), (*this)(i, l, k, j), (*this)(i, k, l, j),
                             (*this)(i, l, j, k)})
              worst = std::max(worst, std::abs(v - w));
          }
  }
  return worst;
}

SprayDerivatives spray_derivatives(const SprayData& spray) {
  const Jet& P = spray.P;
  const Jet& Q = spray.Q;
  if (P.degree() < 3 || Q.degree() < 3)
    throw std::invalid_argument("curvature needs spray jets of degree >= 3 (phi jet degree >= 5)");
  return {P.value(),       P.partial(1, 0), P.partial(0, 1), P.partial(1, 1), P.partial(0, 2), P.partial(0, 3),
          Q.value(),       Q.partial(1, 0), Q.partial(0, 1), Q.partial(1, 1), Q.partial(0, 2), Q.partial(0, 3)};
}

namespace {

// Sum over the three ways of singling out one of (j, k, l); `f(m, p, q)` gets
// the singled-out index first.
template <class F>
double sym3(int j, int k, int l, F f) {
  return f(j, k, l) + f(k, j, l) + f(l, j, k);
}

inline double kd(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

BerwaldData berwald_tensor(const SprayData& spray, const RadialFrame& f) {
  const SprayDerivatives d = spray_derivatives(spray);
  const double u = f.u, s = f.s;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double P0 = d.P, P1 = d.P_s, P2 = d.P_ss, P3 = d.P_sss;
  const double Q1 = d.Q_s, Q2 = d.Q_ss, Q3 = d.Q_sss;

  const double c_dxx = P2 / u;
  const double c_dd = (P0 - s * P1) / u;
  const double c_dxy = -s * P2 / u2;
  const double c_ydx = -s * P2 / u2;
  const double c_xdx = (Q1 - s * Q2) / u;
  const double c_yy = (s * s * P2 + s * P1 - P0) / u3;
  const double c_yyyy = (3 * P0 - s * s * s * P3 - 6 * s * s * P2 - 3 * s * P1) / u5;
  const double c_yyyx = (s * s * P3 + 3 * s * P2) / u4;
  const double c_yxxx = P3 / u2;
  const double c_yyxx = -(P2 + s * P3) / u3;
  const double c_xxyy = (s * s * Q3 + s * Q2 - Q1) / u3;
  const double c_xxxy = -s * Q3 / u2;
  const double c_xxxx = Q3 / u;
  const double c_xdy = (s * s * Q2 - s * Q1) / u2;
  const double c_xyyy = (3 * s * Q1 - 3 * s * s * Q2 - s * s * s * Q3) / u4;

  const Vector& x = f.x;
  const Vector& y = f.y;
  const int n = f.dim();
  BerwaldData out;
  out.B = DenseTensor(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double t = 0.0;
          t += c_dxx * sym3(j, k, l, [&](int m, int p, int q) { return kd(i, m) * x[p] * x[q]; });
          t += c_dd * sym3(j, k, l, [&](int m, int p, int q) { return kd(i, m) * kd(p, q); });
          t += c_dxy * sym3(j, k, l, [&](int m, int p, int q) { return kd(i, m) * (x[p] * y[q] + x[q] * y[p]); });
          t += c_ydx * y[i] * sym3(j, k, l, [&](int m, int p, int q) { return x[m] * kd(p, q); });
          t += c_xdx * x[i] * sym3(j, k, l, [&](int m, int p, int q) { return x[m] * kd(p, q); });
          t += c_yy * sym3(j, k, l, [&](int m, int p, int q) { return kd(i, m) * y[p] * y[q]; });
          t += c_yy * y[i] * sym3(j, k, l, [&](int m, int p, int q) { return y[m] * kd(p, q); });
          t += c_yyyy * y[i] * y[j] * y[k] * y[l];
          t += c_yyyx * y[i] * sym3(j, k, l, [&](int m, int p, int q) { return x[m] * y[p] * y[q]; });
          t += c_yxxx * y[i] * x[j] * x[k] * x[l];
          t += c_yyxx * y[i] * sym3(j, k, l, [&](int m, int p, int q) { return y[m] * x[p] * x[q]; });
          t += c_xxyy * x[i] * sym3(j, k, l, [&](int m, int p, int q) { return x[m] * y[p] * y[q]; });
          t += c_xxxy * x[i] * sym3(j, k, l, [&](int m, int p, int q) { return y[m] * x[p] * x[q]; });
          t += c_xxxx * x[i] * x[j] * x[k] * x[l];
          t += c_xdy * x[i] * sym3(j, k, l, [&](int m, int p, int q) { return y[m] * kd(p, q); });
          t += c_xyyy * x[i] * y[j] * y[k] * y[l];
          out.B(i, j, k, l) = t;
        }
  out.system = {s * P1 - P0, P2, s * Q2 - Q1, Q3};
  return out;
}

Vector finsler_gradient(const Jet& phi, const RadialFrame& f) {
  const double p = phi.value();
  const double ps = phi.partial(0, 1);
  return (p - f.s * ps) * f.y / f.u + ps * f.x;
}

LandsbergData landsberg_tensor(const Jet& phi, const SprayData& spray, const RadialFrame& f) {
  if (phi.degree() < 1) throw std::invalid_argument("landsberg_tensor needs phi_s");
  const SprayDerivatives d = spray_derivatives(spray);
  const double p = phi.value();
  const double ps = phi.partial(0, 1);
  const double r = f.r, s = f.s;
  const double eta = s * p + (r * r - s * s) * ps;

  LandsbergData out;
  out.L1 = 3 * ps * d.P_ss + p * d.P_sss + eta * d.Q_sss;
  out.L2 = -s * p * d.P_ss + ps * (d.P - s * d.P_s) + eta * (d.Q_s - s * d.Q_ss);
  out.L3 = -s * s * s * out.L1 + 3 * s * out.L2;
  out.L4 = -s * out.L2;
  out.L5 = -s * out.L1;
  out.L6 = s * s * out.L1 - out.L2;

  const Vector& x = f.x;
  const Vector y = f.y / f.u;
  const int n = f.dim();
  out.L = DenseTensor(n, 3);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double t = out.L1 * x[j] * x[k] * x[l];
        t += out.L2 * sym3(j, k, l, [&](int m, int a, int b) { return x[m] * kd(a, b); });
        t += out.L3 * y[j] * y[k] * y[l];
        t += out.L4 * sym3(j, k, l, [&](int m, int a, int b) { return y[m] * kd(a, b); });
        t += out.L5 * sym3(j, k, l, [&](int m, int a, int b) { return y[m] * x[a] * x[b]; });
        t += out.L6 * sym3(j, k, l, [&](int m, int a, int b) { return x[m] * y[a] * y[b]; });
        out.L(j, k, l) = -0.5 * p * t;
      }
  return out;
}

DenseTensor landsberg_from_berwald(const Jet& phi, const RadialFrame& f, const DenseTensor& B) {
  const int n = f.dim();
  const double F = f.u * phi.value();
  const Vector Fy = finsler_gradient(phi, f);
  DenseTensor L(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) L(j, k, l) += -0.5 * F * Fy[i] * B(i, j, k, l);
  return L;
}

RiemannData riemann_tensor(const SprayData& spray, const RadialFrame& f) {
  const SprayDerivatives d = spray_derivatives(spray);
  const double r = f.r, s = f.s, u = f.u;
  const double w = r * r - s * s;
  const double P = d.P, Pr = d.P_r, Ps = d.P_s, Prs = d.P_rs, Pss = d.P_ss;
  const double Q = d.Q, Qr = d.Q_r, Qs = d.Q_s, Qrs = d.Q_rs, Qss = d.Q_ss;

  RiemannData out;
  out.R1 = 2 * Q - s / r * Pr - Ps + 2 * w * Ps * Q + P * P + 2 * s * P * Q;
  out.R2 = Ps - s / r * Pr + s * s / r * Prs + s * Pss - 2 * Q + s * Qs - 2 * s * P * Ps - 4 * s * P * Q +
           4 * s * s * Ps * Q - P * P - 2 * s * w * Pss * Q + 3 * s * P * Ps + s * s * P * Qs + w * s * Ps * Qs -
           2 * r * r * Ps * Q;
  out.R3 = 2 / r * Qr - Qss - s / r * Qrs + 2 * w * Q * Qss + 4 * Q * Q - w * Qs * Qs - 2 * s * Q * Qs;
  out.R4 = -2 * s / r * Qr + s * s / r * Qrs + s * Qss - 2 * w * s * Q * Qss + w * s * Qs * Qs - 4 * s * Q * Q +
           2 * s * s * Q * Qs;
  out.R5 = 2 / r * Pr - s / r * Prs - Pss - Qs + 2 * P * Q - 2 * s * Ps * Q + 2 * w * Pss * Q - P * Ps -
           s * P * Qs - w * Ps * Qs;

  const int n = f.dim();
  const Vector yu = f.y / u;
  out.R = u * u *
          (out.R1 * Matrix::Identity(n, n) + out.R2 * yu * yu.transpose() + out.R3 * f.x * f.x.transpose() +
           out.R4 * f.x * yu.transpose() + out.R5 * yu * f.x.transpose());
  out.ric = u * u * ((n - 1) * out.R1 + w * out.R3);
  return out;
}

FlagCurvature flag_curvature(const MetricTensorData& metric, const RiemannData& riemann, const RadialFrame& f,
                             int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("flag_curvature needs at least one flag");
  const Matrix& g = metric.g;
  const Vector& y = f.y;
  const double gyy = y.dot(g * y);
  std::mt19937_64 rng(seed);
  FlagCurvature out;
  for (int t = 0; t < m; ++t) {
    Vector w = random_direction(f.dim(), rng);
    w -= (w.dot(g * y) / gyy) * y;
    const double gww = w.dot(g * w);
    if (!(gww > 1e-12 * w.squaredNorm() * g.norm())) throw DomainError("degenerate flag: transverse vector parallel to y");
    const double gyw = y.dot(g * w);
    const double num = w.dot(g * (riemann.R * w));
    out.samples.push_back(num / (gyy * gww - gyw * gyw));
  }
  const auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end());
  out.spread = *hi - *lo;
  double sum = 0.0;
  for (double k : out.samples) sum += k;
  out.mean = sum / m;
  return out;
}

ResidualReport residuals(const Jet& phi, const SprayData& spray, const RadialFrame& f, double K) {
  const SprayDerivatives d = spray_derivatives(spray);
  const double p = phi.value();
  const double r = f.r, s = f.s;
  const double w = r * r - s * s;

  ResidualReport out;
  const double bscale = std::max({1.0, std::abs(d.P), std::abs(d.Q)});
  out.berwald = {(s * d.P_s - d.P) / bscale, d.P_ss / bscale, (s * d.Q_ss - d.Q_s) / bscale, d.Q_sss / bscale};

  const double ps = phi.partial(0, 1);
  const double eta = s * p + w * ps;
  const double L1 = 3 * ps * d.P_ss + p * d.P_sss + eta * d.Q_sss;
  const double L2 = -s * p * d.P_ss + ps * (d.P - s * d.P_s) + eta * (d.Q_s - s * d.Q_ss);
  const double lscale = std::max(1.0, std::abs(p) * std::abs(d.P_ss));
  out.landsberg = {L1 / lscale, L2 / lscale};

  const RiemannData rd = riemann_tensor(spray, f);
  const double eq2 = d.P_r / (2 * r) - s / (2 * r) * d.P_rs - 0.5 * d.P_ss + d.P * d.Q - s * d.P_s * d.Q +
                     w * d.P_ss * d.Q;
  const double p2 = p * p;
  out.cfc = {(rd.R1 - K * p2) / p2, eq2 / p2, rd.R3 / p2};
  const int n = f.dim();
  out.einstein = ((n - 1) * rd.R1 + w * rd.R3 - (n - 1) * K * p2) / p2;
  return out;
}

CurvatureReport curvature_report(const MetricSpec& spec, const RadialFrame& frame, const CurvatureOptions& opts) {
  CurvatureReport rep;
  rep.frame = frame;
  rep.phi = phi_jet(spec, BasePoint{frame.r, frame.s}, opts.degree);
  rep.metric = metric_tensor(rep.phi, frame);
  rep.spray = spray_pq(rep.phi, frame);
  rep.berwald = berwald_tensor(rep.spray, frame);
  rep.landsberg = landsberg_tensor(rep.phi, rep.spray, frame);
  rep.riemann = riemann_tensor(rep.spray, frame);
  rep.flag = flag_curvature(rep.metric, rep.riemann, frame, opts.flags, opts.seed);
  rep.residual = residuals(rep.phi, rep.spray, frame, opts.K);
  return rep;
}

}  // namespace finsler
