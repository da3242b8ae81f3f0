#include "finsler/metric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "finsler/error.hpp"

namespace finsler {

MetricTensorData metric_tensor(const Jet& phi, const RadialFrame& f) {
  if (phi.degree() < 2) throw std::invalid_argument("metric_tensor needs a phi jet of degree >= 2");
  const double p = phi.value();
  const double ps = phi.partial(0, 1);
  const double pss = phi.partial(0, 2);
  const double s = f.s;
  const double r = f.r;

  MetricTensorData m;
  m.phi = p;
  m.rho = p * (p - s * ps);
  m.rho0 = ps * ps + p * pss;
  m.rho1 = (p - s * ps) * ps - s * p * pss;
  m.rho2 = s * s * p * pss - s * (p - s * ps) * ps;

  const int n = f.dim();
  const Vector yu = f.y / f.u;
  m.g = m.rho * Matrix::Identity(n, n) + m.rho0 * f.x * f.x.transpose() +
        m.rho1 * (f.x * yu.transpose() + yu * f.x.transpose()) + m.rho2 * yu * yu.transpose();
  m.g = 0.5 * (m.g + m.g.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.g, Eigen::EigenvaluesOnly);
  m.positive_definite = eig.eigenvalues().minCoeff() > 0.0;
  if (m.positive_definite) {
    m.g_inv_direct = m.g.llt().solve(Matrix::Identity(n, n));
  } else {
    m.g_inv_direct = m.g.fullPivLu().inverse();
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  m.epsilon = m.delta = m.mu = m.tau = m.lambda = m.eta = m.Y2 = nan;
  m.analytic_inverse = std::abs(m.rho2) > kRho2Degenerate * std::abs(m.rho);
  if (!m.analytic_inverse) {
    m.g_inv = m.g_inv_direct;
    return m;
  }
  m.epsilon = m.rho1 / m.rho2;
  m.delta = (m.rho0 - m.epsilon * m.epsilon * m.rho2) / m.rho;
  m.mu = m.rho2 / m.rho;
  m.tau = m.delta / (1.0 + m.delta * r * r);
  m.lambda = (m.epsilon - m.delta * s) / (1.0 + m.delta * r * r);
  m.Y2 = 1.0 + (m.lambda + m.epsilon) * s + m.lambda * m.epsilon * r * r;
  m.eta = m.mu / (1.0 + m.Y2 * m.mu);
  const Vector Y = yu + m.lambda * f.x;
  m.g_inv = (Matrix::Identity(n, n) - m.tau * f.x * f.x.transpose() - m.eta * Y * Y.transpose()) / m.rho;
  const double scale = m.g_inv_direct.cwiseAbs().maxCoeff();
  m.inverse_mismatch = (m.g_inv - m.g_inv_direct).cwiseAbs().maxCoeff() / scale;
  return m;
}

MetricTensorData metric_tensor(const MetricSpec& spec, const RadialFrame& frame) {
  return metric_tensor(phi_jet(spec, BasePoint{frame.r, frame.s}, 2), frame);
}

double finsler_norm(const MetricSpec& spec, const RadialFrame& frame) {
  return frame.u * phi_value(spec, frame.r, frame.s);
}

Jet spray_q(const Jet& phi) {
  if (phi.degree() < 2) throw std::invalid_argument("spray needs a phi jet of degree >= 2");
  const int d = phi.degree() - 2;
  const BasePoint b = phi.base();
  const Jet r = Jet::variable_r(d, b);
  const Jet s = Jet::variable_s(d, b);
  const Jet p = phi.truncated(d);
  const Jet pr = phi.d_r().truncated(d);
  const Jet ps = phi.d_s().truncated(d);
  const Jet prs = phi.d_r().d_s();
  const Jet pss = phi.d_s().d_s();
  const Jet den = p - s * ps + (r * r - s * s) * pss;
  if (!(std::abs(den.value()) > 1e-12 * std::max(1.0, std::abs(p.value())))) {
    std::ostringstream os;
    os.precision(17);
    os << "strong convexity fails at (r, s) = (" << b.r << ", " << b.s
       << "): phi - s phi_s + (r^2 - s^2) phi_ss = " << den.value();
    throw DomainError(os.str());
  }
  return (-pr + s * prs + r * pss) / (2.0 * r * den);
}

Jet spray_p(const Jet& phi, const Jet& q) {
  const int d = q.degree();
  const BasePoint b = phi.base();
  const Jet r = Jet::variable_r(d, b);
  const Jet s = Jet::variable_s(d, b);
  const Jet p = phi.truncated(d);
  const Jet pr = phi.d_r().truncated(d);
  const Jet ps = phi.d_s().truncated(d);
  return -(s * p + (r * r - s * s) * ps) * q / p + (s * pr + r * ps) / (2.0 * r * p);
}

Vector assemble_spray(double P, double Q, const RadialFrame& f) {
  return f.u * P * f.y + f.u * f.u * Q * f.x;
}

SprayData spray_pq(const Jet& phi, const RadialFrame& frame) {
  SprayData out;
  out.Q = spray_q(phi);
  out.P = spray_p(phi, out.Q);
  out.G = assemble_spray(out.P.value(), out.Q.value(), frame);
  return out;
}

SprayData spray_pq(const MetricSpec& spec, const RadialFrame& frame, int degree) {
  return spray_pq(phi_jet(spec, BasePoint{frame.r, frame.s}, degree), frame);
}

}  // namespace finsler
