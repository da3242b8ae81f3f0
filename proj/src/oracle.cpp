#include "finsler/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "finsler/error.hpp"

namespace finsler {

namespace {

// Richardson table over h, h/2, h/4, ... for an approximation whose error
// is a series in even powers of h.
template <class T, class Approx>
T richardson(Approx approx, double h, int levels) {
  std::vector<T> prev;
  for (int i = 0; i <= levels; ++i) {
    std::vector<T> cur;
    cur.push_back(approx(h / std::pow(2.0, i)));
    double factor = 4.0;
    for (int k = 1; k <= i; ++k, factor *= 4.0) cur.push_back((factor * cur[k - 1] - prev[k - 1]) / (factor - 1.0));
    prev = std::move(cur);
  }
  return prev.back();
}

double F2(const MetricSpec& spec, const Vector& x, const Vector& y) {
  const double F = ambient_F(spec, x, y);
  return F * F;
}

struct Steps {
  double inner_y, inner_x, outer_y, outer_x;
};

// Largest perturbation the nested stencils apply to x and y: the inner step
// times the Richardson base plus the outer step.
bool stencil_inside(const MetricSpec& spec, const Vector& x, const Vector& y, double dx, double dy) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i)
    for (double sign : {-1.0, 1.0}) {
      Vector xp = x, yp = y;
      yp[i] += sign * dy;
      if (!domain_check(spec, frame_from_ambient(x, yp), 0.0)) return false;
      xp[i] += sign * dx;
      if (!domain_check(spec, frame_from_ambient(xp, y), 0.0)) return false;
      if (!domain_check(spec, frame_from_ambient(xp, yp), 0.0)) return false;
    }
  // turning y toward x reaches the cone boundary first; along y is the
  // direction of the x-y mixed stencil
  const Vector xhat = x / x.norm();
  Vector w = y - y.dot(xhat) * xhat;
  // y must stay off the line through x, where s = +-r
  if (!(w.norm() > 2.0 * dy) || !(x.norm() * w.norm() / y.norm() > 2.0 * dx)) return false;
  w /= w.norm();
  for (double sign : {-1.0, 1.0}) {
    if (!domain_check(spec, frame_from_ambient(x, y + sign * dy * w), 0.0)) return false;
    if (!domain_check(spec, frame_from_ambient(x + sign * dx * y / y.norm(), y), 0.0)) return false;
  }
  return true;
}

Steps choose_steps(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg, bool outer) {
  if (!(cfg.h > 0.0) || cfg.richardson < 0) throw ConfigError("FDConfig needs h > 0 and richardson >= 0");
  const double sy = std::max(1.0, y.norm());
  const double sx = std::max(1.0, x.norm());
  double h = cfg.h;
  while (h >= cfg.h_min) {
    const Steps st{h * cfg.inner_scale * sy, h * cfg.inner_scale * sx, outer ? h * cfg.outer_scale * sy : 0.0,
             outer ? h * cfg.outer_scale * sx : 0.0};
    // a product stencil moves at most three coordinates, the inner one two
    const double dy = std::sqrt(3.0) * (st.inner_y + st.outer_y);
    const double dx = std::sqrt(3.0) * (st.inner_x + st.outer_x);
    if (stencil_inside(spec, x, y, dx, dy)) return st;
    h *= 0.5;
  }
  throw StencilError("finite-difference stencil does not fit inside the domain (step below h_min)");
}

int outer_levels(const FDConfig& cfg) { return cfg.outer_richardson < 0 ? cfg.richardson : cfg.outer_richardson; }

Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return e;
}

Matrix metric_at(const MetricSpec& spec, const Vector& x, const Vector& y, double hy, int levels) {
  const int n = static_cast<int>(y.size());
  auto approx = [&](double h) -> Matrix {
    Matrix g(n, n);
    const double f0 = F2(spec, x, y);
    for (int i = 0; i < n; ++i) {
      const Vector ei = h * unit(n, i);
      g(i, i) = (F2(spec, x, y + ei) - 2.0 * f0 + F2(spec, x, y - ei)) / (h * h);
      for (int j = 0; j < i; ++j) {
        const Vector ej = h * unit(n, j);
        g(i, j) = g(j, i) = (F2(spec, x, y + ei + ej) - F2(spec, x, y + ei - ej) - F2(spec, x, y - ei + ej) +
                             F2(spec, x, y - ei - ej)) /
                            (4.0 * h * h);
      }
    }
    return 0.5 * g;
  };
  return richardson<Matrix>(approx, hy, levels);
}

Vector spray_at(const MetricSpec& spec, const Vector& x, const Vector& y, const Steps& st, int levels) {
  const int n = static_cast<int>(y.size());
  const Matrix g = metric_at(spec, x, y, st.inner_y, levels);
  // (F^2)_{x^k y^l} y^k = d/dt d/dy^l F^2(x + t y, y) at t = 0
  const double ht = st.inner_x / y.norm();
  auto mixed = [&](double h) -> Vector {
    Vector m(n);
    const double t = h / st.inner_y * ht;
    for (int l = 0; l < n; ++l) {
      const Vector el = h * unit(n, l);
      m[l] = (F2(spec, x + t * y, y + el) - F2(spec, x + t * y, y - el) - F2(spec, x - t * y, y + el) +
              F2(spec, x - t * y, y - el)) /
             (4.0 * t * h);
    }
    return m;
  };
  auto grad_x = [&](double h) -> Vector {
    Vector d(n);
    for (int l = 0; l < n; ++l) {
      const Vector el = h * unit(n, l);
      d[l] = (F2(spec, x + el, y) - F2(spec, x - el, y)) / (2.0 * h);
    }
    return d;
  };
  const Vector a = richardson<Vector>(mixed, st.inner_y, levels);
  const Vector b = richardson<Vector>(grad_x, st.inner_x, levels);
  // indefinite metrics (the berwald family) still have a spray
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) throw DomainError("finite-difference metric is singular");
  return 0.25 * lu.solve(a - b);
}

}  // namespace

double ambient_F(const MetricSpec& spec, const Vector& x, const Vector& y) {
  const RadialFrame f = frame_from_ambient(x, y);
  return f.u * phi_value(spec, f.r, f.s);
}

Matrix fd_metric(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg) {
  const Steps st = choose_steps(spec, x, y, cfg, false);
  return metric_at(spec, x, y, st.inner_y, cfg.richardson);
}

Vector fd_spray(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg) {
  const Steps st = choose_steps(spec, x, y, cfg, false);
  return spray_at(spec, x, y, st, cfg.richardson);
}

DenseTensor fd_berwald(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg) {
  const Steps st = choose_steps(spec, x, y, cfg, true);
  const int n = static_cast<int>(y.size());
  auto G = [&](const Vector& yy) { return spray_at(spec, x, yy, st, cfg.richardson); };
  DenseTensor B(n, 4);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      for (int l = k; l < n; ++l) {
        // product of three central differences; repeated directions are fine
        auto approx = [&](double h) -> Vector {
          Vector acc = Vector::Zero(n);
          for (int a : {-1, 1})
            for (int b : {-1, 1})
              for (int c : {-1, 1}) {
                Vector yy = y;
                yy[j] += a * h;
                yy[k] += b * h;
                yy[l] += c * h;
                acc += (a * b * c) * G(yy);
              }
          return acc / (8.0 * h * h * h);
        };
        const Vector d = richardson<Vector>(approx, st.outer_y, outer_levels(cfg));
        const int idx[3] = {j, k, l};
        int p[3] = {0, 1, 2};
        do {
          for (int i = 0; i < n; ++i) B(i, idx[p[0]], idx[p[1]], idx[p[2]]) = d[i];
        } while (std::next_permutation(p, p + 3));
      }
  return B;
}

Matrix fd_riemann(const MetricSpec& spec, const Vector& x, const Vector& y, const FDConfig& cfg) {
  const Steps st = choose_steps(spec, x, y, cfg, true);
  const int n = static_cast<int>(y.size());
  auto G = [&](const Vector& xx, const Vector& yy) { return spray_at(spec, xx, yy, st, cfg.richardson); };
  const Vector G0 = G(x, y);

  auto jac = [&](bool in_x, double h) -> Matrix {
    Matrix J(n, n);  // J(i, j) = d G^i / d(x or y)^j
    for (int j = 0; j < n; ++j) {
      const Vector e = h * unit(n, j);
      J.col(j) = in_x ? (G(x + e, y) - G(x - e, y)) / (2 * h) : (G(x, y + e) - G(x, y - e)) / (2 * h);
    }
    return J;
  };
  const Matrix Gx = richardson<Matrix>([&](double h) { return jac(true, h); }, st.outer_x, outer_levels(cfg));
  const Matrix Gy = richardson<Matrix>([&](double h) { return jac(false, h); }, st.outer_y, outer_levels(cfg));

  // y^k G^i_{x^k y^j} = d/dt G^i_{y^j}(x + t y, y)
  const double ht = st.outer_x / y.norm();
  const Matrix Gxy_y = richardson<Matrix>(
      [&](double h) -> Matrix {
        const double t = h / st.outer_y * ht;
        Matrix M(n, n);
        for (int j = 0; j < n; ++j) {
          const Vector e = h * unit(n, j);
          M.col(j) = (G(x + t * y, y + e) - G(x + t * y, y - e) - G(x - t * y, y + e) + G(x - t * y, y - e)) /
                     (4.0 * t * h);
        }
        return M;
      },
      st.outer_y, outer_levels(cfg));

  // sum_k G^k G^i_{y^k y^j}: second derivative of G^i along G, then along e_j
  const Matrix GyyG = richardson<Matrix>(
      [&](double h) -> Matrix {
        const Vector d = h * G0 / std::max(G0.norm(), 1e-300);
        Matrix M(n, n);
        for (int j = 0; j < n; ++j) {
          const Vector e = h * unit(n, j);
          M.col(j) = (G(x, y + d + e) - G(x, y + d - e) - G(x, y - d + e) + G(x, y - d - e)) / (4.0 * h * h);
        }
        return M * G0.norm();
      },
      st.outer_y, outer_levels(cfg));

  return 2.0 * Gx - Gxy_y + 2.0 * GyyG - Gy * Gy;
}

double relative_dominant_error(std::span<const double> a, std::span<const double> b, double dominant,
                               double floor) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_dominant_error: size mismatch");
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (scale <= floor) {
    double worst = 0.0;
    for (double v : a) worst = std::max(worst, std::abs(v));
    return worst <= floor ? 0.0 : worst;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(b[i]) >= dominant * scale) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / scale;
}

}  // namespace finsler
