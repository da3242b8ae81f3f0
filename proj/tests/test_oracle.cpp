#include <cmath>
#include <random>

#include "doctest.h"
#include "finsler/catalog.hpp"
#include "finsler/curvature.hpp"
#include "finsler/oracle.hpp"
#include "finsler/sampling.hpp"
#include "support.hpp"

using namespace finsler;
using finsler::testing::close;
using finsler::testing::frame_at;

namespace {

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> view(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

}  // namespace

TEST_CASE("ambient_F") {
  Vector x(3), y(3);
  x << 1, 0, 0;
  y << 0, 1, 0;
  CHECK(ambient_F(catalog_get("euclidean").spec, x, y) == 1.0);
  CHECK(close(ambient_F(catalog_get("example_6_2").spec, x, y), 1.0 / std::sqrt(5.0), 1e-15));

  std::mt19937_64 rng(3);
  const MetricSpec spec = catalog_get("example_6_5").spec;
  const RadialFrame f = frame_at(0.9, 0.3, 4);
  const Matrix O = finsler::testing::random_rotation(4, rng);
  CHECK(close(ambient_F(spec, O * f.x, O * f.y), ambient_F(spec, f.x, f.y), 1e-14));
  CHECK(close(ambient_F(catalog_get("euclidean").spec, f.x, f.y), f.y.norm(), 1e-15));
}

TEST_CASE("fd_spray") {
  const RadialFrame f = frame_at(1.1, 0.4);
  CHECK(fd_spray(catalog_get("euclidean").spec, f.x, f.y).norm() <= 1e-9);

  const CatalogEntry fam = catalog_get("berwald_family", {{"c2", "0.3*r"}});
  const RadialFrame g = frame_at(1.2, 0.5);
  const double P = -g.s / (g.r * g.r);
  const double Q = 0.15 * g.r * g.s * g.s + 0.5 / (g.r * g.r);
  const Vector expect = assemble_spray(P, Q, g);
  CHECK(relative_dominant_error(view(fd_spray(fam.spec, g.x, g.y)), view(expect)) <= 1e-5);

  const MetricSpec e61 = catalog_get("example_6_1").spec;
  CHECK(relative_dominant_error(view(fd_spray(e61, f.x, f.y)), view(spray_pq(e61, f).G)) <= 1e-5);
}

TEST_CASE("fd_berwald") {
  const RadialFrame f = frame_at(1.0, 0.3);
  CHECK(fd_berwald(catalog_get("euclidean").spec, f.x, f.y).max_abs() <= 1e-6);

  const CatalogEntry fam = catalog_get("berwald_family", {{"c2", "0.3*r"}});
  const RadialFrame g = frame_at(1.2, 0.5);
  const SprayData sp = spray_pq(fam.spec, g);
  CHECK(fd_berwald(fam.spec, g.x, g.y).max_abs() <= 1e-4 * std::max({1.0, std::abs(sp.p()), std::abs(sp.q())}));

  const MetricSpec e62 = catalog_get("example_6_2").spec;
  const DenseTensor closed = berwald_tensor(spray_pq(e62, f), f).B;
  CHECK(relative_dominant_error(fd_berwald(e62, f.x, f.y).data(), closed.data()) <= 1e-3);
}

TEST_CASE("fd_riemann") {
  const RadialFrame f = frame_at(1.0, 0.3);
  CHECK(fd_riemann(catalog_get("euclidean").spec, f.x, f.y).cwiseAbs().maxCoeff() <= 1e-6);

  const MetricSpec e62 = catalog_get("example_6_2").spec;
  const Matrix R = fd_riemann(e62, f.x, f.y);
  const Jet phi = phi_jet(e62, BasePoint{f.r, f.s});
  const double F = f.u * phi.value();
  const Matrix expect = -F * F * (Matrix::Identity(3, 3) - f.y * finsler_gradient(phi, f).transpose() / F);
  CHECK(relative_dominant_error(view(R), view(expect)) <= 1e-4);

  const MetricSpec e64 = catalog_get("example_6_4").spec;
  const RadialFrame g = frame_at(0.9, -0.2, 4);
  const Matrix closed = riemann_tensor(spray_pq(e64, g), g).R;
  // K = 0: compare on the scale of the individual terms of R
  const Matrix fd = fd_riemann(e64, g.x, g.y);
  const SprayData sp = spray_pq(e64, g);
  const double scale = g.u * g.u * std::max({1.0, sp.p() * sp.p(), std::abs(sp.q())});
  CHECK((fd - closed).cwiseAbs().maxCoeff() <= 1e-4 * scale);
}

TEST_CASE("closed-form Landsberg tensor against the oracle Berwald tensor") {
  for (const char* id : {"example_6_2", "example_6_5"}) {
    const CatalogEntry e = catalog_get(id);
    SampleOptions opts;
    opts.count = 3;
    opts.seed = 8;
    for (const RadialFrame& f : sample_frames(e.spec, e.range, opts).frames) {
      const CurvatureReport rep = curvature_report(e.spec, f);
      const DenseTensor fd = landsberg_from_berwald(rep.phi, f, fd_berwald(e.spec, f.x, f.y));
      const double scale =
          0.5 * f.u * rep.phi.value() * finsler_gradient(rep.phi, f).norm() * rep.berwald.B.max_abs();
      double worst = 0.0;
      for (std::size_t i = 0; i < fd.data().size(); ++i)
        worst = std::max(worst, std::abs(fd.data()[i] - rep.landsberg.L.data()[i]));
      CHECK(worst <= 1e-5 * scale);
    }
  }
}

TEST_CASE("stencils that cannot fit are reported") {
  const MetricSpec spec = catalog_get("example_6_1").spec;
  Vector x(3), y(3);
  x << 1, 0, 0;
  y << 1, 1e-6, 0;
  CHECK_THROWS_AS(fd_berwald(spec, x, y), StencilError);
}

TEST_CASE("relative_dominant_error") {
  const std::vector<double> a = {1.0, 0.5, 1e-9};
  const std::vector<double> b = {1.0, 0.5001, 0.0};
  CHECK(relative_dominant_error(a, b) == doctest::Approx(1e-4));
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  CHECK(relative_dominant_error(zero, zero) == 0.0);
  CHECK(relative_dominant_error(a, zero) == 1.0);
}
