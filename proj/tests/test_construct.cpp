#include <array>
#include <cmath>

#include "doctest.h"
#include "finsler/catalog.hpp"
#include "finsler/construct.hpp"
#include "finsler/error.hpp"
#include "finsler/metric_spec.hpp"
#include "support.hpp"

using namespace finsler;
using finsler::testing::close;

namespace {

double at(const Expr& e, double r, double s, double sigma = 1.0) {
  const std::array<double, 3> args{r, s, sigma};
  return e.evaluate(args);
}

Expr r_expr(const char* text) { return Expr::parse(text, r_symbols()); }
Expr rs_expr(const char* text) { return Expr::parse(text, rs_symbols()); }

Expr family_p(ThetaFamily fam, const char* g, double c) {
  return r_expr(g).rebind(rs_symbols()) * Expr::variable(1, rs_symbols()) + particular_p(fam, c);
}

ConstructConfig config(const char* text) { return parse_construct_config(nlohmann::json::parse(text)); }

}  // namespace

TEST_CASE("q_from_c1 reproduces the two families") {
  const Expr qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const Expr qb = q_from_c1(r_expr("-2"), 0.5, 2.0);
  for (double r : {0.6, 1.0, 1.7})
    for (double f : {-0.7, 0.0, 0.4}) {
      const double s = f * r;
      CHECK(close(at(qa, r, s), -(r * r - s * s) / (r * r * r), 1e-14));
      CHECK(close(at(qb, r, s), -2.0 + 8.0 * s * s / (1.0 + 4.0 * r * r), 1e-14));
    }
  double q0 = 1.0;
  CHECK(q_from_c1(r_expr("0"), 0.5, 2.0).is_constant(&q0));
  CHECK(q0 == 0.0);
}

TEST_CASE("q_from_c1 satisfies the third equation for any c1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.5, 2.0), uf(-0.9, 0.9);
  for (const char* c1 : {"-1/r", "-2", "-3/r", "-r", "-1/(1 + r^2)", "-exp(-r)"}) {
    const std::string name = c1;
    CAPTURE(name);
    const Expr Q = q_from_c1(r_expr(c1), 0.5, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double r = ur(rng);
      worst = std::max(worst, std::abs(q_residual(Q, r, uf(rng) * r)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("q_from_c1 rejects a vanishing denominator") {
  CHECK_THROWS_AS(q_from_c1(r_expr("1/(2*r^2)"), 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(q_from_c1(r_expr("1/2"), 0.5, 2.0), DomainError);
  CHECK_NOTHROW(q_from_c1(r_expr("1/2"), 1.5, 2.0));
}

TEST_CASE("family detection") {
  CHECK(detect_family(r_expr("-1/r")) == ThetaFamily::InverseR);
  CHECK(detect_family(r_expr("-r/r^2")) == ThetaFamily::InverseR);
  CHECK(detect_family(r_expr("-2")) == ThetaFamily::ConstantMinus2);
  CHECK(detect_family(r_expr("-3/r")) == ThetaFamily::None);
  CHECK(detect_family(r_expr("0")) == ThetaFamily::None);
}

TEST_CASE("closed-form Theta") {
  CHECK(close(at(theta_closed_form(ThetaFamily::InverseR, 2.0), 1.0, 0.5), 1.0, 1e-15));
  CHECK(close(at(theta_closed_form(ThetaFamily::ConstantMinus2, 1.0), 1.0, 0.0), 1.0, 1e-15));
  CHECK(close(at(theta_closed_form(ThetaFamily::InverseR, 2.0), 1.0, 0.5, -1.0), -1.0, 1e-15));

  const Expr qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const Expr qb = q_from_c1(r_expr("-2"), 0.5, 2.0);
  for (double r : {0.6, 1.1, 1.9})
    for (double f : {-0.8, -0.3, 0.2, 0.7}) {
      CHECK(std::abs(theta_residual(theta_closed_form(ThetaFamily::InverseR, 1.7), qa, r, f * r)) <= 1e-12);
      CHECK(std::abs(theta_residual(theta_closed_form(ThetaFamily::ConstantMinus2, 1.7), qb, r, f * r)) <= 1e-12);
    }
}

TEST_CASE("P - s P_s of the particular P is Theta") {
  for (ThetaFamily fam : {ThetaFamily::InverseR, ThetaFamily::ConstantMinus2}) {
    const Expr p = particular_p(fam, 1.3);
    const Expr theta = p - Expr::variable(1, rs_symbols()) * p.derivative("s");
    for (double r : {0.7, 1.4})
      for (double f : {-0.6, 0.1, 0.8}) CHECK(close(at(theta, r, f * r), at(theta_closed_form(fam, 1.3), r, f * r), 1e-13));
  }
}

TEST_CASE("characteristic Theta matches the closed form") {
  for (ThetaFamily fam : {ThetaFamily::InverseR, ThetaFamily::ConstantMinus2}) {
    const Expr Q = q_from_c1(r_expr(fam == ThetaFamily::InverseR ? "-1/r" : "-2"), 0.3, 3.0);
    const Expr exact = theta_closed_form(fam, 2.0);
    const CharacteristicTheta numeric(Q, exact, 1.0, 1.0);
    int compared = 0;
    for (double r = 0.55; r < 2.0 && compared < 30; r += 0.09)
      for (double f : {-0.7, -0.35, 0.0, 0.3, 0.6, 0.85}) {
        double v;
        try {
          v = numeric(r, f * r);
        } catch (const DomainError&) {
          continue;  // the characteristic leaves the cone before r0
        }
        CHECK(std::abs(v - at(exact, r, f * r)) <= 1e-6);
        ++compared;
      }
    CHECK(compared >= 30);
  }
}

TEST_CASE("characteristic Theta solves the equation off the known families") {
  const Expr Q = q_from_c1(r_expr("-3/r"), 0.5, 2.0);
  const CharacteristicTheta numeric(Q, rs_expr("1 + s^2"), 1.0, 1.0);
  for (double r : {0.7, 0.9})
    for (double f : {-0.5, 0.2, 0.5}) CHECK(std::abs(theta_residual(std::cref(numeric), Q, r, f * r)) <= 1e-7);
  CHECK_THROWS_AS(numeric(1.6, -0.9 * 1.6), DomainError);
}

TEST_CASE("P from Theta") {
  const Expr p61 = family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0);
  CHECK(close(at(p61, 1.0, 0.0), 2.0 * std::sqrt(5.0) / 5.0, 1e-15));
  const Expr p62 = family_p(ThetaFamily::InverseR, "-2*(3*r + 1)/(r*(2*r + 1)*(4*r + 1))", 1.0);
  CHECK(close(at(p62, 1.0, 0.0), std::sqrt(5.0) / 5.0, 1e-15));
  CHECK(at(family_p(ThetaFamily::InverseR, "0", 0.0), 1.2, 0.3) == 0.0);

  // the auto g reproduces the catalog g of the 6.2 parameters
  for (double r : {0.5, 1.0, 1.8}) {
    const std::array<double, 2> args{r, 1.0};
    CHECK(close(auto_g(ThetaFamily::InverseR, 1.0).evaluate(args), -2 * (3 * r + 1) / (r * (2 * r + 1) * (4 * r + 1)),
                1e-14));
    CHECK(close(auto_g(ThetaFamily::InverseR, 2.0).evaluate(args), -2 / (r + 4 * r * r), 1e-14));
    CHECK(auto_g(ThetaFamily::ConstantMinus2, 2.0).evaluate(args) == 0.0);
  }

  // numeric P differs from the closed form by a multiple of s only
  const Expr theta = theta_closed_form(ThetaFamily::InverseR, 2.0);
  auto th = [&](double r, double s) { return at(theta, r, s); };
  const Expr g = r_expr("0");
  for (double r : {0.8, 1.5}) {
    const double k1 = (p_numeric(th, g, r, 0.2 * r) - at(particular_p(ThetaFamily::InverseR, 2.0), r, 0.2 * r)) / (0.2 * r);
    const double k2 = (p_numeric(th, g, r, 0.7 * r) - at(particular_p(ThetaFamily::InverseR, 2.0), r, 0.7 * r)) / (0.7 * r);
    CHECK(close(k1, k2, 1e-8, 1e-9));
  }
  CHECK_THROWS_AS(p_numeric(th, g, 1.0, -0.2), DomainError);
}

TEST_CASE("U/W inversion") {
  const Expr Qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const UWData uw = uw_invert(family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0), Qa);
  CHECK(close(at(uw.U, 1.0, 0.0), 4.0 / (3.0 * std::sqrt(5.0)), 1e-14));

  // (ln phi)_s is the integrand of the closed form
  const Expr integrand = rs_expr(
      "(sigma*4*r*(r + 4*r^2 - 2*s^2) - 4*s*(1 + 2*r)*sqrt(r*(r + 4*r^2 - 4*s^2)))"
      "/((r + 4*r^2 - 4*s^2)*(sigma*2*r*s + (1 + 2*r)*sqrt(r*(r + 4*r^2 - 4*s^2))))");
  for (double sigma : {1.0, -1.0}) {
    const UWData u = uw_invert(family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0), Qa);
    for (int i = 0; i < 30; ++i) {
      const double r = 0.5 + 0.05 * i, s = r * (-0.85 + 0.057 * i);
      CHECK(close(at(u.dlnphi_ds, r, s, sigma), at(integrand, r, s, sigma), 1e-12));
    }
  }

  const Expr zero = rs_expr("0");
  const UWData flat = uw_invert(zero, zero);
  CHECK(at(flat.U, 1.3, 0.4) == doctest::Approx(0.4));
  CHECK(at(flat.W, 1.3, 0.4) == 0.0);
  CHECK(at(flat.dlnphi_ds, 1.3, 0.4) == 0.0);
}

TEST_CASE("integrability") {
  const std::vector<BasePoint> grid = ConstructGrid{}.points();
  const Expr Qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const Expr Qb = q_from_c1(r_expr("-2"), 0.5, 2.0);
  const UWData u61 = uw_invert(family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0), Qa);
  CHECK(integrability_check(u61.dlnphi_ds, u61.dlnphi_dr, grid, 1.0).pass);
  for (double sigma : {1.0, -1.0}) {
    const UWData u65 = uw_invert(family_p(ThetaFamily::ConstantMinus2, "-2/(1 + 4*r^2)", 1.0), Qb);
    CHECK(integrability_check(u65.dlnphi_ds, u65.dlnphi_dr, grid, sigma).pass);
  }
  const UWData off = uw_invert(family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 1.5), Qa);
  const IntegrabilityReport bad = integrability_check(off.dlnphi_ds, off.dlnphi_dr, grid, 1.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_defect > 1e-4);
}

TEST_CASE("phi_recover and c0") {
  const Expr Qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const Expr Qb = q_from_c1(r_expr("-2"), 0.5, 2.0);
  for (int sigma : {1, -1}) {
    const MetricSpec s61 = phi_recover(uw_invert(family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0), Qa), sigma);
    const MetricSpec s64 = phi_recover(uw_invert(family_p(ThetaFamily::ConstantMinus2, "0", 2.0), Qb), sigma);
    for (int i = 0; i < 20; ++i) {
      const double r = 0.5 + 0.075 * i;
      CHECK(close(log_c0_derivative(s61, r), 2 * (2 * r - 1) / ((2 * r + 1) * (4 * r + 1)), 1e-9));
      CHECK(close(log_c0_derivative(s64, r), 8 * r / (1 + 4 * r * r), 1e-9));
    }
    // c0 up to the normalization phi(1, 0) = 1
    const double c01 = 9.0 / (5.0 * std::sqrt(5.0));
    for (double r : {0.6, 1.4, 2.0})
      CHECK(close(phi_value(s61, r, 0.0), std::pow(2 * r + 1, 2) / std::pow(4 * r + 1, 1.5) / c01, 1e-9));
  }
  const Expr zero = rs_expr("0");
  const MetricSpec flat = phi_recover(uw_invert(zero, zero), 1, 1.0, 2.5);
  CHECK(phi_value(flat, 1.7, 0.3) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("classify_constructed") {
  const std::vector<BasePoint> grid = ConstructGrid{0.5, 2.0, 4, -0.8, 0.8, 4}.points();
  const Expr Qa = q_from_c1(r_expr("-1/r"), 0.5, 2.0);
  const Expr Qb = q_from_c1(r_expr("-2"), 0.5, 2.0);

  const Expr p61 = family_p(ThetaFamily::InverseR, "-2/(r + 4*r^2)", 2.0);
  const ConstructVerdict v61 = classify_constructed(phi_recover(uw_invert(p61, Qa), 1), p61, Qa, grid, 0.0);
  CHECK(v61.flat);
  CHECK(v61.K == 0.0);
  CHECK(v61.pass);
  CHECK_FALSE(v61.solved_phi2);

  for (int sigma : {1, -1}) {
    const Expr p62 = family_p(ThetaFamily::InverseR, "-2*(3*r + 1)/(r*(2*r + 1)*(4*r + 1))", 1.0);
    const ConstructVerdict v62 = classify_constructed(phi_recover(uw_invert(p62, Qa), sigma), p62, Qa, grid, -1.0);
    CHECK(v62.pass);
    CHECK(v62.spray_mismatch <= 1e-7);
    CHECK(v62.K < 0.0);
    REQUIRE(v62.solved_phi2);
    const MetricSpec listed = catalog_get("example_6_2", nlohmann::json::object(), sigma).spec;
    for (int i = 0; i < 30; ++i) {
      const double r = 0.5 + 0.05 * i, s = r * (-0.85 + 0.057 * i);
      const double phi = phi_value(listed, r, s);
      CHECK(close(at(*v62.solved_phi2, r, s, sigma), phi * phi, 1e-8));
    }

    const Expr p65 = family_p(ThetaFamily::ConstantMinus2, "-2/(1 + 4*r^2)", 1.0);
    const ConstructVerdict v65 = classify_constructed(phi_recover(uw_invert(p65, Qb), sigma), p65, Qb, grid, -1.0);
    CHECK(v65.pass);
    REQUIRE(v65.solved_phi2);
    const MetricSpec listed65 = catalog_get("example_6_5", nlohmann::json::object(), sigma).spec;
    for (int i = 0; i < 30; ++i) {
      const double r = 0.5 + 0.05 * i, s = r * (-0.85 + 0.057 * i);
      const double phi = phi_value(listed65, r, s);
      CHECK(close(at(*v65.solved_phi2, r, s, sigma), phi * phi, 1e-8));
    }
  }
}

TEST_CASE("pipeline reproduces the catalog metrics") {
  struct Case {
    const char* cfg;
    const char* id;
  };
  const Case cases[] = {
      {R"J({"c1": "-1/r", "g_free": "-2/(r + 4*r^2)", "c": 2, "branch": "+"})J", "example_6_1"},
      {R"J({"c1": "-1/r", "g_free": "auto", "c": 1, "branch": "-", "K_hypothesis": -1})J", "example_6_2"},
      {R"J({"c1": "-2", "g_free": "0", "c": 2, "branch": "-"})J", "example_6_4"},
      {R"J({"c1": "-2", "g_free": "auto", "c": 1, "branch": "+"})J", "example_6_5"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.id);
    const ConstructConfig cfg = config(c.cfg);
    const ConstructResult res = run_construct(cfg);
    REQUIRE_MESSAGE(res.ok(), res.failed_stage << ": " << res.message);
    CHECK(res.verdict->spray_mismatch <= 1e-7);
    const MetricSpec cat = catalog_get(c.id, nlohmann::json::object(), cfg.branch).spec;
    double lo = INFINITY, hi = -INFINITY;
    for (const BasePoint& b : cfg.grid.points()) {
      const double ratio = phi_value(*res.recovered, b.r, b.s) / phi_value(cat, b.r, b.s);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK((hi - lo) / hi <= 1e-7);
  }
}

TEST_CASE("pipeline stops at the failing stage") {
  const ConstructResult off = run_construct(config(R"J({"c1": "-1/r", "g_free": "auto", "c": 1.3})J"));
  CHECK(off.failed_stage == "integrability");
  CHECK(off.integrability.max_defect > 1e-3);

  const ConstructResult proj = run_construct(config(R"J({"c1": "0"})J"));
  CHECK(proj.failed_stage == "q");
  CHECK_FALSE(proj.warnings.empty());

  const ConstructResult numeric = run_construct(config(R"J({"c1": "-3/r", "c": 1, "theta0": "1 + s^2"})J"));
  CHECK(numeric.failed_stage == "p");
  CHECK(numeric.theta_residual <= 1e-7);

  const ConstructResult nonflat = run_construct(config(R"J({"c1": "-2", "g_free": "0", "c": 1.5})J"));
  CHECK(nonflat.failed_stage == "integrability");

  CHECK_THROWS_AS(config(R"J({"g_free": "0"})J"), ConfigError);
  CHECK_THROWS_AS(run_construct(config(R"J({"c1": "-1/"})J")), ConfigError);
  CHECK_THROWS_AS(config(R"J({"c1": "-2", "grid": {"r": [0, 1, 3]}})J"), ConfigError);
}

TEST_CASE("construct report is JSON and stable") {
  const ConstructConfig cfg = config(R"J({"c1": "-2", "g_free": "0", "c": 2, "grid": {"r": [0.5, 1.5, 3], "s_frac": [-0.5, 0.5, 3]}})J");
  const nlohmann::json a = to_json(run_construct(cfg));
  const nlohmann::json b = to_json(run_construct(cfg));
  CHECK(a == b);
  CHECK(a["status"] == "ok");
  CHECK(a["verdict"]["flat"] == true);
  CHECK(parse_construct_config(a["config"]).c1 == "-2");
  CHECK_NOTHROW(parse_metric_spec(a["recovered"]));
}
