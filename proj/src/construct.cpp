#include "finsler/construct.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "finsler/curvature.hpp"
#include "finsler/metric.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

const char* to_string(ThetaFamily f) {
  switch (f) {
    case ThetaFamily::InverseR: return "c1 = -1/r";
    case ThetaFamily::ConstantMinus2: return "c1 = -2";
    default: return "none";
  }
}

namespace {

Expr rs_expr(const std::string& text) { return Expr::parse(text, rs_symbols()); }

Expr parse_config_expr(const std::string& text, const std::vector<std::string>& symbols, const char* field) {
  try {
    return Expr::parse(text, symbols);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("construct config: ") + field + ": " + e.what());
  }
}

double eval(const Expr& e, double r, double s, double sigma) {
  const std::array<double, 3> args{r, s, sigma};
  return e.evaluate(args);
}

Jet jet(const Expr& e, double r, double s, double sigma, int degree) {
  return field_from_expr(e, sigma)(BasePoint{r, s}, degree);
}

// x along the first axis, unit y with <x, y> = s
RadialFrame frame_at(double r, double s, int n = 3) {
  Vector x = Vector::Zero(n), y = Vector::Zero(n);
  x[0] = r;
  y[0] = s / r;
  y[1] = std::sqrt(std::max(0.0, 1.0 - (s / r) * (s / r)));
  return frame_from_ambient(x, y);
}

std::array<double, 3> triple(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ConfigError(std::string("construct config: grid.") + key + " must be [lo, hi, n]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double number_or(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("construct config: ") + key + " must be a number");
  return j[key].get<double>();
}

}  // namespace

std::vector<BasePoint> ConstructGrid::points() const {
  std::vector<BasePoint> out;
  auto at = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
  for (int i = 0; i < r_n; ++i) {
    const double r = at(r_lo, r_hi, r_n, i);
    for (int j = 0; j < s_n; ++j) out.push_back({r, r * at(s_lo, s_hi, s_n, j)});
  }
  return out;
}

ConstructConfig parse_construct_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("construct config must be a JSON object");
  ConstructConfig c;
  if (!j.contains("c1") || !j["c1"].is_string()) throw ConfigError("construct config: \"c1\" (string) is required");
  c.c1 = j["c1"].get<std::string>();
  if (j.contains("g_free")) {
    if (!j["g_free"].is_string()) throw ConfigError("construct config: g_free must be a string");
    c.g_free = j["g_free"].get<std::string>();
  }
  c.c = number_or(j, "c", c.c);
  if (j.contains("branch")) c.branch = parse_branch(j);
  if (j.contains("K_hypothesis") && !j["K_hypothesis"].is_null()) c.K_hypothesis = number_or(j, "K_hypothesis", 0.0);
  if (j.contains("grid")) {
    const nlohmann::json& g = j["grid"];
    if (!g.is_object()) throw ConfigError("construct config: grid must be an object");
    if (g.contains("r")) {
      const auto t = triple(g["r"], "r");
      c.grid.r_lo = t[0], c.grid.r_hi = t[1], c.grid.r_n = static_cast<int>(t[2]);
    }
    if (g.contains("s_frac")) {
      const auto t = triple(g["s_frac"], "s_frac");
      c.grid.s_lo = t[0], c.grid.s_hi = t[1], c.grid.s_n = static_cast<int>(t[2]);
    }
  }
  if (!(c.grid.r_lo > 0.0) || c.grid.r_hi < c.grid.r_lo || c.grid.r_n < 1 || c.grid.s_n < 1 ||
      !(std::abs(c.grid.s_lo) < 1.0) || !(std::abs(c.grid.s_hi) < 1.0))
    throw ConfigError("construct config: grid needs 0 < r_lo <= r_hi, |s_frac| < 1 and n >= 1");
  c.r_ref = number_or(j, "r_ref", c.r_ref);
  c.phi_ref = number_or(j, "phi_ref", c.phi_ref);
  if (j.contains("theta0") && !j["theta0"].is_null()) {
    if (!j["theta0"].is_string()) throw ConfigError("construct config: theta0 must be a string");
    c.theta0 = j["theta0"].get<std::string>();
  }
  c.r0 = number_or(j, "r0", c.r0);
  c.tol = number_or(j, "tol", c.tol);
  return c;
}

nlohmann::json to_json(const ConstructConfig& c) {
  nlohmann::json j = {{"c1", c.c1},
                      {"g_free", c.g_free},
                      {"c", c.c},
                      {"branch", c.branch > 0 ? "+" : "-"},
                      {"K_hypothesis", nullptr},
                      {"grid",
                       {{"r", {c.grid.r_lo, c.grid.r_hi, c.grid.r_n}},
                        {"s_frac", {c.grid.s_lo, c.grid.s_hi, c.grid.s_n}}}},
                      {"r_ref", c.r_ref},
                      {"phi_ref", c.phi_ref},
                      {"r0", c.r0},
                      {"tol", c.tol}};
  if (c.K_hypothesis) j["K_hypothesis"] = *c.K_hypothesis;
  if (c.theta0) j["theta0"] = *c.theta0;
  return j;
}

Expr q_from_c1(const Expr& c1_r, double r_lo, double r_hi, double sigma) {
  const Expr c1 = c1_r.rebind(rs_symbols());
  const Expr r = Expr::variable(0, rs_symbols());
  const Expr s = Expr::variable(1, rs_symbols());
  const Expr den = r - 2.0 * pow(r, 3) * c1;
  const int m = 200;
  double prev = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double ri = r_lo + (r_hi - r_lo) * i / m;
    const double d = eval(den, ri, 0.0, sigma);
    if (!(std::abs(d) > 1e-12) || (i > 0 && (d > 0) != (prev > 0)))
      throw DomainError("r - 2 r^3 c1 vanishes near r = " + std::to_string(ri));
    prev = d;
  }
  return c1 + (c1.derivative("r") + 2.0 * r * c1 * c1) / den * (s * s);
}

double q_residual(const Expr& Q, double r, double s, double sigma) {
  const Jet j = jet(Q, r, s, sigma, 2);
  const double q = j.value(), qr = j.partial(1, 0), qs = j.partial(0, 1);
  const double qss = j.partial(0, 2), qrs = j.partial(1, 1);
  const double w = r * r - s * s;
  const double eq =
      2.0 / r * qr - qss - s / r * qrs + 2.0 * w * q * qss + 4.0 * q * q - w * qs * qs - 2.0 * s * q * qs;
  return eq / std::max({1.0, std::abs(q), q * q});
}

ThetaFamily detect_family(const Expr& c1, double sigma) {
  bool inv = true, minus2 = true;
  for (double r : {0.37, 0.5, 0.8, 1.3, 2.0, 3.1}) {
    const std::array<double, 2> args{r, sigma};
    double v;
    try {
      v = c1.evaluate(args);
    } catch (const DomainError&) {
      return ThetaFamily::None;
    }
    inv = inv && std::abs(v + 1.0 / r) <= 1e-12 * (1.0 / r);
    minus2 = minus2 && std::abs(v + 2.0) <= 2e-12;
  }
  if (inv) return ThetaFamily::InverseR;
  if (minus2) return ThetaFamily::ConstantMinus2;
  return ThetaFamily::None;
}

Expr theta_closed_form(ThetaFamily family, double c) {
  const std::string k = "sigma*" + literal(c);
  switch (family) {
    case ThetaFamily::InverseR: return rs_expr(k + "*sqrt(r/(r + 4*r^2 - 4*s^2))");
    case ThetaFamily::ConstantMinus2: return rs_expr(k + "*sqrt((1 + 4*r^2)/(1 + 4*r^2 - 4*s^2))");
    default: throw ConfigError("no closed-form Theta for this c1");
  }
}

Expr particular_p(ThetaFamily family, double c) {
  const std::string k = "sigma*" + literal(c);
  switch (family) {
    case ThetaFamily::InverseR: return rs_expr(k + "*sqrt(r*(r + 4*r^2 - 4*s^2))/(r*(1 + 4*r))");
    case ThetaFamily::ConstantMinus2: return rs_expr(k + "*sqrt((1 + 4*r^2 - 4*s^2)/(1 + 4*r^2))");
    default: throw ConfigError("no closed-form particular P for this c1");
  }
}

Expr auto_g(ThetaFamily family, double c) {
  const std::string c2 = literal(c * c);
  switch (family) {
    case ThetaFamily::InverseR:
      return Expr::parse("2*(" + c2 + "*r - 10*r - 3)/(3*r*(2*r + 1)*(4*r + 1))", r_symbols());
    case ThetaFamily::ConstantMinus2:
      return Expr::parse("2*(" + c2 + " - 4)/(3*(1 + 4*r^2))", r_symbols());
    default: throw ConfigError("g_free \"auto\" needs a c1 with a known family");
  }
}

CharacteristicTheta::CharacteristicTheta(Expr Q, Expr theta0, double r0, double sigma, double max_step)
    : Q_(std::move(Q)), theta0_(std::move(theta0)), r0_(r0), sigma_(sigma), max_step_(max_step) {}

double CharacteristicTheta::operator()(double r, double s) const { return trace(r, s, nullptr); }

double CharacteristicTheta::margin(double r, double s) const {
  double m = 0.0;
  trace(r, s, &m);
  return m;
}

double CharacteristicTheta::trace(double r, double s, double* margin) const {
  // state: w = s^2 and the integral of -2 rho Q along the curve
  auto rhs = [&](double rho, double w) {
    const double q = eval(Q_, rho, std::sqrt(std::max(w, 0.0)), sigma_);
    return std::array<double, 2>{2.0 * rho * (1.0 - 2.0 * (rho * rho - w) * q), -2.0 * rho * q};
  };
  // a step count fixed by the interval keeps the result smooth in (r, s)
  const int n = std::max(16, static_cast<int>(std::ceil(std::abs(r0_ - r) / max_step_)));
  const double h = (r0_ - r) / n;
  double rho = r, w = s * s, L = 0.0;
  double m = std::min(w, r * r - w) / (r * r);
  for (int i = 0; i < n; ++i) {
    const auto k1 = rhs(rho, w);
    const auto k2 = rhs(rho + h / 2, w + h / 2 * k1[0]);
    const auto k3 = rhs(rho + h / 2, w + h / 2 * k2[0]);
    const auto k4 = rhs(rho + h, w + h * k3[0]);
    w += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    L += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    rho = r + (i + 1) * h;
    if (!(w >= 0.0) || !(w < rho * rho))
      throw DomainError("characteristic through (r, s) = (" + std::to_string(r) + ", " + std::to_string(s) +
                        ") leaves the cone at r = " + std::to_string(rho));
    m = std::min(m, std::min(w, rho * rho - w) / (rho * rho));
  }
  if (margin) *margin = m;
  const double s0 = std::copysign(std::sqrt(w), s);
  return eval(theta0_, r0_, s0, sigma_) * std::exp(-L);
}

double theta_residual(const std::function<double(double, double)>& theta, const Expr& Q, double r, double s,
                      double sigma) {
  const double h = 3e-4 * std::max(1.0, r);
  auto d = [&](auto f) { return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h); };
  const double t = theta(r, s);
  const double tr = d([&](double e) { return theta(r + e, s); });
  const double ts = d([&](double e) { return theta(r, s + e); });
  const double q = eval(Q, r, s, sigma);
  const double eq = tr / (2 * r) + t * q - (r * r - s * s) / s * ts * q + ts / (2 * s);
  return eq / std::max(1.0, std::abs(t));
}

double theta_residual(const Expr& theta, const Expr& Q, double r, double s, double sigma) {
  const Jet t = jet(theta, r, s, sigma, 1);
  const double q = eval(Q, r, s, sigma);
  const double ts = t.partial(0, 1);
  const double eq = t.partial(1, 0) / (2 * r) + t.value() * q - (r * r - s * s) / s * ts * q + ts / (2 * s);
  return eq / std::max(1.0, std::abs(t.value()));
}

double p_numeric(const std::function<double(double, double)>& theta, const Expr& g, double r, double s,
                 double sigma) {
  if (!(s > 0.0)) throw DomainError("numeric P needs s > 0");
  const double I = integrate([&](double t) { return theta(r, t) / (t * t); }, r / 2, s).value;
  const std::array<double, 2> args{r, sigma};
  return g.evaluate(args) * s - s * I;
}

UWData uw_invert(const Expr& P, const Expr& Q) {
  const Expr r = Expr::variable(0, rs_symbols());
  const Expr s = Expr::variable(1, rs_symbols());
  const Expr w = r * r - s * s;
  const Expr U = (s + (2.0 * r * r - s * s) * P - s * w * P.derivative("s")) /
                 (1.0 + s * P - 2.0 * w * Q + s * w * Q.derivative("s"));
  const Expr W = 2.0 * r * (P + Q * U);
  const Expr a = (U - s) / w;
  return UWData{U, W, a, (W - r * a) / s};
}

IntegrabilityReport integrability_check(const Expr& dlnphi_ds, const Expr& dlnphi_dr,
                                        const std::vector<BasePoint>& grid, double sigma, double tol) {
  IntegrabilityReport rep;
  const Field a = field_from_expr(dlnphi_ds, sigma), b = field_from_expr(dlnphi_dr, sigma);
  double defect = 0.0;
  for (const BasePoint& p : grid) {
    const double ar = a(p, 1).partial(1, 0), bs = b(p, 1).partial(0, 1);
    rep.scale = std::max({rep.scale, std::abs(ar), std::abs(bs)});
    if (std::abs(ar - bs) > defect || !std::isfinite(ar - bs)) {
      defect = std::isfinite(ar - bs) ? std::abs(ar - bs) : INFINITY;
      rep.worst = p;
    }
  }
  rep.max_defect = defect / rep.scale;
  rep.pass = rep.max_defect <= tol;
  return rep;
}

MetricSpec phi_recover(const UWData& uw, int sigma, double r_ref, double phi_ref) {
  const nlohmann::json j = {{"kind", "log_derivative"},
                            {"dlnphi_ds", uw.dlnphi_ds.to_string()},
                            {"dlnphi_dr", uw.dlnphi_dr.to_string()},
                            {"r_ref", r_ref},
                            {"phi_ref", phi_ref},
                            {"branch", sigma > 0 ? "+" : "-"}};
  return parse_metric_spec(j);
}

double log_c0_derivative(const MetricSpec& recovered, double r) {
  const auto* ld = std::get_if<LogDerivative>(&recovered.form());
  if (!ld) throw ConfigError("log_c0_derivative needs a log-derivative spec");
  return ld->dlnphi_dr(r, 0.0);
}

Expr first_equation(const Expr& P, const Expr& Q) {
  const Expr r = Expr::variable(0, rs_symbols());
  const Expr s = Expr::variable(1, rs_symbols());
  const Expr Ps = P.derivative("s");
  return 2.0 * Q - s / r * P.derivative("r") - Ps + 2.0 * (r * r - s * s) * Ps * Q + P * P + 2.0 * s * P * Q;
}

ConstructVerdict classify_constructed(const MetricSpec& recovered, const Expr& P, const Expr& Q,
                                      const std::vector<BasePoint>& grid, std::optional<double> K_hypothesis,
                                      double tol) {
  ConstructVerdict v;
  const double sigma = recovered.sigma();
  const Expr E1 = first_equation(P, Q);
  std::vector<double> Ks;
  double e1_scale = 1.0;
  for (const BasePoint& b : grid) {
    const RadialFrame f = frame_at(b.r, b.s);
    const Jet phi = phi_jet(recovered, b, 2);
    const SprayData sp = spray_pq(phi, f);
    const double p = eval(P, b.r, b.s, sigma), q = eval(Q, b.r, b.s, sigma);
    const double scale = std::max({1.0, std::abs(p), std::abs(q)});
    v.spray_mismatch = std::max({v.spray_mismatch, std::abs(sp.p() - p) / scale, std::abs(sp.q() - q) / scale});
    const double e1 = eval(E1, b.r, b.s, sigma);
    v.first_equation_max = std::max(v.first_equation_max, std::abs(e1));
    e1_scale = std::max({e1_scale, std::abs(q), p * p});
    Ks.push_back(e1 / (phi.value() * phi.value()));
  }
  v.flat = v.first_equation_max <= tol * e1_scale;
  double sum = 0.0;
  for (double k : Ks) sum += k;
  v.K = v.flat ? 0.0 : sum / Ks.size();
  const auto [lo, hi] = std::minmax_element(Ks.begin(), Ks.end());
  v.K_spread = *hi - *lo;
  if (!v.flat) {
    const double K = K_hypothesis && *K_hypothesis != 0.0 ? *K_hypothesis : (v.K > 0 ? 1.0 : -1.0);
    v.solved_phi2 = E1 / K;
  }

  CurvatureOptions copts;
  copts.K = v.K;
  // the full curvature pass is the expensive part; a spread subset suffices
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 25);
  for (std::size_t i = 0; i < grid.size(); i += stride) {
    const BasePoint& b = grid[i];
    const CurvatureReport rep = curvature_report(recovered, frame_at(b.r, b.s), copts);
    for (double x : rep.residual.cfc) v.cfc_residual = std::max(v.cfc_residual, std::abs(x));
  }
  const bool sign_ok = !K_hypothesis || (*K_hypothesis == 0.0 ? v.flat : (*K_hypothesis > 0) == (v.K > 0));
  v.pass = v.spray_mismatch <= tol && v.cfc_residual <= tol && v.K_spread <= tol * std::max(1.0, std::abs(v.K)) &&
           sign_ok;
  return v;
}

// Numeric Theta is checked only where its characteristic keeps this relative
// distance from w = 0 and w = r^2.
constexpr double kEdgeMargin = 0.02;

ConstructResult run_construct(const ConstructConfig& config) {
  ConstructResult res;
  res.config = config;
  const double sigma = config.branch;
  const std::vector<BasePoint> grid = config.grid.points();
  auto fail = [&](const char* stage, std::string msg) {
    res.failed_stage = stage;
    res.message = std::move(msg);
    return res;
  };

  // Step 1
  const Expr c1 = parse_config_expr(config.c1, r_symbols(), "c1");
  try {
    res.Q = q_from_c1(c1, config.grid.r_lo, config.grid.r_hi, sigma);
  } catch (const DomainError& e) {
    return fail("q", e.what());
  }
  double q0 = 1.0;
  if (res.Q->is_constant(&q0) && q0 == 0.0) {
    res.warnings.push_back("Q = 0: the metric is projective; the construction does not apply");
    return fail("q", "Q vanishes identically (projective case)");
  }
  for (const BasePoint& b : grid) res.q_residual = std::max(res.q_residual, std::abs(q_residual(*res.Q, b.r, b.s, sigma)));
  if (!(res.q_residual <= 1e-9)) return fail("q", "Q misses the third equation, residual " + std::to_string(res.q_residual));

  // Step 2
  res.family = detect_family(c1, sigma);
  if (res.family != ThetaFamily::None) {
    res.theta = theta_closed_form(res.family, config.c);
    for (const BasePoint& b : grid)
      res.theta_residual = std::max(res.theta_residual, std::abs(theta_residual(*res.theta, *res.Q, b.r, b.s, sigma)));
  }
  if (res.family == ThetaFamily::None || config.theta0) {
    const Expr theta0 = config.theta0 ? parse_config_expr(*config.theta0, rs_symbols(), "theta0")
                        : res.theta   ? *res.theta
                                      : rs_expr("sigma*" + literal(config.c));
    const CharacteristicTheta numeric(*res.Q, theta0, config.r0, sigma);
    int reached = 0, missed = 0;
    std::string last;
    // a coarse subset: each value integrates a whole characteristic
    for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 30)) {
      const BasePoint& b = grid[i];
      try {
        if (numeric.margin(b.r, b.s) < kEdgeMargin) throw DomainError("characteristic grazes the cone or the axis");
        res.theta_residual = std::max(res.theta_residual,
                                      std::abs(theta_residual(std::cref(numeric), *res.Q, b.r, b.s, sigma)));
        ++reached;
      } catch (const DomainError& e) {
        ++missed;
        last = e.what();
      }
    }
    if (reached == 0) return fail("theta", last);
    if (missed > 0)
      res.warnings.push_back("numeric Theta: " + std::to_string(missed) +
                             " grid point(s) not reached from r0 inside the cone, e.g. " + last);
  }
  if (!(res.theta_residual <= config.tol))
    return fail("theta", "Theta misses the second equation, residual " + std::to_string(res.theta_residual));
  if (res.family == ThetaFamily::None)
    return fail("p", "Theta is numeric only for this c1; no closed-form P to continue with");

  // P = g s + particular part
  try {
    res.g = config.g_free == "auto" ? auto_g(res.family, config.c)
                                    : parse_config_expr(config.g_free, r_symbols(), "g_free");
  } catch (const ConfigError& e) {
    return fail("p", e.what());
  }
  const Expr s = Expr::variable(1, rs_symbols());
  res.P = res.g->rebind(rs_symbols()) * s + particular_p(res.family, config.c);

  // Steps 3 and 4
  res.uw = uw_invert(*res.P, *res.Q);
  try {
    for (const BasePoint& b : grid) {
      eval(res.uw->dlnphi_ds, b.r, b.s, sigma);
      field_from_expr(res.uw->dlnphi_dr, sigma)(b.r, b.s);
    }
  } catch (const DomainError& e) {
    return fail("uw", e.what());
  }
  try {
    res.integrability = integrability_check(res.uw->dlnphi_ds, res.uw->dlnphi_dr, grid, sigma, config.tol);
  } catch (const DomainError& e) {
    return fail("integrability", e.what());
  }
  if (!res.integrability.pass)
    return fail("integrability", "(ln phi)_rs != (ln phi)_sr, defect " + std::to_string(res.integrability.max_defect));

  try {
    res.recovered = phi_recover(*res.uw, config.branch, config.r_ref, config.phi_ref);
    for (const BasePoint& b : grid) {
      const DomainVerdict d = domain_check(*res.recovered, b.r, b.s);
      if (!d) throw DomainError(d.reason);
    }
  } catch (const Error& e) {
    return fail("recover", e.what());
  }

  try {
    res.verdict = classify_constructed(*res.recovered, *res.P, *res.Q, grid, config.K_hypothesis, config.tol);
  } catch (const DomainError& e) {
    return fail("spray", e.what());
  }
  const ConstructVerdict& v = *res.verdict;
  if (!(v.spray_mismatch <= config.tol))
    return fail("spray", "spray of the recovered metric differs from (P, Q) by " + std::to_string(v.spray_mismatch));
  if (!v.pass)
    return fail("curvature", "flag curvature is not the constant expected (K = " + std::to_string(v.K) +
                                 ", spread " + std::to_string(v.K_spread) + ", residual " +
                                 std::to_string(v.cfc_residual) + ")");
  return res;
}

nlohmann::json to_json(const ConstructResult& r) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["status"] = r.ok() ? "ok" : "failed";
  if (!r.ok()) {
    j["failed_stage"] = r.failed_stage;
    j["message"] = r.message;
  }
  j["family"] = to_string(r.family);
  auto text = [](const std::optional<Expr>& e) { return e ? nlohmann::json(e->to_string()) : nlohmann::json(); };
  j["Q"] = text(r.Q);
  j["theta"] = text(r.theta);
  j["g"] = text(r.g);
  j["P"] = text(r.P);
  j["q_residual"] = r.q_residual;
  j["theta_residual"] = r.theta_residual;
  if (r.uw) {
    j["integrability"] = {{"max_defect", r.integrability.max_defect},
                          {"scale", r.integrability.scale},
                          {"worst", {r.integrability.worst.r, r.integrability.worst.s}},
                          {"pass", r.integrability.pass}};
  }
  if (r.recovered) j["recovered"] = r.recovered->echo();
  if (r.verdict) {
    const ConstructVerdict& v = *r.verdict;
    j["verdict"] = {{"spray_mismatch", v.spray_mismatch},
                    {"flat", v.flat},
                    {"first_equation_max", v.first_equation_max},
                    {"K", v.K},
                    {"K_spread", v.K_spread},
                    {"cfc_residual", v.cfc_residual},
                    {"solved_phi2", text(v.solved_phi2)},
                    {"pass", v.pass}};
  }
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace finsler
