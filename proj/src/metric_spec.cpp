#include "finsler/metric_spec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finsler/catalog.hpp"
#include "finsler/error.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

const std::vector<std::string>& rs_symbols() {
  static const std::vector<std::string> v = {"r", "s", "sigma"};
  return v;
}
const std::vector<std::string>& r_symbols() {
  static const std::vector<std::string> v = {"r", "sigma"};
  return v;
}
const std::vector<std::string>& t_symbols() {
  static const std::vector<std::string> v = {"t"};
  return v;
}

namespace {

// Below this |s| / max(1, r) a quotient by s is expanded from the s = 0 line.
constexpr double kRemovableBand = 1e-3;

// Panels of the r-integrals of the Berwald family.
constexpr int kFamilyPanels = 2;

std::vector<Jet> rs_args(BasePoint b, int degree, double sigma) {
  return {Jet::variable_r(degree, b), Jet::variable_s(degree, b), Jet::constant(sigma, degree, b)};
}

double eval_rs(const Expr& e, double r, double s, double sigma) {
  const double args[] = {r, s, sigma};
  return e.evaluate(std::span<const double>(args));
}

double eval_r(const Expr& e, double r, double sigma) {
  const double args[] = {r, sigma};
  return e.evaluate(std::span<const double>(args));
}

bool is_quotient_by_s(const Expr& e) {
  return e.kind() == Expr::Kind::Div && e.operand(1).kind() == Expr::Kind::Variable &&
         e.operand(1).variable_index() == 1;
}

// Extra series terms carried when moving the axis expansion to s != 0.
constexpr int kRemovableExtra = 4;

// Jet of N/s on the axis from the jet of N there.
Jet axis_quotient(const Expr& numerator, double r, int degree, double sigma) {
  const BasePoint axis{r, 0.0};
  const std::vector<Jet> args = rs_args(axis, degree + 1, sigma);
  const Jet n = numerator.evaluate(std::span<const Jet>(args));
  Jet q(degree, axis);
  for (int k = 0; k <= degree; ++k)
    for (int j = 0; j <= k; ++j) q.coeff(k - j, j) = n.coeff(k - j, j + 1);
  return q;
}

Jet removable_quotient(const Expr& numerator, BasePoint b, int degree, double sigma) {
  if (b.s == 0.0) return axis_quotient(numerator, b.r, degree, sigma);
  return axis_quotient(numerator, b.r, degree + kRemovableExtra, sigma).shifted_s(b.s).truncated(degree);
}

Jet antiderivative_r(const Jet& integrand, double value) {
  Jet out(integrand.degree(), integrand.base());
  out.coeff(0, 0) = value;
  for (int i = 1; i <= integrand.degree(); ++i) out.coeff(i, 0) = integrand.coeff(i - 1, 0) / i;
  return out;
}

struct FamilyState {
  double ln_g = 0.0;
  double h = 0.0;
  double ln_e = 0.0;
};

// Gauss-Legendre for ln g and ln E; H nests the ln g integral at its nodes.
FamilyState family_state(const BerwaldFamily& fam, double r, double sigma) {
  FamilyState st;
  if (r == fam.r_base) return st;
  auto c2 = [&](double rho) { return eval_r(fam.c2, rho, sigma); };
  auto dln_g = [&](double rho) { return 2.0 / rho - 2.0 * rho * rho * rho * c2(rho); };
  auto ln_g = [&](double rho) { return integrate_fixed(dln_g, fam.r_base, rho, kFamilyPanels); };
  st.ln_g = ln_g(r);
  st.h = integrate_fixed([&](double rho) { return 2.0 * rho * c2(rho) * std::exp(ln_g(rho)); }, fam.r_base, r,
                         kFamilyPanels);
  st.ln_e = integrate_fixed([&](double rho) { return -(2.0 / rho - rho * rho * rho * c2(rho)); }, fam.r_base, r,
                            kFamilyPanels);
  return st;
}

Jet berwald_family_jet(const BerwaldFamily& fam, BasePoint b, int degree, double sigma) {
  if (!(b.r > 0.0)) throw DomainError("berwald family needs r > 0");
  const FamilyState st = family_state(fam, b.r, sigma);
  const Jet r = Jet::variable_r(degree, b);
  const Jet s = Jet::variable_s(degree, b);
  const Jet c2 = r_jet(fam.c2, b, degree, sigma);
  const Jet r3 = r * r * r;
  const Jet ln_g = antiderivative_r(2.0 / r - 2.0 * r3 * c2, st.ln_g);
  const Jet g = exp(ln_g);
  const Jet h = antiderivative_r(2.0 * r * c2 * g, st.h);
  const Jet ln_e = antiderivative_r(-(2.0 / r - r3 * c2), st.ln_e);
  const Jet s2 = s * s;
  const std::vector<Jet> t = {s2 / (g + s2 * h)};
  return fam.psi.evaluate(std::span<const Jet>(t)) * exp(ln_e) * s;
}

double berwald_family_value(const BerwaldFamily& fam, double r, double s, double sigma) {
  if (!(r > 0.0)) throw DomainError("berwald family needs r > 0");
  const FamilyState st = family_state(fam, r, sigma);
  const double t[] = {s * s / (std::exp(st.ln_g) + s * s * st.h)};
  return fam.psi.evaluate(std::span<const double>(t)) * std::exp(st.ln_e) * s;
}

double log_phi_on_axis(const LogDerivative& ld, double r) {
  if (ld.c0) {
    const double c0 = ld.c0(r);
    if (!(c0 > 0.0) || !std::isfinite(c0))
      throw DomainError("c0(" + std::to_string(r) + ") is not positive");
    return std::log(c0);
  }
  if (!(ld.phi_ref > 0.0)) throw DomainError("phi_ref must be positive");
  const double along = integrate_fixed([&](double rho) { return ld.dlnphi_dr(rho, 0.0); }, ld.r_ref, r);
  return std::log(ld.phi_ref) + along;
}

double log_phi_value(const LogDerivative& ld, double r, double s) {
  double v = log_phi_on_axis(ld, r);
  if (s != 0.0) v += integrate_fixed([&](double t) { return ld.dlnphi_ds(r, t); }, 0.0, s);
  if (!std::isfinite(v)) throw DomainError("log phi is not finite");
  return v;
}

Jet log_derivative_jet(const LogDerivative& ld, BasePoint b, int degree) {
  Jet lnphi(degree, b);
  lnphi.coeff(0, 0) = log_phi_value(ld, b.r, b.s);
  if (degree == 0) return exp(lnphi);
  const int d = std::max(degree - 1, 1);
  const Jet a = ld.dlnphi_ds(b, d);
  const Jet c = ld.dlnphi_dr(b, d);
  const double a_r = a.partial(1, 0);
  const double c_s = c.partial(0, 1);
  const double scale = std::max({1.0, std::abs(a_r), std::abs(c_s)});
  if (std::abs(a_r - c_s) > ld.consistency_tol * scale) {
    std::ostringstream os;
    os.precision(17);
    os << "log-derivative pair is not a gradient at (r, s) = (" << b.r << ", " << b.s
       << "): d/dr (ln phi)_s = " << a_r << " but d/ds (ln phi)_r = " << c_s;
    throw ConsistencyError(os.str());
  }
  for (int k = 1; k <= degree; ++k)
    for (int j = 0; j <= k; ++j) {
      const int i = k - j;
      lnphi.coeff(i, j) = j >= 1 ? a.coeff(i, j - 1) / j : c.coeff(i - 1, 0) / i;
    }
  return exp(lnphi);
}

std::string require_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("metric spec is missing \"") + key + "\"");
  if (!j[key].is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
  return j[key].get<std::string>();
}

Expr parse_field(const nlohmann::json& j, const char* key, const std::vector<std::string>& symbols) {
  const std::string text = require_string(j, key);
  try {
    return Expr::parse(text, symbols);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("\"") + key + "\": " + e.what());
  }
}

double optional_number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return j[key].get<double>();
}

std::string describe_point(double r, double s) {
  std::ostringstream os;
  os.precision(17);
  os << "(r, s) = (" << r << ", " << s << ")";
  return os.str();
}

// Samples per integration path when looking for a crossed singular set.
constexpr int kPathSamples = 256;

// Checks the signed singular quantities of `e` along the segment from a to b,
// where point(t) gives the arguments. A sign change between samples, or a
// local minimum of some |quantity| that refines to within `margin`, means the
// integral defining phi runs through a singularity.
template <class Point>
bool path_is_regular(const Expr& e, Point point, double a, double b, double margin, std::string* which) {
  auto quantities = [&](double t) {
    const auto args = point(t);
    return e.singular_quantities(std::span<const double>(args));
  };
  std::vector<std::vector<double>> q;
  std::vector<double> ts;
  for (int k = 0; k <= kPathSamples; ++k) {
    const double t = a + (b - a) * k / kPathSamples;
    ts.push_back(t);
    q.push_back(quantities(t));
    if (q.back().size() != q.front().size()) return false;
  }
  for (std::size_t i = 0; i < q.front().size(); ++i)
    for (int k = 0; k <= kPathSamples; ++k) {
      const double v = q[k][i];
      if (std::isnan(v) || std::abs(v) <= margin) {
        if (which) *which = "singular value at " + std::to_string(ts[k]);
        return false;
      }
      if (k > 0 && (v > 0) != (q[k - 1][i] > 0)) {
        if (which) *which = "sign change between " + std::to_string(ts[k - 1]) + " and " + std::to_string(ts[k]);
        return false;
      }
      if (k > 0 && k < kPathSamples && std::abs(v) < std::abs(q[k - 1][i]) && std::abs(v) < std::abs(q[k + 1][i])) {
        // golden-section search for the minimum of |q_i| around the sample
        double lo = ts[k - 1], hi = ts[k + 1];
        if (lo > hi) std::swap(lo, hi);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto f = [&](double t) { return std::abs(quantities(t)[i]); };
        double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 60; ++it) {
          if (fc < fd) {
            hi = d, d = c, fd = fc, c = hi - g * (hi - lo), fc = f(c);
          } else {
            lo = c, c = d, fc = fd, d = lo + g * (hi - lo), fd = f(d);
          }
        }
        if (std::min(fc, fd) <= margin) {
          if (which) *which = "near-zero singular quantity close to " + std::to_string(0.5 * (lo + hi));
          return false;
        }
      }
    }
  return true;
}

}  // namespace

Field field_from_expr(const Expr& e, double sigma) {
  Field f;
  if (!is_quotient_by_s(e)) {
    f.jet = [e, sigma](BasePoint b, int degree) {
      const std::vector<Jet> args = rs_args(b, degree, sigma);
      return e.evaluate(std::span<const Jet>(args));
    };
    f.value = [e, sigma](double r, double s) { return eval_rs(e, r, s, sigma); };
    return f;
  }
  const Expr numerator = e.operand(0);
  f.jet = [e, numerator, sigma](BasePoint b, int degree) {
    if (std::abs(b.s) > kRemovableBand * std::max(1.0, b.r)) {
      const std::vector<Jet> args = rs_args(b, degree, sigma);
      return e.evaluate(std::span<const Jet>(args));
    }
    return removable_quotient(numerator, b, degree, sigma);
  };
  f.value = [e, numerator, sigma](double r, double s) {
    if (std::abs(s) > kRemovableBand * std::max(1.0, r)) return eval_rs(e, r, s, sigma);
    if (s == 0.0) return axis_quotient(numerator, r, 0, sigma).value();
    return axis_quotient(numerator, r, kRemovableExtra + 2, sigma).evaluate(0.0, s);
  };
  return f;
}

Jet r_jet(const Expr& e, BasePoint base, int degree, double sigma) {
  const std::vector<Jet> args = {Jet::variable_r(degree, base), Jet::constant(sigma, degree, base)};
  return e.evaluate(std::span<const Jet>(args));
}

MetricSpec::MetricSpec(Form form, int sigma, nlohmann::json echo)
    : form_(std::move(form)), sigma_(sigma), echo_(std::move(echo)) {
  if (sigma != 1 && sigma != -1) throw ConfigError("branch sign must be +1 or -1");
}

std::string MetricSpec::kind_name() const {
  switch (form_.index()) {
    case 0: return "expr";
    case 1: return "berwald_family";
    default: return "log_derivative";
  }
}

int parse_branch(const nlohmann::json& j) {
  if (!j.contains("branch")) return 1;
  const auto& b = j["branch"];
  if (b.is_string()) {
    const std::string v = b.get<std::string>();
    if (v == "+") return 1;
    if (v == "-") return -1;
  } else if (b.is_number_integer()) {
    const int v = b.get<int>();
    if (v == 1 || v == -1) return v;
  }
  throw ConfigError("\"branch\" must be \"+\" or \"-\"");
}

MetricSpec parse_metric_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("metric spec must be a JSON object");
  const std::string kind = require_string(j, "kind");
  const int sigma = parse_branch(j);
  if (kind == "expr") {
    const Expr phi = parse_field(j, "phi", rs_symbols());
    MetricSpec spec(ClosedForm{phi}, sigma, j);
    spec.guards_rs.push_back(phi);
    return spec;
  }
  if (kind == "berwald_family") {
    BerwaldFamily fam{parse_field(j, "psi", t_symbols()), parse_field(j, "c2", r_symbols()),
                      optional_number(j, "r_base", 1.0)};
    if (!(fam.r_base > 0.0)) throw ConfigError("\"r_base\" must be positive");
    const Expr c2 = fam.c2;
    MetricSpec spec(std::move(fam), sigma, j);
    spec.guards_r.push_back(c2);
    return spec;
  }
  if (kind == "log_derivative") {
    const Expr a = parse_field(j, "dlnphi_ds", rs_symbols());
    const Expr b = parse_field(j, "dlnphi_dr", rs_symbols());
    LogDerivative ld;
    ld.dlnphi_ds = field_from_expr(a, sigma);
    ld.dlnphi_dr = field_from_expr(b, sigma);
    std::vector<Expr> guards_r;
    if (j.contains("c0") && !j["c0"].is_null()) {
      const Expr c0 = parse_field(j, "c0", r_symbols());
      ld.c0 = [c0, sigma](double r) { return eval_r(c0, r, sigma); };
      guards_r.push_back(c0);
    }
    ld.r_ref = optional_number(j, "r_ref", 1.0);
    ld.phi_ref = optional_number(j, "phi_ref", 1.0);
    ld.consistency_tol = optional_number(j, "consistency_tol", 1e-7);
    MetricSpec spec(std::move(ld), sigma, j);
    spec.guards_rs.push_back(a);
    if (!is_quotient_by_s(b)) spec.guards_rs.push_back(b);
    spec.guards_r = std::move(guards_r);
    return spec;
  }
  if (kind == "catalog") {
    const std::string id = require_string(j, "id");
    nlohmann::json params = j.value("params", nlohmann::json::object());
    if (!params.is_object()) throw ConfigError("\"params\" must be an object");
    int branch = sigma;
    if (!j.contains("branch") && params.contains("branch")) branch = parse_branch(params);
    return catalog_get(id, params, branch).spec;
  }
  throw ConfigError("unknown metric spec kind \"" + kind + "\"");
}

MetricSpec load_metric_spec(std::string_view text_or_path) {
  std::string text(text_or_path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ConfigError("empty metric spec");
  if (text[first] != '{') {
    std::ifstream in(text);
    if (!in) throw ConfigError("cannot open spec file '" + text + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed spec JSON: ") + e.what());
  }
  return parse_metric_spec(j);
}

Jet phi_jet(const MetricSpec& spec, BasePoint base, int degree) {
  const double sigma = spec.sigma();
  if (const auto* cf = std::get_if<ClosedForm>(&spec.form())) {
    const std::vector<Jet> args = rs_args(base, degree, sigma);
    return cf->phi.evaluate(std::span<const Jet>(args));
  }
  if (const auto* fam = std::get_if<BerwaldFamily>(&spec.form()))
    return berwald_family_jet(*fam, base, degree, sigma);
  return log_derivative_jet(std::get<LogDerivative>(spec.form()), base, degree);
}

double phi_value(const MetricSpec& spec, double r, double s) {
  const double sigma = spec.sigma();
  if (const auto* cf = std::get_if<ClosedForm>(&spec.form())) return eval_rs(cf->phi, r, s, sigma);
  if (const auto* fam = std::get_if<BerwaldFamily>(&spec.form()))
    return berwald_family_value(*fam, r, s, sigma);
  return std::exp(log_phi_value(std::get<LogDerivative>(spec.form()), r, s));
}

DomainVerdict domain_check(const MetricSpec& spec, double r, double s, double margin) {
  auto invalid = [](std::string reason) { return DomainVerdict{false, std::move(reason)}; };
  if (!(r > 0.0) || !std::isfinite(r)) return invalid("origin: r must be positive");
  if (!std::isfinite(s)) return invalid("s is not finite");
  if (!(std::abs(s) < r * (1.0 - margin)))
    return invalid("almost-regular boundary: |s| >= r (1 - " + std::to_string(margin) + ") at " +
                   describe_point(r, s));
  const double sigma = spec.sigma();
  for (const Expr& e : spec.guards_rs) {
    std::string which;
    const double args[] = {r, s, sigma};
    const double m = e.domain_margin(std::span<const double>(args), &which);
    if (!(m > margin))
      return invalid("singular subexpression " + which + " (margin " + std::to_string(m) + ") at " +
                     describe_point(r, s));
  }
  for (const Expr& e : spec.guards_r) {
    std::string which;
    const double args[] = {r, sigma};
    const double m = e.domain_margin(std::span<const double>(args), &which);
    if (!(m > margin))
      return invalid("singular subexpression " + which + " (margin " + std::to_string(m) + ") at r = " +
                     std::to_string(r));
  }
  if (const auto* ld = std::get_if<LogDerivative>(&spec.form())) {
    // phi integrates (ln phi)_s from the axis, and without c0 (ln phi)_r along it
    std::string which;
    for (const Expr& e : spec.guards_rs) {
      auto along_s = [&](double t) { return std::array<double, 3>{r, t, sigma}; };
      if (!path_is_regular(e, along_s, 0.0, s, margin, &which))
        return invalid("integration path from s = 0 to " + describe_point(r, s) + " meets a singular set of " +
                       e.to_string().substr(0, 60) + ": " + which);
      if (!ld->c0) {
        auto along_r = [&](double t) { return std::array<double, 3>{t, 0.0, sigma}; };
        if (!path_is_regular(e, along_r, ld->r_ref, r, margin, &which))
          return invalid("integration path along s = 0 from r_ref to r = " + std::to_string(r) +
                         " meets a singular set: " + which);
      }
    }
  }
  if (const auto* fam = std::get_if<BerwaldFamily>(&spec.form())) {
    try {
      const FamilyState st = family_state(*fam, r, sigma);
      const double t[] = {s * s / (std::exp(st.ln_g) + s * s * st.h)};
      std::string which;
      const double m = fam->psi.domain_margin(std::span<const double>(t), &which);
      if (!(m > margin))
        return invalid("singular subexpression of psi " + which + " at t = " + std::to_string(t[0]));
    } catch (const Error& e) {
      return invalid(e.what());
    }
  }
  double phi = 0.0;
  try {
    phi = phi_value(spec, r, s);
  } catch (const Error& e) {
    return invalid(std::string("phi undefined: ") + e.what());
  }
  if (!std::isfinite(phi)) return invalid("phi is not finite at " + describe_point(r, s));
  if (!(phi > 0.0)) return invalid("phi is not positive at " + describe_point(r, s));
  return {};
}

DomainVerdict domain_check(const MetricSpec& spec, const RadialFrame& frame, double margin) {
  if (!(frame.u > 0.0)) return DomainVerdict{false, "zero tangent vector"};
  return domain_check(spec, frame.r, frame.s, margin);
}

}  // namespace finsler
