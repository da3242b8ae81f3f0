#include "finsler/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

namespace {

double number_param(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw ConfigError(std::string("catalog parameter \"") + key + "\" must be a number");
  return p[key].get<double>();
}

// A coefficient function of r given as a number or an expression, returned
// parenthesised for splicing into a larger expression.
std::string coefficient_param(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.contains(key)) return "(" + literal(fallback) + ")";
  const auto& v = p[key];
  if (v.is_number()) return "(" + literal(v.get<double>()) + ")";
  if (!v.is_string())
    throw ConfigError(std::string("catalog parameter \"") + key + "\" must be a number or an expression in r");
  try {
    Expr::parse(v.get<std::string>(), r_symbols());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("catalog parameter \"") + key + "\": " + e.what());
  }
  return "(" + v.get<std::string>() + ")";
}

std::string string_param(const nlohmann::json& p, const char* key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_string()) throw ConfigError(std::string("catalog parameter \"") + key + "\" must be a string");
  return p[key].get<std::string>();
}

nlohmann::json echo_of(std::string_view id, const nlohmann::json& params, int sigma) {
  return {{"kind", "catalog"}, {"id", std::string(id)}, {"params", params}, {"branch", sigma > 0 ? "+" : "-"}};
}

MetricSpec with_echo(const nlohmann::json& j, nlohmann::json echo) {
  MetricSpec parsed = parse_metric_spec(j);
  MetricSpec spec(parsed.form(), parsed.sigma(), std::move(echo));
  spec.guards_rs = parsed.guards_rs;
  spec.guards_r = parsed.guards_r;
  return spec;
}

const char* branch_text(int sigma) { return sigma > 0 ? "+" : "-"; }

}  // namespace

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = {"euclidean",         "riemannian_quadratic", "berwald_family",
                                               "unicorn_candidate", "example_6_1",          "example_6_2",
                                               "example_6_4",       "example_6_5"};
  return ids;
}

CatalogEntry catalog_get(std::string_view id, const nlohmann::json& params, int sigma) {
  if (!params.is_object()) throw ConfigError("catalog parameters must be an object");
  const nlohmann::json echo = echo_of(id, params, sigma);
  const char* br = branch_text(sigma);

  if (id == "euclidean") {
    nlohmann::json j = {{"kind", "expr"}, {"phi", "1"}, {"branch", br}};
    Expectation e;
    e.berwald = true;
    e.landsberg = true;
    e.einstein = true;
    e.flag_curvature = 0.0;
    return {std::string(id), with_echo(j, echo), SampleRange{}, e, "flat metric F = |y|"};
  }

  if (id == "riemannian_quadratic") {
    const double c1 = number_param(params, "c1", 1.0);
    const double c2 = number_param(params, "c2", 0.5);
    if (!(c2 > 0.0)) throw ConfigError("riemannian_quadratic needs c2 > 0");
    nlohmann::json j = {{"kind", "expr"}, {"phi", "sqrt(" + literal(c1) + "*s^2 + 2*" + literal(c2) + ")"},
                        {"branch", br}};
    Expectation e;
    e.berwald = true;
    e.landsberg = true;
    SampleRange range;
    if (c1 < 0.0) range.r_hi = std::min(range.r_hi, 0.9 * std::sqrt(2.0 * c2 / -c1));
    if (range.r_hi <= range.r_lo) throw ConfigError("riemannian_quadratic parameters leave no sampling range");
    return {std::string(id), with_echo(j, echo), range, e,
            "Riemannian metric F^2 = c1 <x,y>^2 + 2 c2 |y|^2"};
  }

  if (id == "berwald_family") {
    nlohmann::json j = {{"kind", "berwald_family"},
                        {"psi", string_param(params, "psi", "(1 + 0.5*sqrt(t))/sqrt(t)")},
                        {"c2", string_param(params, "c2", "0")},
                        {"r_base", number_param(params, "r_base", 1.0)},
                        {"branch", br}};
    Expectation e;
    e.berwald = true;
    e.landsberg = true;
    SampleRange range;
    range.s_lo = 0.1;  // phi is odd in s
    range.s_hi = 0.9;
    return {std::string(id), with_echo(j, echo), range, e,
            "Berwald metric phi = psi(s^2 / (g + s^2 H)) E s built from psi and c2"};
  }

  if (id == "unicorn_candidate") {
    const std::string c0 = coefficient_param(params, "c0q", 0.0);
    const std::string c1 = coefficient_param(params, "c1", 0.0);
    const std::string c2 = "(sigma*" + coefficient_param(params, "c2", 1.0) + ")";
    const std::string c3 = coefficient_param(params, "c3", 0.0);
    const std::string root = "sqrt(r^2 - s^2)";
    const std::string k = "(" + c1 + " + 2*" + c3 + ")";
    const std::string den = "(r^2 + " + k + "*r^2*s^2 - 2*" + c3 + "*r^4 + 2*" + c2 + "*s*" + root + ")";
    const std::string a = "(" + k + "*r^2*s + 2*" + c2 + "*" + root + ") / " + den;
    const std::string b = "(s*" + root + "*(2*" + c0 + "*" + c2 + "*r^4 + 4*(" + c1 + " + " + c3 + ")*" + c2 +
                          "*r^2 - 2*" + c2 + ") + " + c0 + "*" + c1 + "*r^6*s^2 + (" + c0 + " + 4*" + c1 + "*" +
                          c3 + " + 2*" + c1 + "^2)*r^4*s^2 - 2*" + c1 + "*" + c3 + "*r^6 + " + c1 + "*r^4) / (r*" +
                          den + ")";
    nlohmann::json j = {{"kind", "log_derivative"}, {"dlnphi_ds", a}, {"dlnphi_dr", b}, {"branch", br}};
    Expectation e;
    e.landsberg = true;
    const nlohmann::json c2p = params.value("c2", nlohmann::json(1.0));
    if (c2p.is_number()) e.berwald = c2p.get<double>() == 0.0;
    // for |c2| >= 1 the denominator has a double zero on s = -+r/sqrt(2), where phi vanishes
    SampleRange range;
    range.s_lo = -0.5;
    range.s_hi = 0.5;
    return {std::string(id), with_echo(j, echo), range, e,
            "Landsberg candidate whose spray carries c2 sqrt(r^2 - s^2) terms"};
  }

  if (id == "example_6_1") {
    const std::string A = "sqrt(r*(r + 4*r^2 - 4*s^2))";
    const std::string den = "((r + 4*r^2 - 4*s^2)*(sigma*2*r*s + (1 + 2*r)*" + A + "))";
    const std::string a = "(sigma*4*r*(r + 4*r^2 - 2*s^2) - 4*s*(1 + 2*r)*" + A + ") / " + den;
    const std::string b = "(2*" + A +
                          "*(s^2 + 8*r^2*s^2 + 14*r*s^2 + 8*r^4 - 2*r^3 - r^2) - sigma*4*(5*r^3*s + 20*r^4*s - "
                          "12*r^2*s^3 + r*s^3)) / (r*(1 + 4*r)*" +
                          den + ")";
    nlohmann::json j = {{"kind", "log_derivative"},
                        {"dlnphi_ds", a},
                        {"dlnphi_dr", b},
                        {"c0", "(2*r + 1)^2/(4*r + 1)^(3/2)"},
                        {"branch", br}};
    Expectation e;
    e.berwald = false;
    e.einstein = true;
    e.flag_curvature = 0.0;
    return {std::string(id), with_echo(j, echo), SampleRange{}, e,
            "zero flag curvature, spray from c1 = -1/r, c = 2"};
  }

  if (id == "example_6_2") {
    const double s2_scale = number_param(params, "s2_scale", 1.0);
    const std::string phi2 = "1/(4*r + 1) + sigma*4*sqrt(r*(r + 4*r^2 - 4*s^2))*s/(r*(2*r + 1)*(4*r + 1)^2) - " +
                             std::string(s2_scale == 1.0 ? "" : literal(s2_scale) + "*") +
                             "4*(4*r^2 + 3*r + 1)/(r*(2*r + 1)^2*(4*r + 1)^2)*s^2";
    const double scale = number_param(params, "phi2_scale", 1.0);
    const std::string phi = scale == 1.0 ? "sqrt(" + phi2 + ")" : "sqrt(" + literal(scale) + "*(" + phi2 + "))";
    nlohmann::json j = {{"kind", "expr"}, {"phi", phi}, {"branch", br}};
    Expectation e;
    e.berwald = false;
    if (s2_scale == 1.0) {
      e.einstein = true;
      e.flag_curvature = -1.0 / scale;
    }
    return {std::string(id), with_echo(j, echo), SampleRange{}, e,
            "flag curvature -1, spray from c1 = -1/r, c = 1"};
  }

  if (id == "example_6_4") {
    const bool uncorrected = params.value("uncorrected", false);
    const std::string B = "sqrt((1 + 4*r^2)/(1 + 4*r^2 - 4*s^2))";
    const std::string den =
        "((16*r^4 + 8*r^2 - 32*r^2*s^2 + 16*s^4 - 8*s^2 + 1)*" + B + " + sigma*(8*r^2*s - 8*s^3 + 2*s))";
    const std::string a = "4*(sigma*(4*r^2 - 2*s^2 + 1) - (4*r^2*s - 4*s^3 + s)*" + B + ") / " + den;
    const std::string quartic = uncorrected ? "8*r*s^4" : "8*s^4";
    const std::string b = "8*r*((16*r^4 + 8*r^2 - 24*r^2*s^2 + " + quartic + " - 6*s^2 + 1)*" + B +
                          " + sigma*(4*s^3 - 8*r^2*s - 2*s)) / (" + (uncorrected ? "" : "(1 + 4*r^2)*") + den + ")";
    nlohmann::json j = {{"kind", "log_derivative"},
                        {"dlnphi_ds", a},
                        {"dlnphi_dr", b},
                        {"c0", uncorrected ? "exp(4*r^2)" : "1 + 4*r^2"},
                        {"branch", br}};
    Expectation e;
    e.berwald = false;
    e.einstein = true;
    e.flag_curvature = 0.0;
    return {std::string(id), with_echo(j, echo), SampleRange{}, e,
            "zero flag curvature, spray from c1 = -2, c = 2"};
  }

  if (id == "example_6_5") {
    const std::string phi =
        "sqrt((16*r^4 + 8*r^2 - 16*r^2*s^2 + 1 + sigma*4*s*sqrt((1 + 4*r^2)*(1 + 4*r^2 - 4*s^2)))/(1 + "
        "4*r^2)^2)";
    nlohmann::json j = {{"kind", "expr"}, {"phi", phi}, {"branch", br}};
    Expectation e;
    e.berwald = false;
    e.einstein = true;
    e.flag_curvature = -1.0;
    return {std::string(id), with_echo(j, echo), SampleRange{}, e,
            "flag curvature -1, spray from c1 = -2, c = 1"};
  }

  throw ConfigError("unknown catalog id \"" + std::string(id) + "\"");
}

}  // namespace finsler
