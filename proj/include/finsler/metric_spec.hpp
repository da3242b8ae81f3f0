#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/frame.hpp"
#include "finsler/jet.hpp"
#include "json.hpp"

namespace finsler {

inline constexpr int kDefaultJetDegree = 7;
inline constexpr double kDefaultConeMargin = 1e-6;

// Symbol lists of the expression fields. Two-variable fields and c0 may use
// `sigma`, which is bound to the branch sign (+1 or -1).
const std::vector<std::string>& rs_symbols();  // r, s, sigma
const std::vector<std::string>& r_symbols();   // r, sigma
const std::vector<std::string>& t_symbols();   // t

/// A scalar function of (r, s) that can expand itself into a jet.
struct Field {
  std::function<Jet(BasePoint, int)> jet;
  /// Optional plain evaluation; falls back to a degree-0 jet.
  std::function<double(double, double)> value;

  Jet operator()(BasePoint b, int degree) const { return jet(b, degree); }
  double operator()(double r, double s) const {
    return value ? value(r, s) : jet(BasePoint{r, s}, 0).value();
  }
};

/// Field over rs_symbols(). A top-level quotient by `s` is treated as having
/// a removable singularity on s = 0: close to that line the jet comes from the
/// series of the numerator.
Field field_from_expr(const Expr& e, double sigma);

/// Jet of an expression over r_symbols(); constant in s.
Jet r_jet(const Expr& e, BasePoint base, int degree, double sigma);

/// phi given by a closed form in (r, s).
struct ClosedForm {
  Expr phi;
};

/// phi = psi(s^2 / (g + s^2 H)) * E * s with
///   g = exp(int (2/r - 2 r^3 c2)),  H = int 2 r c2 g,  E = exp(-int (2/r - r^3 c2)),
/// every integral taken from r_base.
struct BerwaldFamily {
  Expr psi;  // over t_symbols()
  Expr c2;   // over r_symbols()
  double r_base = 1.0;
};

/// phi from its two logarithmic derivatives:
///   ln phi(r, s) = ln c0(r) + int_0^s (ln phi)_s dσ.
/// Without c0 the s = 0 line is fixed by phi(r_ref, 0) = phi_ref and
/// (ln phi)_r integrated along it.
struct LogDerivative {
  Field dlnphi_ds;
  Field dlnphi_dr;
  std::function<double(double)> c0;
  double r_ref = 1.0;
  double phi_ref = 1.0;
  /// Relative tolerance of the cross-derivative check done with every jet.
  double consistency_tol = 1e-7;
};

class MetricSpec {
 public:
  using Form = std::variant<ClosedForm, BerwaldFamily, LogDerivative>;

  MetricSpec(Form form, int sigma = 1, nlohmann::json echo = nlohmann::json::object());

  const Form& form() const { return form_; }
  int sigma() const { return sigma_; }
  /// The JSON this spec was built from (or an equivalent description).
  const nlohmann::json& echo() const { return echo_; }
  std::string kind_name() const;

  /// Expressions over rs_symbols() / r_symbols() whose singular sets bound the
  /// admissible domain.
  std::vector<Expr> guards_rs;
  std::vector<Expr> guards_r;

 private:
  Form form_;
  int sigma_;
  nlohmann::json echo_;
};

/// Builds a spec from its JSON description:
///   {"kind": "expr", "phi": ...}
///   {"kind": "berwald_family", "psi": ..., "c2": ..., "r_base"?: 1}
///   {"kind": "log_derivative", "dlnphi_ds": ..., "dlnphi_dr": ..., "c0"?: ...,
///    "r_ref"?: 1, "phi_ref"?: 1}
///   {"kind": "catalog", "id": ..., "params"?: {...}}
/// plus an optional "branch": "+" | "-". Throws ConfigError.
MetricSpec parse_metric_spec(const nlohmann::json& j);
/// Accepts either inline JSON text or a path to a JSON file.
MetricSpec load_metric_spec(std::string_view text_or_path);

int parse_branch(const nlohmann::json& j);

/// Jet of phi at `base`. Throws DomainError, QuadratureError or, for
/// log-derivative specs whose pair is not a gradient, ConsistencyError.
Jet phi_jet(const MetricSpec& spec, BasePoint base, int degree = kDefaultJetDegree);
double phi_value(const MetricSpec& spec, double r, double s);

struct DomainVerdict {
  bool valid = true;
  std::string reason;
  explicit operator bool() const { return valid; }
};

/// Valid iff |s| < r (1 - margin), every guarded radicand and denominator
/// exceeds `margin` in size, and phi is finite and positive.
DomainVerdict domain_check(const MetricSpec& spec, double r, double s,
                           double margin = kDefaultConeMargin);
DomainVerdict domain_check(const MetricSpec& spec, const RadialFrame& frame,
                           double margin = kDefaultConeMargin);

}  // namespace finsler
