#pragma once

// The four-step construction of non-projective metrics of constant flag
// curvature: Q from c1(r), Theta = P - s P_s from the linear first-order
// equation, P = g(r) s + particular part, then phi from the U/W inversion.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/expr.hpp"
#include "finsler/metric_spec.hpp"
#include "json.hpp"

namespace finsler {

/// Closed forms are known for c1 = -1/r and c1 = -2.
enum class ThetaFamily { None, InverseR, ConstantMinus2 };
const char* to_string(ThetaFamily f);

struct ConstructGrid {
  double r_lo = 0.5, r_hi = 2.0;
  int r_n = 10;
  double s_lo = -0.9, s_hi = 0.9;  // fractions of r
  int s_n = 10;
  std::vector<BasePoint> points() const;
};

struct ConstructConfig {
  std::string c1;
  std::string g_free = "auto";  // or an expression in r
  double c = 2.0;
  int branch = 1;
  std::optional<double> K_hypothesis;
  ConstructGrid grid;
  double r_ref = 1.0;
  double phi_ref = 1.0;
  /// Initial data Theta(r0, s) for the characteristic solver, over (r, s, sigma).
  /// Defaults to the closed form when one is known, else to the constant c.
  std::optional<std::string> theta0;
  double r0 = 1.0;
  double tol = 1e-7;
};

/// {"c1", "g_free"?, "c"?, "branch"?, "K_hypothesis"?, "grid"?: {"r": [lo, hi, n],
/// "s_frac": [lo, hi, n]}, "r_ref"?, "phi_ref"?, "theta0"?, "r0"?, "tol"?}.
/// Throws ConfigError.
ConstructConfig parse_construct_config(const nlohmann::json& j);
nlohmann::json to_json(const ConstructConfig& c);

/// Q = c1 + (c1' + 2 r c1^2) / (r - 2 r^3 c1) s^2 over rs_symbols(). Throws
/// DomainError when r - 2 r^3 c1 vanishes on [r_lo, r_hi].
Expr q_from_c1(const Expr& c1, double r_lo, double r_hi, double sigma = 1.0);

/// Third equation of the constant flag curvature system, divided by max(1, Q^2).
double q_residual(const Expr& Q, double r, double s, double sigma = 1.0);

ThetaFamily detect_family(const Expr& c1, double sigma = 1.0);

/// Theta = P - s P_s on the two known families, with free constant c (the
/// branch sign multiplies c through `sigma`).
Expr theta_closed_form(ThetaFamily family, double c);
/// The particular P with P - s P_s = Theta.
Expr particular_p(ThetaFamily family, double c);
/// g(r) for which the U/W pair is integrable on the family.
Expr auto_g(ThetaFamily family, double c);

/// Theta by integrating the characteristics of
///   Theta_r + 2r (1 - 2 (r^2 - w) Q) Theta_w = -2 r Q Theta,  w = s^2,
/// back to the line r = r0 with classical RK4. Q must be even in s, which
/// the Step 1 ansatz always is.
class CharacteristicTheta {
 public:
  CharacteristicTheta(Expr Q, Expr theta0, double r0, double sigma, double max_step = 1e-3);
  /// Throws DomainError when the characteristic leaves the cone 0 <= w < r^2.
  double operator()(double r, double s) const;
  /// Smallest min(w, r^2 - w) / r^2 along the characteristic; values near 0
  /// mean (r, s) sits at the edge of the region the data on r = r0 reaches.
  double margin(double r, double s) const;

 private:
  double trace(double r, double s, double* margin) const;

  Expr Q_, theta0_;
  double r0_, sigma_, max_step_;
};

/// Rewritten second equation
///   Theta_r / (2r) + Theta Q - (r^2 - s^2)/s Theta_s Q + Theta_s / (2s)
/// divided by max(1, |Theta|). Derivatives of `theta` by central differences.
double theta_residual(const std::function<double(double, double)>& theta, const Expr& Q, double r, double s,
                      double sigma = 1.0);
double theta_residual(const Expr& theta, const Expr& Q, double r, double s, double sigma = 1.0);

/// P = g s + Pi with Pi = -s * int_{s0}^{s} Theta(r, t) / t^2 dt, s0 = r/2.
/// Only for 0 < s; the closed-form branch covers the rest.
double p_numeric(const std::function<double(double, double)>& theta, const Expr& g, double r, double s,
                 double sigma = 1.0);

struct UWData {
  Expr U, W;
  Expr dlnphi_ds;
  Expr dlnphi_dr;  // top-level quotient by s, removable on s = 0
};

/// U = (s + (2r^2 - s^2) P - s (r^2 - s^2) P_s) / (1 + s P - 2 (r^2 - s^2) Q + s (r^2 - s^2) Q_s),
/// W = 2r (P + Q U), (ln phi)_s = (U - s)/(r^2 - s^2), (ln phi)_r = (W - r (ln phi)_s)/s.
UWData uw_invert(const Expr& P, const Expr& Q);

struct IntegrabilityReport {
  double max_defect = 0.0;  // max |d_r (ln phi)_s - d_s (ln phi)_r| / scale
  double scale = 1.0;
  BasePoint worst{};
  bool pass = false;
};

IntegrabilityReport integrability_check(const Expr& dlnphi_ds, const Expr& dlnphi_dr,
                                        const std::vector<BasePoint>& grid, double sigma, double tol = 1e-7);

/// Log-derivative spec with c0 fixed by phi(r_ref, 0) = phi_ref.
MetricSpec phi_recover(const UWData& uw, int sigma, double r_ref = 1.0, double phi_ref = 1.0);

/// (ln c0)'(r) = (ln phi)_r (r, 0).
double log_c0_derivative(const MetricSpec& recovered, double r);

/// Left side of the first equation,
///   2Q - (s/r) P_r - P_s + 2 (r^2 - s^2) P_s Q + P^2 + 2 s P Q,  which equals K phi^2.
Expr first_equation(const Expr& P, const Expr& Q);

struct ConstructVerdict {
  double spray_mismatch = 0.0;  // max relative (P, Q) difference, Step 4
  bool flat = false;            // first equation vanishes identically on the grid
  double first_equation_max = 0.0;
  double K = 0.0;  // of the recovered metric
  double K_spread = 0.0;
  /// phi^2 = (first equation) / K when K is nonzero.
  std::optional<Expr> solved_phi2;
  double cfc_residual = 0.0;
  bool pass = false;
};

ConstructVerdict classify_constructed(const MetricSpec& recovered, const Expr& P, const Expr& Q,
                                      const std::vector<BasePoint>& grid, std::optional<double> K_hypothesis,
                                      double tol = 1e-7);

/// Pipeline stages, in order.
inline constexpr const char* kConstructStages[] = {"q", "theta", "p", "uw", "integrability", "recover", "spray",
                                                   "curvature"};

struct ConstructResult {
  ConstructConfig config;
  ThetaFamily family = ThetaFamily::None;
  std::optional<Expr> Q, theta, g, P;
  double q_residual = 0.0;
  double theta_residual = 0.0;
  std::optional<UWData> uw;
  IntegrabilityReport integrability;
  std::optional<MetricSpec> recovered;
  std::optional<ConstructVerdict> verdict;
  std::vector<std::string> warnings;
  /// Empty on success, else the stage that stopped the pipeline.
  std::string failed_stage;
  std::string message;
  bool ok() const { return failed_stage.empty(); }
};

/// Runs every stage; a failing stage is recorded, not thrown. ConfigError
/// still propagates for unparsable expressions.
ConstructResult run_construct(const ConstructConfig& config);
nlohmann::json to_json(const ConstructResult& r);

}  // namespace finsler
