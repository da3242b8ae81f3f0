#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "finsler/frame.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

namespace finsler {

/// Dense n^rank array, last index fastest.
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(int n, int rank);

  int dim() const { return n_; }
  int rank() const { return rank_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& operator()(int i, int j, int k) { return data_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(i * n_ + j) * n_ + k]; }
  double& operator()(int i, int j, int k, int l) { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double operator()(int i, int j, int k, int l) const { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }

  double max_abs() const;
  /// Largest difference under a permutation of the last three indices.
  double symmetry_defect() const;

 private:
  int n_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

/// P, Q and the derivatives the curvature formulas use, read off the jets.
struct SprayDerivatives {
  double P, P_r, P_s, P_rs, P_ss, P_sss;
  double Q, Q_r, Q_s, Q_rs, Q_ss, Q_sss;
};
SprayDerivatives spray_derivatives(const SprayData& spray);

struct BerwaldData {
  DenseTensor B;  // B^i_jkl
  /// Berwald system: s P_s - P, P_ss, s Q_ss - Q_s, Q_sss.
  std::array<double, 4> system;
};
BerwaldData berwald_tensor(const SprayData& spray, const RadialFrame& frame);

struct LandsbergData {
  double L1, L2, L3, L4, L5, L6;
  DenseTensor L;  // L_jkl
};
LandsbergData landsberg_tensor(const Jet& phi, const SprayData& spray, const RadialFrame& frame);

/// F_{y^j} = (phi - s phi_s) y^j / u + phi_s x^j.
Vector finsler_gradient(const Jet& phi, const RadialFrame& frame);
/// L_jkl = -1/2 F F_{y^i} B^i_jkl from any Berwald array.
DenseTensor landsberg_from_berwald(const Jet& phi, const RadialFrame& frame, const DenseTensor& B);

/// R^i_j = u^2 (R1 delta + R2 y^i y^j / u^2 + R3 x^i x^j + R4 x^i y^j / u + R5 x^j y^i / u).
struct RiemannData {
  double R1, R2, R3, R4, R5;
  Matrix R;
  double ric;  // u^2 ((n - 1) R1 + (r^2 - s^2) R3)
};
RiemannData riemann_tensor(const SprayData& spray, const RadialFrame& frame);

struct FlagCurvature {
  std::vector<double> samples;
  double mean = 0.0;
  double spread = 0.0;  // max - min
};
/// K over `m` random flags through y; transverse directions are made
/// g-orthogonal to y. Throws DomainError for a degenerate flag.
FlagCurvature flag_curvature(const MetricTensorData& metric, const RiemannData& riemann, const RadialFrame& frame,
                             int m = 4, std::uint64_t seed = 1);

/// Normalized residuals of the characterizing systems.
///   berwald:   the Berwald system divided by max(1, |P|, |Q|)
///   landsberg: (L1, L2) divided by max(1, |phi| |P_ss|)
///   cfc:       (R1 - K phi^2, R2 + K phi^2 relation, R3 relation) divided by phi^2
///   einstein:  (n - 1) R1 + (r^2 - s^2) R3 - (n - 1) K phi^2, divided by phi^2
struct ResidualReport {
  std::array<double, 4> berwald;
  std::array<double, 2> landsberg;
  std::array<double, 3> cfc;
  double einstein;
};
ResidualReport residuals(const Jet& phi, const SprayData& spray, const RadialFrame& frame, double K);

struct CurvatureReport {
  RadialFrame frame;
  Jet phi;
  MetricTensorData metric;
  SprayData spray;
  BerwaldData berwald;
  LandsbergData landsberg;
  RiemannData riemann;
  FlagCurvature flag;
  ResidualReport residual;
};

struct CurvatureOptions {
  int degree = kDefaultJetDegree;
  int flags = 4;
  std::uint64_t seed = 1;
  double K = 0.0;  // used by the cfc and einstein residuals
};

CurvatureReport curvature_report(const MetricSpec& spec, const RadialFrame& frame,
                                 const CurvatureOptions& opts = {});

}  // namespace finsler
