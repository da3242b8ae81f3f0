#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "finsler/metric_spec.hpp"
#include "finsler/oracle.hpp"
#include "json.hpp"

namespace finsler {

/// One measured quantity of an acceptance criterion.
struct CheckRow {
  std::string subject;
  double measured = 0.0;
  double threshold = 0.0;
  /// true: measured must not exceed threshold; false: it must exceed it.
  bool at_most = true;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<CheckRow> rows;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int frames = 50;         // criteria 1 to 6
  int oracle_frames = 10;  // criterion 7, per catalog entry
};

/// Errors of the closed forms against the finite-difference oracle at one
/// frame. Each is relative on the dominant entries of the closed form; when
/// the closed form is smaller than its natural scale (a vanishing Berwald or
/// Riemann tensor) the absolute error is divided by that scale instead.
struct OracleComparison {
  double spray = 0.0;
  double berwald = 0.0;
  double riemann = 0.0;
};
OracleComparison compare_with_oracle(const MetricSpec& spec, const RadialFrame& frame, const FDConfig& cfg = {});

/// Coefficients (L1, ..., L6) of a Landsberg array in the basis
/// -1/2 phi {x x x, x delta, y y y, y delta, y x x, x y y} (y normalized),
/// by least squares; `misfit` is the part outside the span, relative to the
/// array's largest entry.
struct LandsbergFit {
  double L[6] = {};
  double misfit = 0.0;
};
LandsbergFit fit_landsberg(const DenseTensor& L, double phi, const RadialFrame& frame);

int acceptance_count();
std::string acceptance_title(int id);
/// Runs criterion `id` (1 to 10). Throws std::out_of_range for other ids.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// "[PASS] 3 title (n checks, worst ...)" style summary line.
std::string summary_line(const CriterionResult& c);
nlohmann::json to_json(const CriterionResult& c);

}  // namespace finsler
