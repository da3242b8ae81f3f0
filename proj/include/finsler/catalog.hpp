#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/metric_spec.hpp"
#include "finsler/sampling.hpp"
#include "json.hpp"

namespace finsler {

/// Classifications a catalog metric is known to have. Unset fields make no
/// claim.
struct Expectation {
  std::optional<bool> berwald;
  std::optional<bool> landsberg;
  std::optional<bool> einstein;
  std::optional<double> flag_curvature;
};

struct CatalogEntry {
  std::string id;
  MetricSpec spec;
  SampleRange range;
  Expectation expected;
  std::string description;
};

/// Known ids:
///   euclidean
///   riemannian_quadratic  params c1, c2 (numbers): phi = sqrt(c1 s^2 + 2 c2)
///   berwald_family        params psi (in t), c2 (in r), r_base
///   unicorn_candidate     params c0q, c1, c2, c3 (numbers or expressions in r);
///                         c0q is the s^2 coefficient of Q and the branch
///                         flips the sign of c2
///   example_6_1, example_6_2, example_6_4, example_6_5
///                         zero / negative constant flag curvature examples;
///                         example_6_4 accepts {"uncorrected": true} for the
///                         uncorrected log-derivative pair; example_6_2
///                         accepts phi2_scale (whole phi^2) and s2_scale
///                         (its s^2 coefficient) for perturbed copies
/// Throws ConfigError on unknown ids or bad parameters.
CatalogEntry catalog_get(std::string_view id, const nlohmann::json& params = nlohmann::json::object(),
                         int sigma = 1);

const std::vector<std::string>& catalog_ids();

}  // namespace finsler
