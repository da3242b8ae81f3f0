#pragma once

// Command logic behind the `finsler` executable, kept in the library so the
// reports can be produced and checked without a process boundary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finsler/catalog.hpp"
#include "finsler/metric_spec.hpp"
#include "json.hpp"

namespace finsler {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDomain = 2, kExitVerification = 3 };

struct CommandOptions {
  std::string command;  // eval, classify, verify-examples, construct, oracle-compare
  /// Inline JSON, a path to a JSON file, or a bare catalog id.
  std::string spec;
  /// "+" or "-"; applies to bare catalog ids.
  std::string branch = "+";
  /// Pipeline configuration of `construct`: inline JSON or a path.
  std::string config;
  std::uint64_t seed = 1;
  std::optional<int> count;
  int dim = 3;
  std::optional<double> tol;
  std::optional<double> K;
  std::vector<double> x, y;
  std::vector<int> criteria;  // verify-examples; empty means all
  std::string format = "json";
};

/// A metric together with what the catalog knows about it, if it came from there.
struct ResolvedSpec {
  MetricSpec spec;
  SampleRange range;
  std::optional<std::string> catalog_id;
  Expectation expected;
};
/// Throws ConfigError or ParseError.
ResolvedSpec resolve_spec(const std::string& text, const std::string& branch = "+");

struct CommandOutcome {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::string text;  // the same content for people
};

/// Runs one command. Library errors propagate; map them with exit_code_for.
CommandOutcome run_command(const CommandOptions& opts);

/// ConfigError and ParseError: 1, DomainError and QuadratureError: 2,
/// ConsistencyError: 3, anything else: 1.
int exit_code_for(const std::exception& e);

/// Report without its "timing" members, for comparisons.
nlohmann::json without_timing(nlohmann::json report);

}  // namespace finsler
