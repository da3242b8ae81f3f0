#include "finsler/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finsler/classify.hpp"
#include "finsler/construct.hpp"
#include "finsler/error.hpp"
#include "finsler/metric.hpp"
#include "finsler/oracle.hpp"
#include "finsler/sampling.hpp"
#include "finsler/verify.hpp"

namespace finsler {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (int j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

json frame_json(const RadialFrame& f) {
  return {{"x", vec_json(f.x)}, {"y", vec_json(f.y)}, {"r", f.r}, {"s", f.s}, {"u", f.u}};
}

json header(const CommandOptions& opts) {
  return {{"schema", kReportSchema}, {"tool", {{"name", "finsler"}, {"version", kToolVersion}}},
          {"command", opts.command}};
}

int parse_sigma(const std::string& branch) {
  if (branch == "+") return 1;
  if (branch == "-") return -1;
  throw ConfigError("branch must be \"+\" or \"-\", got \"" + branch + "\"");
}

std::string g6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

CommandOutcome cmd_eval(const CommandOptions& opts) {
  if (opts.x.empty() || opts.y.empty()) throw ConfigError("eval needs --x and --y");
  if (opts.x.size() != opts.y.size()) throw ConfigError("--x and --y must have the same length");
  const ResolvedSpec rs = resolve_spec(opts.spec, opts.branch);
  const RadialFrame f = frame_from_ambient(to_vector(opts.x), to_vector(opts.y));
  const DomainVerdict dv = domain_check(rs.spec, f);
  if (!dv) throw DomainError(dv.reason);
  const Jet phi = phi_jet(rs.spec, BasePoint{f.r, f.s});
  const MetricTensorData g = metric_tensor(phi, f);
  const SprayData sp = spray_pq(phi, f);
  const double F = f.u * phi.value();

  CommandOutcome out;
  out.report = header(opts);
  out.report["spec"] = rs.spec.echo();
  out.report["frame"] = frame_json(f);
  out.report["result"] = {{"F", F},
                          {"phi", phi.value()},
                          {"g", mat_json(g.g)},
                          {"g_inv", mat_json(g.g_inv)},
                          {"positive_definite", g.positive_definite},
                          {"P", sp.p()},
                          {"Q", sp.q()},
                          {"G", vec_json(sp.G)}};
  std::ostringstream os;
  os << "F = " << g6(F) << "\nP = " << g6(sp.p()) << "\nQ = " << g6(sp.q())
     << "\npositive definite: " << (g.positive_definite ? "yes" : "no") << "\n";
  out.text = os.str();
  return out;
}

json property_json(const PropertyVerdict& v) {
  json j = {{"verdict", to_string(v.verdict)},
            {"max_residual", v.max_residual},
            {"max_interior", v.max_interior},
            {"threshold", v.threshold}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

// Expected verdict of the catalog against the measured one; unknown means no claim.
void compare(json& mismatches, const char* name, const std::optional<bool>& expected, Verdict got) {
  if (!expected || got == Verdict::Inconclusive) return;
  if (*expected != (got == Verdict::Holds))
    mismatches.push_back(std::string(name) + ": expected " + (*expected ? "holds" : "fails") + ", got " +
                         to_string(got));
}

CommandOutcome cmd_classify(const CommandOptions& opts) {
  const ResolvedSpec rs = resolve_spec(opts.spec, opts.branch);
  ClassifyOptions co;
  co.range = rs.range;
  co.sampling.dim = opts.dim;
  co.sampling.seed = opts.seed;
  co.sampling.count = opts.count.value_or(20);
  co.min_frames = std::min(co.min_frames, co.sampling.count);
  if (opts.tol) co.tol = *opts.tol;
  co.K = opts.K;
  const auto t0 = Clock::now();
  const Classification c = classify(rs.spec, co);
  const double elapsed = seconds_since(t0);

  CommandOutcome out;
  json& r = out.report = header(opts);
  r["spec"] = rs.spec.echo();
  r["sampling"] = {{"seed", opts.seed},
                   {"count", co.sampling.count},
                   {"dim", opts.dim},
                   {"range", {{"r", {co.range.r_lo, co.range.r_hi}}, {"s_over_r", {co.range.s_lo, co.range.s_hi}}}},
                   {"rejected", c.rejected},
                   {"skipped", c.skipped}};
  r["tolerances"] = {{"residual", co.tol}, {"boundary_band", co.boundary_band}, {"min_frames", co.min_frames}};
  json frames = json::array();
  for (const FrameResult& fr : c.frames) {
    frames.push_back({{"frame", frame_json(fr.frame)},
                      {"F", fr.F},
                      {"P", fr.P},
                      {"Q", fr.Q},
                      {"residuals",
                       {{"berwald", fr.residual.berwald},
                        {"landsberg", fr.residual.landsberg},
                        {"cfc", fr.residual.cfc},
                        {"einstein", fr.residual.einstein}}},
                      {"K_mean", fr.K_mean},
                      {"K_spread", fr.K_spread},
                      {"K_ricci", fr.K_ricci},
                      {"positive_definite", fr.positive_definite},
                      {"near_boundary", fr.near_boundary}});
  }
  r["frames"] = frames;
  r["verdicts"] = {{"berwald", property_json(c.berwald)},
                   {"landsberg", property_json(c.landsberg)},
                   {"cfc", property_json(c.cfc)},
                   {"einstein", property_json(c.einstein)},
                   {"K_estimate", c.K_estimate},
                   {"K_spread", c.K_spread}};
  r["warnings"] = c.warnings;
  json mismatches = json::array();
  if (rs.catalog_id) {
    const Expectation& e = rs.expected;
    compare(mismatches, "berwald", e.berwald, c.berwald.verdict);
    compare(mismatches, "landsberg", e.landsberg, c.landsberg.verdict);
    compare(mismatches, "einstein", e.einstein, c.einstein.verdict);
    if (e.flag_curvature) {
      if (c.cfc.verdict != Verdict::Holds)
        mismatches.push_back(std::string("cfc: expected holds, got ") + to_string(c.cfc.verdict));
      else if (std::abs(c.K_estimate - *e.flag_curvature) > std::max(co.tol, 1e-7))
        mismatches.push_back("K: expected " + g6(*e.flag_curvature) + ", got " + g6(c.K_estimate));
    }
    r["expected_mismatches"] = mismatches;
  }
  r["timing"] = {{"seconds", elapsed}};
  out.exit_code = mismatches.empty() ? kExitOk : kExitVerification;

  std::ostringstream os;
  os << "frames: " << c.frames.size() << " (rejected " << c.rejected << ", skipped " << c.skipped << ")\n";
  for (const auto& [name, v] : {std::pair<const char*, const PropertyVerdict*>{"berwald", &c.berwald},
                                {"landsberg", &c.landsberg},
                                {"cfc", &c.cfc},
                                {"einstein", &c.einstein}})
    os << name << ": " << to_string(v->verdict) << " (max residual " << g6(v->max_residual) << ")\n";
  os << "K estimate: " << g6(c.K_estimate) << " (spread " << g6(c.K_spread) << ")\n";
  for (const std::string& w : c.warnings) os << "warning: " << w << "\n";
  for (const auto& m : mismatches) os << "mismatch: " << m.get<std::string>() << "\n";
  out.text = os.str();
  return out;
}

CommandOutcome cmd_verify_examples(const CommandOptions& opts) {
  AcceptanceOptions ao;
  ao.seed = opts.seed;
  if (opts.count) ao.frames = *opts.count;
  std::vector<int> ids = opts.criteria;
  if (ids.empty())
    for (int i = 1; i <= acceptance_count(); ++i) ids.push_back(i);
  for (int id : ids)
    if (id < 1 || id > acceptance_count()) throw ConfigError("no acceptance criterion " + std::to_string(id));

  CommandOutcome out;
  json& r = out.report = header(opts);
  r["sampling"] = {{"seed", ao.seed}, {"frames", ao.frames}, {"oracle_frames", ao.oracle_frames}};
  json results = json::array();
  json timing = json::object();
  std::ostringstream os;
  bool all = true;
  for (int id : ids) {
    const CriterionResult c = run_criterion(id, ao);
    json j = to_json(c);
    timing[std::to_string(id)] = j["seconds"];
    j.erase("seconds");
    results.push_back(j);
    os << summary_line(c) << "\n";
    all = all && c.pass;
  }
  r["criteria"] = results;
  r["pass"] = all;
  r["timing"] = {{"criterion_seconds", timing}};
  out.text = os.str();
  out.exit_code = all ? kExitOk : kExitVerification;
  return out;
}

CommandOutcome cmd_construct(const CommandOptions& opts) {
  const std::string& text = opts.config.empty() ? opts.spec : opts.config;
  if (text.empty()) throw ConfigError("construct needs --config");
  json cfg_json;
  try {
    cfg_json = text.find('{') != std::string::npos ? json::parse(text) : json::parse(std::ifstream(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("construct config is not valid JSON: ") + e.what());
  }
  const ConstructConfig cfg = parse_construct_config(cfg_json);
  const auto t0 = Clock::now();
  const ConstructResult res = run_construct(cfg);
  const double elapsed = seconds_since(t0);

  CommandOutcome out;
  json& r = out.report = header(opts);
  r["construct"] = to_json(res);
  r["tolerances"] = {{"stage", cfg.tol}};
  r["timing"] = {{"seconds", elapsed}};
  const bool pass = res.ok() && res.verdict && res.verdict->pass;
  out.exit_code = pass ? kExitOk : kExitVerification;
  std::ostringstream os;
  os << "family: " << to_string(res.family) << "\n";
  if (res.Q) os << "Q = " << res.Q->to_string() << "\n";
  if (res.P) os << "P = " << res.P->to_string() << "\n";
  if (res.uw) os << "integrability defect: " << g6(res.integrability.max_defect) << "\n";
  if (res.verdict)
    os << "spray mismatch: " << g6(res.verdict->spray_mismatch) << "\nK = " << g6(res.verdict->K) << " (spread "
       << g6(res.verdict->K_spread) << ")\n";
  if (!res.ok()) os << "stopped at " << res.failed_stage << ": " << res.message << "\n";
  for (const std::string& w : res.warnings) os << "warning: " << w << "\n";
  out.text = os.str();
  return out;
}

CommandOutcome cmd_oracle_compare(const CommandOptions& opts) {
  const ResolvedSpec rs = resolve_spec(opts.spec, opts.branch);
  SampleOptions so;
  so.dim = opts.dim;
  so.seed = opts.seed;
  so.count = opts.count.value_or(5);
  const double scale = opts.tol.value_or(1.0);
  const double tol_spray = 1e-5 * scale, tol_riemann = 1e-4 * scale, tol_berwald = 1e-3 * scale;
  const auto t0 = Clock::now();
  const SampledFrames sampled = sample_frames(rs.spec, rs.range, so);

  CommandOutcome out;
  json& r = out.report = header(opts);
  r["spec"] = rs.spec.echo();
  r["sampling"] = {{"seed", opts.seed}, {"count", so.count}, {"dim", opts.dim}, {"rejected", sampled.rejected}};
  r["tolerances"] = {{"spray", tol_spray}, {"riemann", tol_riemann}, {"berwald", tol_berwald}};
  json frames = json::array();
  double worst[3] = {0, 0, 0};
  std::ostringstream os;
  for (const RadialFrame& f : sampled.frames) {
    const OracleComparison c = compare_with_oracle(rs.spec, f);
    worst[0] = std::max(worst[0], c.spray);
    worst[1] = std::max(worst[1], c.riemann);
    worst[2] = std::max(worst[2], c.berwald);
    frames.push_back(
        {{"frame", frame_json(f)}, {"spray", c.spray}, {"riemann", c.riemann}, {"berwald", c.berwald}});
    os << "r = " << g6(f.r) << ", s = " << g6(f.s) << ": spray " << g6(c.spray) << ", Riemann " << g6(c.riemann)
       << ", Berwald " << g6(c.berwald) << "\n";
  }
  const bool pass = worst[0] <= tol_spray && worst[1] <= tol_riemann && worst[2] <= tol_berwald;
  r["frames"] = frames;
  r["verdicts"] = {{"spray", worst[0]}, {"riemann", worst[1]}, {"berwald", worst[2]}, {"pass", pass}};
  r["timing"] = {{"seconds", seconds_since(t0)}};
  os << (pass ? "oracle agrees" : "oracle disagrees") << "\n";
  out.text = os.str();
  out.exit_code = pass ? kExitOk : kExitVerification;
  return out;
}

}  // namespace

ResolvedSpec resolve_spec(const std::string& text, const std::string& branch) {
  if (text.empty()) throw ConfigError("missing --spec");
  const std::vector<std::string>& ids = catalog_ids();
  if (std::find(ids.begin(), ids.end(), text) != ids.end()) {
    CatalogEntry e = catalog_get(text, json::object(), parse_sigma(branch));
    return {std::move(e.spec), e.range, e.id, e.expected};
  }
  json j;
  bool is_json = false;
  if (text.find('{') != std::string::npos) {
    try {
      j = json::parse(text);
      is_json = true;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
    }
  }
  if (is_json && j.is_object() && j.value("kind", "") == "catalog") {
    if (!j.contains("id") || !j["id"].is_string()) throw ConfigError("catalog spec needs a string \"id\"");
    CatalogEntry e = catalog_get(j["id"].get<std::string>(), j.value("params", json::object()), parse_branch(j));
    return {std::move(e.spec), e.range, e.id, e.expected};
  }
  return {is_json ? parse_metric_spec(j) : load_metric_spec(text), SampleRange{}, std::nullopt, Expectation{}};
}

CommandOutcome run_command(const CommandOptions& opts) {
  if (opts.format != "json" && opts.format != "text") throw ConfigError("--format must be json or text");
  if (opts.dim < 2) throw ConfigError("--dim must be at least 2");
  if (opts.count && *opts.count < 1) throw ConfigError("--count must be positive");
  if (opts.command == "eval") return cmd_eval(opts);
  if (opts.command == "classify") return cmd_classify(opts);
  if (opts.command == "verify-examples") return cmd_verify_examples(opts);
  if (opts.command == "construct") return cmd_construct(opts);
  if (opts.command == "oracle-compare") return cmd_oracle_compare(opts);
  throw ConfigError("unknown command \"" + opts.command + "\"");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kExitUsage;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const QuadratureError*>(&e)) return kExitDomain;
  if (dynamic_cast<const ConsistencyError*>(&e)) return kExitVerification;
  return kExitUsage;
}

json without_timing(json report) {
  if (report.is_object()) {
    report.erase("timing");
    for (auto& [key, value] : report.items()) value = without_timing(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = without_timing(value);
  }
  return report;
}

}  // namespace finsler
