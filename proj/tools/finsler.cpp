// finsler <command> [options]; see README.md for the commands.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "finsler/cli.hpp"

namespace {

void add_common(CLI::App* cmd, finsler::CommandOptions& o, std::string& out_path) {
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--count", o.count, "Number of frames");
  cmd->add_option("--dim", o.dim, "Dimension n");
  cmd->add_option("--tol", o.tol, "Residual tolerance (oracle-compare: factor on its tolerances)");
  cmd->add_option("--out", out_path, "Also write the JSON report here");
  cmd->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
}

void add_spec(CLI::App* cmd, finsler::CommandOptions& o) {
  cmd->add_option("--spec", o.spec, "Metric: inline JSON, JSON file or catalog id")->required();
  cmd->add_option("--branch", o.branch, "Branch of a catalog id")->check(CLI::IsMember({"+", "-"}));
}

}  // namespace

int main(int argc, char** argv) {
  finsler::CommandOptions o;
  std::string out_path;
  CLI::App app{"Spherically symmetric Finsler metrics F = |y| phi(|x|, <x, y> / |y|)", "finsler"};
  app.set_version_flag("--version", finsler::kToolVersion);
  app.require_subcommand(1);

  CLI::App* eval = app.add_subcommand("eval", "F, g, g^-1, P and Q at one point");
  add_spec(eval, o);
  eval->add_option("--x", o.x, "Position, comma separated")->delimiter(',')->required();
  eval->add_option("--y", o.y, "Direction, comma separated")->delimiter(',')->required();
  add_common(eval, o, out_path);

  CLI::App* classify = app.add_subcommand("classify", "Berwald, Landsberg, constant flag curvature and Einstein verdicts");
  add_spec(classify, o);
  classify->add_option("--K", o.K, "Curvature for the cfc residuals (default: estimated)");
  add_common(classify, o, out_path);

  CLI::App* verify = app.add_subcommand("verify-examples", "Run the acceptance criteria");
  verify->add_option("--criteria", o.criteria, "Subset of criteria, comma separated")->delimiter(',');
  add_common(verify, o, out_path);

  CLI::App* construct = app.add_subcommand("construct", "Build a constant flag curvature metric from c1, g and c");
  construct->add_option("--config", o.config, "Pipeline configuration: inline JSON or file")->required();
  add_common(construct, o, out_path);

  CLI::App* oracle = app.add_subcommand("oracle-compare", "Closed forms against finite differences");
  add_spec(oracle, o);
  add_common(oracle, o, out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : finsler::kExitUsage;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    const finsler::CommandOutcome res = finsler::run_command(o);
    if (o.format == "json")
      std::cout << res.report.dump(2) << "\n";
    else
      std::cout << res.text;
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!(f << res.report.dump(2) << "\n")) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return finsler::kExitUsage;
      }
    }
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return finsler::exit_code_for(e);
  }
}
