#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "centerward/errors.hpp"
#include "commands.hpp"

namespace cli = centerward::cli;

int main(int argc, char** argv) {
  CLI::App app{"centerward: center-outward quantile and distribution functions"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  long long seed = -1;
  int threads = 0;
  bool inline_solve = false;
  bool corrupt = false;
  std::vector<double> radii;

  auto global = [&](CLI::App* sub) {
    sub->add_option("--config,config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", threads, "solver threads (overrides CENTERWARD_THREADS and the config)")
        ->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "solve the transport problem and write map.json");
  global(solve);
  auto* contours = app.add_subcommand("contours", "extract quantile contours and check nestedness");
  global(contours);
  contours->add_option("--radii", radii, "contour radii in (0, 1); defaults to the config")->delimiter(',');
  contours->add_flag("--inline", inline_solve, "solve in-process instead of reading map.json");
  auto* verify = app.add_subcommand("verify", "run the diagnostics suite and write report.json");
  global(verify);
  verify->add_flag("--inline", inline_solve, "solve in-process instead of reading map.json");
  verify->add_flag("--corrupt-psi", corrupt, "")->group("");  // negative control, hidden
  auto* oracle = app.add_subcommand("oracle-compare", "compare map radii with the radial oracle");
  global(oracle);
  oracle->add_flag("--inline", inline_solve, "solve in-process instead of reading map.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  try {
    cli::Overrides o;
    if (!out.empty()) o.out = out;
    if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) o.threads = threads;
    const cli::RunConfig cfg = cli::resolve_config(config, o);
    if (solve->parsed()) return cli::cmd_solve(cfg, std::cout, std::cerr);
    if (contours->parsed()) return cli::cmd_contours(cfg, radii, inline_solve, std::cout, std::cerr);
    if (verify->parsed()) return cli::cmd_verify(cfg, inline_solve, corrupt, std::cout, std::cerr);
    if (oracle->parsed()) return cli::cmd_oracle_compare(cfg, inline_solve, std::cout, std::cerr);
  } catch (const centerward::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return cli::kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  }
  return cli::kUsage;
}
