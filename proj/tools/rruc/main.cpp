// rruc: robust risk-constrained unit commitment from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rruc/app/commands.hpp"

namespace {

int report(const rruc::app::CommandResult& r) {
  for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
  if (!r.message.empty()) (r.exit_code == 0 ? std::cout : std::cerr) << r.message << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust risk-constrained unit commitment"};
  app.require_subcommand(1);

  std::string case_path, config_path;
  rruc::app::CommandOptions opts;
  bool quiet = false;
  std::optional<std::string> out_dir;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--case", case_path, "Case file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_flag("-q,--quiet", quiet, "No progress lines");
  };

  auto* solve = app.add_subcommand("solve", "Solve one model and write solution, breakdown and iteration log");
  common(solve);
  std::optional<std::string> algorithm;
  solve->add_option("--algorithm", algorithm, "a1, a2, a3, extensive, duc or ruc (overrides the config)");
  solve->add_flag("--dump-lp", opts.dump_lp, "Also write the initial master problem in LP format");

  auto* verify = app.add_subcommand("verify", "Re-check a stored solution against brute-force oracles");
  common(verify);
  std::string solution;
  verify->add_option("--solution", solution, "solution.json to check")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo rare-event loss of stored solutions");
  common(evaluate);
  std::vector<std::string> solutions;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  evaluate->add_option("--solution", solutions, "solution.json files, one row each")->required();
  evaluate->add_option("-n,--samples", samples, "Rare-event samples per solution");
  evaluate->add_option("--seed", seed, "Random seed");

  auto* sweep = app.add_subcommand("sweep", "Solve across risk levels and bracket the minimum feasible level");
  common(sweep);
  std::vector<double> levels;
  sweep->add_option("--levels", levels, "Risk levels in $ (default: risk_levels of the config)");

  auto* bench = app.add_subcommand("benchmark", "Time A1, A2 and A3 over the configured budgets");
  common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share exit code 1 with other input errors.
    return app.exit(e) == 0 ? 0 : rruc::app::kInputError;
  }

  opts.output_dir = out_dir;
  opts.algorithm = algorithm;
  if (!quiet) opts.log = &std::cerr;

  using namespace rruc::app;
  try {
    if (*solve) return report(cmd_solve(case_path, config_path, opts));
    if (*verify) return report(cmd_verify(case_path, config_path, solution, opts));
    if (*evaluate) {
      std::vector<std::filesystem::path> paths(solutions.begin(), solutions.end());
      return report(cmd_evaluate(case_path, config_path, paths, samples, seed, opts));
    }
    if (*sweep) return report(cmd_sweep(case_path, config_path, levels, opts));
    if (*bench) return report(cmd_benchmark(case_path, config_path, opts));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBackendError;
  }
  return kInputError;
}
