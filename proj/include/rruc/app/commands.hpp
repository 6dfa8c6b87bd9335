#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rruc/app/config.hpp"
#include "rruc/ccg/engine.hpp"
#include "rruc/oracles/oracles.hpp"

namespace rruc::app {

enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2, kBackendError = 3 };

/// One solved model (RRUC algorithm or baseline) with its scored risk.
struct ModelRun {
  std::string model;  // a1, a2, a3, extensive, duc, ruc
  ccg::RrucSolution solution;
  /// Quadrature risk of the solution's own band for RRUC; for DUC and RUC the
  /// risk of the band found by admissibility assessment at their commitment.
  double risk = 0.0;
  formulations::Matrix risk_band_upper, risk_band_lower;
  std::string message;

  [[nodiscard]] bool feasible() const { return solution.status != ccg::RunStatus::infeasible_risk_level; }
  [[nodiscard]] bool has_band() const { return model != "duc"; }
};

ModelRun solve_model(const Session& session, const std::string& model,
                     const ccg::IterationCallback& on_iteration = {});

/// Solution document: first-stage values, costs, iteration log.
std::string serialize_solution(const ModelRun& run, const Session& session);
struct StoredSolution {
  std::string model;
  std::string status;
  formulations::MasterSolution master;
  double risk = 0.0;
  std::vector<std::string> vertex_log;
};
StoredSolution load_solution_file(const std::filesystem::path& path);

/// Column contract of breakdown.csv.
std::string breakdown_header();
std::string breakdown_row(const ModelRun& run);

struct CommandOptions {
  std::optional<std::string> output_dir;  // overrides the config
  std::optional<std::string> algorithm;   // overrides the config
  bool dump_lp = false;
  std::ostream* log = nullptr;            // progress lines
};

struct CommandResult {
  int exit_code = kOk;
  std::string message;
  std::vector<std::filesystem::path> files;  // written, in order
};

CommandResult cmd_solve(const std::filesystem::path& case_path, const std::filesystem::path& config_path,
                        const CommandOptions& options);
CommandResult cmd_verify(const std::filesystem::path& case_path, const std::filesystem::path& config_path,
                         const std::filesystem::path& solution_path, const CommandOptions& options);
CommandResult cmd_evaluate(const std::filesystem::path& case_path, const std::filesystem::path& config_path,
                           const std::vector<std::filesystem::path>& solution_paths,
                           std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
                           const CommandOptions& options);
CommandResult cmd_sweep(const std::filesystem::path& case_path, const std::filesystem::path& config_path,
                        const std::vector<double>& levels, const CommandOptions& options);
CommandResult cmd_benchmark(const std::filesystem::path& case_path, const std::filesystem::path& config_path,
                            const CommandOptions& options);

}  // namespace rruc::app
