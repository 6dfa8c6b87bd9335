#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rruc/ccg/engine.hpp"
#include "rruc/formulations/scenario.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/milp/solver.hpp"
#include "rruc/risk/forecast_error.hpp"
#include "rruc/risk/risk_measure.hpp"

namespace rruc::app {

inline constexpr int kConfigSchemaVersion = 1;

/// Run configuration document. Prices are either per-period arrays or blocks
/// of periods ("periods": [first, last], 1-based and inclusive).
struct RunConfig {
  std::string algorithm = "a1";  // a1, a2, a3, extensive, duc, ruc
  formulations::Budget budget{1, 1};
  risk::Prices prices;
  double risk_limit = milp::kInf;  // "unbounded" in the document
  double penalty = 0.1;            // K
  std::vector<double> sigma;       // σ_m per farm
  double sigma_decay = 1.0;
  std::array<double, 3> alpha{0.005, 0.025, 0.495};
  int tangents_per_segment = 4;    // Z
  int cost_segments = 4;
  double reserve_rate = 0.1;       // DUC
  double ruc_confidence = 0.95;    // RUC band and rare-event reference band
  milp::SolverConfig solver;
  ccg::ConvergenceConfig convergence;
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::vector<double> risk_levels;               // sweep
  std::vector<formulations::Budget> benchmark_budgets;
  double mfrl_tol = 1.0;
  std::string output_dir = "out";

  /// Cross-checks against the case; throws InputError.
  void validate(const grid::PowerSystem& system) const;
};

RunConfig load_config(std::string_view document, int horizon);
RunConfig load_config_file(const std::filesystem::path& path, int horizon);
std::string serialize_config(const RunConfig& config);

/// A case and a config with everything derived from them.
struct Session {
  grid::PowerSystem system;
  RunConfig config;
  grid::Ptdf ptdf;
  risk::ForecastErrorModel errors;
  risk::RiskTangents risk;

  Session(grid::PowerSystem s, RunConfig c);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Problem view for the engine; points into this session.
  [[nodiscard]] ccg::Problem problem() const;
};

}  // namespace rruc::app
