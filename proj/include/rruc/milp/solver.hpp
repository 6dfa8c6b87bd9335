#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rruc/milp/model.hpp"

namespace rruc::milp {

struct SolverConfig {
  std::string backend = "highs";
  double mip_gap = 1e-3;  // relative
  double time_limit = kInf;  // seconds per solve
  double big_m = 10.0;
  double feasibility_tol = 1e-7;  // primal feasibility handed to the backend
  int seed = 0;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

enum class SolveStatus : std::uint8_t { optimal, infeasible, unbounded, time_limit, error };

const char* to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::error;
  double objective = 0.0;
  std::vector<double> values;  // one per model variable
  /// Pure LPs only: derivative of the optimum with respect to the active
  /// bound of each row (so <= 0 for a binding `<=` row of a minimization).
  std::vector<double> row_duals;
  double gap = 0.0;
  double wall_time = 0.0;
  std::string message;

  [[nodiscard]] bool has_values() const { return !values.empty(); }
  [[nodiscard]] double value(VarId v) const { return values.at(v.index); }
};

/// Solves with the configured backend. Throws BackendError if the backend is
/// unavailable or misbehaves; solver-side failures come back as
/// SolveStatus::error with a message.
SolveOutcome solve(const Model& model, const SolverConfig& config);

/// Variable whose value sits at (or beyond) (1 - margin)·M_big in magnitude.
struct BigMWarning {
  std::size_t position = 0;  // index into the span that was checked
  double value = 0.0;
};

std::vector<BigMWarning> check_bigm_slack(std::span<const double> values, double big_m,
                                          double margin);
std::vector<BigMWarning> check_bigm_slack(const SolveOutcome& outcome, std::span<const VarId> vars,
                                          double big_m, double margin);

/// Version string of the linked backend.
std::string backend_version();

}  // namespace rruc::milp
