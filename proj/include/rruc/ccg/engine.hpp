#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rruc/formulations/master.hpp"
#include "rruc/formulations/scenario.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/milp/solver.hpp"
#include "rruc/risk/risk_measure.hpp"

namespace rruc::ccg {

using formulations::Budget;
using formulations::Matrix;
using formulations::ScenarioVertex;

/// a1: PTDF subproblem; a2: nodal subproblem; a3: nodal subproblem plus a
/// feasibility cut per iteration.
enum class Algorithm : std::uint8_t { a1, a2, a3 };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct ConvergenceConfig {
  double feasibility_tol = 1e-3;              // ε_feas, MW
  std::optional<double> residual_change_tol;  // also stop when |R_{k+1} - R_k| falls below
  int max_iterations = 100;
  double time_limit = milp::kInf;             // whole run, seconds

  void validate() const;
};

enum class RunStatus : std::uint8_t { converged, infeasible_risk_level, iteration_limit, time_limit };

const char* to_string(RunStatus s);

struct IterationRecord {
  int iteration = 0;
  double master_objective = 0.0;
  double residual = 0.0;  // R, MW
  ScenarioVertex vertex;
  double master_time = 0.0;
  double subproblem_time = 0.0;
  std::size_t scenario_cuts = 0;     // cumulative
  std::size_t feasibility_cuts = 0;  // cumulative
  std::size_t bigm_warnings = 0;
  std::string note;
};

/// Everything needed to state one RRUC instance.
struct Problem {
  const grid::PowerSystem* system = nullptr;
  const grid::Ptdf* ptdf = nullptr;
  const risk::RiskTangents* risk = nullptr;
  risk::Prices prices;
  Budget budget;
  formulations::MasterSettings master;
};

struct RrucSolution {
  RunStatus status = RunStatus::iteration_limit;
  Algorithm algorithm = Algorithm::a1;
  formulations::MasterSolution master;  // last master solution
  double penalty_cost = 0.0;            // K·ΣQ
  double risk_exact = 0.0;              // quadrature risk of the final band, $
  double final_residual = 0.0;
  std::vector<IterationRecord> log;
  double wall_time = 0.0;
  double master_time = 0.0;
  double subproblem_time = 0.0;
  std::size_t subproblem_auxiliaries = 0;

  [[nodiscard]] int iterations() const { return static_cast<int>(log.size()); }
  [[nodiscard]] double objective() const { return master.objective; }
};

using IterationCallback = std::function<void(const IterationRecord&)>;

RrucSolution run(Algorithm algorithm, const Problem& problem, const milp::SolverConfig& solver,
                 const ConvergenceConfig& convergence, const IterationCallback& on_iteration = {});

inline RrucSolution run_a1(const Problem& p, const milp::SolverConfig& s, const ConvergenceConfig& c) {
  return run(Algorithm::a1, p, s, c);
}
inline RrucSolution run_a2(const Problem& p, const milp::SolverConfig& s, const ConvergenceConfig& c) {
  return run(Algorithm::a2, p, s, c);
}
inline RrucSolution run_a3(const Problem& p, const milp::SolverConfig& s, const ConvergenceConfig& c) {
  return run(Algorithm::a3, p, s, c);
}

/// Master with every vertex of the budget polytope as a recourse block.
RrucSolution run_extensive(const Problem& problem, const milp::SolverConfig& solver,
                           std::size_t vertex_cap = 20000);

struct Admissibility {
  RunStatus status = RunStatus::iteration_limit;
  Matrix w_upper, w_lower;
  double risk_envelope = 0.0;  // ΣQ, $
  double risk_exact = 0.0;     // quadrature, $
  int iterations = 0;
};

/// Widest risk-minimal admissible band for a fixed commitment: binaries
/// frozen at u, objective ΣQ, robustness enforced by C&CG. Throws ModelError
/// when u cannot serve even the forecast.
Admissibility assess_admissibility(const Problem& problem, const Matrix& u, const milp::SolverConfig& solver,
                                   const ConvergenceConfig& convergence, Algorithm algorithm = Algorithm::a1);

struct SweepPoint {
  double level = 0.0;  // Risk_dh, $
  RunStatus status = RunStatus::iteration_limit;
  double cost = 0.0;   // UC + ED cost, $
  double risk = 0.0;   // ΣQ, $
  int iterations = 0;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  /// Bisection bracket on the minimum feasible risk level.
  std::optional<double> mfrl;
  double feasible_bound = 0.0;
  double infeasible_bound = 0.0;
  int bisection_steps = 0;
};

/// Levels must be sorted descending. A single level gives a one-row report
/// without MFRL. Throws ModelError when every level is infeasible.
SweepReport sweep_risk_levels(const Problem& problem, const std::vector<double>& levels,
                              const milp::SolverConfig& solver, const ConvergenceConfig& convergence,
                              Algorithm algorithm = Algorithm::a1, double bisection_tol = 1.0);

}  // namespace rruc::ccg
