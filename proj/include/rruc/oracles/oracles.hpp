#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rruc/formulations/master.hpp"
#include "rruc/formulations/scenario.hpp"
#include "rruc/grid/power_system.hpp"
#include "rruc/risk/forecast_error.hpp"
#include "rruc/risk/risk_measure.hpp"

namespace rruc::oracles {

using formulations::Budget;
using formulations::Matrix;
using formulations::ScenarioVertex;

/// Serial reference or OpenMP-parallel evaluation. Both give identical numbers.
enum class Execution : std::uint8_t { serial, parallel };

/// Vertices of the budget polytope in lexicographic order of (m, t, sign)
/// with 0 < + < -. Throws InputError when more than `cap` vertices exist.
std::vector<ScenarioVertex> enumerate_vertices(int farms, int periods, const Budget& budget,
                                               std::size_t cap = 20000);

enum class CurtailmentBound : std::uint8_t { installed, realized };

struct RecourseLpResult {
  bool feasible = false;
  double objective = 0.0;
  double curtailment = 0.0;  // Σ Δw, MW
  double shed = 0.0;         // Σ ΔD, MW
  double curtailment_loss = 0.0;  // Σ e_t Δw, $
  double shed_loss = 0.0;         // Σ f_t ΔD, $
  Matrix p;  // [g][t]
};

/// Second-stage LP with the nodal network model, built straight from the
/// system data. Unit slack weights when `prices` is null, e_t and f_t
/// otherwise.
RecourseLpResult recourse_lp(const grid::PowerSystem& system, const Matrix& u, const Matrix& wind,
                             const risk::Prices* prices = nullptr,
                             CurtailmentBound bound = CurtailmentBound::installed);

struct WorstCase {
  double residual = 0.0;  // R*, +inf when some vertex has no recourse at all
  ScenarioVertex vertex;
  std::size_t evaluated = 0;
  std::vector<double> residuals;  // per enumerated vertex
};

/// max over all vertices of the unit-weight recourse LP; the first vertex in
/// enumeration order within 1e-9 of the maximum wins.
WorstCase brute_force_worst_case(const grid::PowerSystem& system, const Matrix& u, const Matrix& w_upper,
                                 const Matrix& w_lower, const Budget& budget,
                                 Execution exec = Execution::parallel, std::size_t cap = 20000);

struct EvaluationReport {
  std::size_t samples = 0;  // kept (rare-event) samples
  std::size_t draws = 0;    // total draws including rejected ones
  double average_loss = 0.0;
  double average_curtailment_loss = 0.0;
  double average_shed_loss = 0.0;
  double infeasible_share = 0.0;
};

struct MonteCarloSettings {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  /// Give up once this many draws per requested sample were rejected.
  std::size_t max_draws_per_sample = 1000;
};

/// Rare-event loss: Gaussian trajectories clipped to [0, w_max], samples
/// entirely inside the reference band rejected, the rest re-dispatched at
/// commitment u with the price-weighted recourse LP. Throws ModelError when the
/// band leaves nothing to sample.
EvaluationReport monte_carlo_rare_event_loss(const grid::PowerSystem& system, const Matrix& u,
                                             const Matrix& band_upper, const Matrix& band_lower,
                                             const risk::ForecastErrorModel& errors,
                                             const risk::Prices& prices, const MonteCarloSettings& settings,
                                             Execution exec = Execution::parallel);

/// Draws the kept samples only (realized wind, [sample][m][t]); shared by the
/// evaluator so serial and parallel runs see the same stream.
std::vector<Matrix> draw_rare_events(const grid::PowerSystem& system, const Matrix& band_upper,
                                     const Matrix& band_lower, const risk::ForecastErrorModel& errors,
                                     const MonteCarloSettings& settings, std::size_t* draws = nullptr);

struct Finding {
  std::string item;
  bool passed = true;
  std::string detail;
};

struct Verdict {
  std::vector<Finding> findings;
  [[nodiscard]] bool passed() const;
};

struct VerifySettings {
  double feasibility_tol = 1e-6;  // constraint replay, MW
  double robustness_tol = 1e-3;   // ε_feas, MW
  double risk_limit = milp::kInf;
  /// ΣQ is expected to sit on the envelope (true whenever K > 0).
  bool tight_risk = true;
  Execution exec = Execution::parallel;
};

/// Replays the first-stage constraints, re-verifies robustness by brute force
/// and compares ΣQ with the quadrature risk.
Verdict verify_solution(const formulations::MasterSolution& solution, const grid::PowerSystem& system,
                        const risk::RiskTangents& risk, const risk::Prices& prices, const Budget& budget,
                        const VerifySettings& settings);

}  // namespace rruc::oracles
