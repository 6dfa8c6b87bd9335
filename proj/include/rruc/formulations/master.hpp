#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rruc/formulations/recourse.hpp"
#include "rruc/formulations/scenario.hpp"
#include "rruc/formulations/subproblem.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/milp/model.hpp"
#include "rruc/milp/solver.hpp"
#include "rruc/risk/risk_measure.hpp"

namespace rruc::formulations {

using Matrix = std::vector<std::vector<double>>;
using VarMatrix = std::vector<std::vector<milp::VarId>>;

enum class MasterObjective : std::uint8_t {
  cost,               // UC + ED cost only (DUC)
  cost_plus_penalty,  // UC + ED cost + K·ΣQ
  risk_only,          // ΣQ (admissibility assessment at fixed commitment)
};

struct MasterSettings {
  MasterObjective objective = MasterObjective::cost_plus_penalty;
  double risk_limit = milp::kInf;  // Risk_dh; +inf drops the row
  double penalty = 0.1;            // K
  int cost_segments = 4;
  /// Fixes the band (RUC). Empty means the band is a decision.
  std::optional<Matrix> fixed_upper;
  std::optional<Matrix> fixed_lower;
  /// Fixes the commitment (admissibility assessment).
  std::optional<Matrix> fixed_commitment;
  /// Spinning reserve Σ u·Pmax - Σ p̂ >= rate·ΣD (DUC).
  std::optional<double> reserve_rate;
};

/// Linear feasibility cut Σ a_u·u + Σ a_w·w <= rhs over master variables.
struct FeasibilityCut {
  std::vector<std::pair<std::size_t, double>> commitment;  // (g·T + t, coef)
  struct BandTerm {
    std::size_t farm_period = 0;
    bool upper = true;
    double coef = 0.0;
  };
  std::vector<BandTerm> band;
  double rhs = 0.0;

  /// Left side minus right side at a point; > 0 means the point is cut off.
  [[nodiscard]] double violation(const FirstStagePoint& p, int horizon) const;
};

/// Σ_i η_i (b_i(x, w∘v*) - b_i(x*, w*∘v*)) <= -R with b_i the right-hand side
/// of recourse row i. Throws ModelError when η is (numerically) zero.
FeasibilityCut make_feasibility_cut(const RecourseSystem& rs, const grid::PowerSystem& system,
                                    const std::vector<double>& eta, const FirstStagePoint& x_star,
                                    const ScenarioVertex& v, double residual);

struct MasterArtifacts {
  milp::Model model;
  MasterSettings settings;
  VarMatrix u, z, p;             // [g][t]
  VarMatrix w_upper, w_lower;    // [m][t]
  VarMatrix q_upper, q_lower;    // Q^p, Q^n, [m][t]
  milp::LinearExpr startup_cost, no_load_cost, energy_cost, risk_sum;
  std::vector<ScenarioVertex> scenario_cuts;
  std::size_t feasibility_cuts = 0;
  bool has_risk_row = false;
};

/// Penalized RRUC master without scenario rows: commitment logic, day-ahead dispatch at
/// forecast, band bounds, tangent rows and the risk budget.
MasterArtifacts build_master(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                             const risk::RiskTangents* risk, const MasterSettings& settings);

/// Fresh recourse copy y^k for vertex v, tied to (u, w) with zero slack.
/// `ptdf_recourse` must be the PTDF-form recourse system. Rejects duplicates.
void add_scenario_cut(MasterArtifacts& master, const grid::PowerSystem& system,
                      const RecourseSystem& ptdf_recourse, const ScenarioVertex& v);

void add_feasibility_cut(MasterArtifacts& master, const FeasibilityCut& cut);

struct MasterSolution {
  milp::SolveStatus status = milp::SolveStatus::error;
  double objective = 0.0;
  double gap = 0.0;
  double wall_time = 0.0;
  Matrix u, z, p, w_upper, w_lower, q_upper, q_lower;
  double startup_cost = 0.0;
  double no_load_cost = 0.0;
  double energy_cost = 0.0;
  double risk_envelope = 0.0;  // ΣQ

  [[nodiscard]] FirstStagePoint point() const { return {u, w_upper, w_lower}; }
  [[nodiscard]] double operational_cost() const { return startup_cost + no_load_cost + energy_cost; }
};

MasterSolution solve_master(const MasterArtifacts& master, const milp::SolverConfig& config);

/// Master with one zero-slack recourse block per vertex of the budget set.
MasterArtifacts build_extensive(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                                const risk::RiskTangents* risk, const MasterSettings& settings,
                                const std::vector<ScenarioVertex>& vertices);

/// Deterministic UC at forecast wind with a spinning-reserve requirement.
MasterArtifacts build_duc(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                          double reserve_rate, int cost_segments = 4);

struct Band {
  Matrix upper;  // [m][t]
  Matrix lower;
};

/// Fixed RUC band ŵ ± z·σ with z the (1+α)/2 Gaussian quantile, clipped to
/// [0, w_max].
Band build_ruc_bounds(const grid::PowerSystem& system, const Matrix& sigma, double confidence);

}  // namespace rruc::formulations
