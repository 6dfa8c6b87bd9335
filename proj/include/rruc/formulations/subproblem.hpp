#pragma once

#include <vector>

#include "rruc/formulations/recourse.hpp"
#include "rruc/formulations/scenario.hpp"
#include "rruc/milp/model.hpp"
#include "rruc/milp/solver.hpp"

namespace rruc::formulations {

/// First-stage values the checking subproblem is evaluated at.
struct FirstStagePoint {
  std::vector<std::vector<double>> u;        // [g][t]
  std::vector<std::vector<double>> w_upper;  // [m][t]
  std::vector<std::vector<double>> w_lower;  // [m][t]
};

/// One bilinear term λ_i·v_j replaced by an auxiliary variable.
struct Product {
  std::size_t row = 0;
  std::size_t farm_period = 0;  // m·T + t
  bool upper = true;            // v^u or v^l
  double coef = 0.0;            // objective coefficient of the auxiliary
  milp::VarId aux;
};

/// Big-M dual of the feasibility-and-admissibility check at a fixed point:
///   max Σ λ_i b_i(u*, ŵ) + Σ coef_ij γ_ij
///   s.t. Aᵀλ <= c (= c for free columns), -M <= λ <= 0, budget rows on v,
///        -M v <= γ <= 0, -M(1 - v) <= λ - γ <= 0.
struct SubproblemArtifacts {
  milp::Model model;
  NetworkForm form = NetworkForm::ptdf;
  std::vector<milp::VarId> v_up;    // [m·T + t]
  std::vector<milp::VarId> v_down;  // [m·T + t]
  std::vector<milp::VarId> duals;   // one per recourse row
  std::vector<Product> products;

  [[nodiscard]] std::size_t num_binaries() const { return v_up.size() + v_down.size(); }
  [[nodiscard]] std::size_t num_duals() const { return duals.size(); }
  [[nodiscard]] std::size_t num_auxiliaries() const { return products.size(); }
};

SubproblemArtifacts build_subproblem(const RecourseSystem& rs, const grid::PowerSystem& system,
                                     const FirstStagePoint& point, const Budget& budget,
                                     double big_m);

/// Realized wind of a vertex: ŵ + (w^u - ŵ)v^u + (w^l - ŵ)v^l.
std::vector<std::vector<double>> realized_wind(const grid::PowerSystem& system,
                                               const FirstStagePoint& point,
                                               const ScenarioVertex& v);

struct SubproblemResult {
  milp::SolveStatus status = milp::SolveStatus::error;
  ScenarioVertex vertex;
  double residual = 0.0;        // R: min Σ(Δw + ΔD) at the chosen vertex, MW
  double milp_objective = 0.0;  // big-M objective, equals R when M is not binding
  bool recourse_feasible = true;
  std::vector<double> row_duals;  // optimal inner-LP duals at the vertex (η or λ)
  std::vector<milp::BigMWarning> bigm_warnings;
  std::size_t num_auxiliaries = 0;
  double wall_time = 0.0;
};

/// Builds and solves the subproblem, then re-solves the inner LP at the chosen
/// vertex to obtain R and a dual vector free of big-M artefacts; M_big binding
/// is judged on that dual vector.
SubproblemResult solve_subproblem(const RecourseSystem& rs, const grid::PowerSystem& system,
                                  const FirstStagePoint& point, const Budget& budget,
                                  const milp::SolverConfig& config, double bigm_margin = 0.01);

}  // namespace rruc::formulations
