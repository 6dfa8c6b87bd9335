#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rruc/grid/dc_network.hpp"
#include "rruc/grid/power_system.hpp"

namespace rruc::formulations {

/// Network model of the second stage: PTDF sensitivities or nodal balance
/// with phase angles.
enum class NetworkForm : std::uint8_t { ptdf, nodal };

/// Upper bound on curtailment Δw. `installed` caps it at w_max, which keeps
/// the row free of uncertainty; `realized` caps it at the realized output.
/// Both give the same zero-slack feasibility set.
enum class CurtailmentCap : std::uint8_t { installed, realized };

enum class RowKind : std::uint8_t {
  gen_max,
  gen_min,
  ramp_down,
  ramp_up,
  balance_le,
  balance_ge,
  flow_le,
  flow_ge,
  node_le,
  node_ge,
  angle_le,
  angle_ge,
  ref_le,
  ref_ge,
  shed_cap,
  curtail_cap,
};

const char* to_string(RowKind k);

enum class ColumnKind : std::uint8_t { gen, curtail, shed, angle };

/// A second-stage variable: generator output p_gt, curtailment Δw_mt, shed
/// load ΔD_jt or phase angle θ_nt.
struct Column {
  ColumnKind kind = ColumnKind::gen;
  std::size_t index = 0;  // generator, farm, load or bus
  int t = 0;
  bool free = false;      // θ is free, everything else is >= 0
  bool slack = false;     // Δw and ΔD are the slacks s of the compact form
};

using Coefs = std::vector<std::pair<std::size_t, double>>;

/// One row of the second-stage system
///   Σ lhs_k·y_k  <=  constant + Σ u_coef·u_gt + Σ w_coef·w_mt
/// with u indexed g·T+t and w (realized wind) indexed m·T+t. `wind` lists every
/// structurally present farm entry, including numerically zero PTDF factors.
struct Row {
  RowKind kind = RowKind::gen_max;
  std::size_t index = 0;  // generator, line, bus, load or farm the row belongs to
  int t = 0;
  Coefs lhs;
  double constant = 0.0;
  Coefs commitment;
  Coefs wind;

  [[nodiscard]] std::string name() const;
};

/// The recourse set Ω in one network form, independent of first-stage values.
struct RecourseSystem {
  NetworkForm form = NetworkForm::ptdf;
  CurtailmentCap cap = CurtailmentCap::installed;
  int horizon = 0;
  std::size_t num_generators = 0;
  std::size_t num_farms = 0;
  std::vector<Column> columns;
  std::vector<Row> rows;

  /// Right-hand side at fixed commitment and realized wind ([g][t], [m][t]).
  [[nodiscard]] double rhs(const Row& row, const std::vector<std::vector<double>>& u,
                           const std::vector<std::vector<double>>& w) const;
};

RecourseSystem build_recourse(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                              NetworkForm form, CurtailmentCap cap = CurtailmentCap::installed);

/// Primal recourse LP over one realized wind profile, solved through the MILP
/// backend. Slack columns cost `curtail_cost[t]` / `shed_cost[t]` (unit costs
/// give the feasibility residual R).
struct RecourseOutcome {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;  // per column
  std::vector<double> duals;   // per row, <= 0
};

RecourseOutcome solve_recourse(const RecourseSystem& rs, const std::vector<std::vector<double>>& u,
                               const std::vector<std::vector<double>>& w,
                               const std::vector<double>& curtail_cost,
                               const std::vector<double>& shed_cost);

}  // namespace rruc::formulations
