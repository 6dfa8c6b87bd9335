#include "rruc/formulations/subproblem.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "rruc/error.hpp"

namespace rruc::formulations {

namespace {

void check_point(const grid::PowerSystem& s, const FirstStagePoint& p) {
  const auto T = static_cast<std::size_t>(s.horizon());
  if (p.u.size() != s.num_generators() || p.w_upper.size() != s.num_wind() ||
      p.w_lower.size() != s.num_wind())
    throw ModelError("first-stage point does not match the system");
  for (const auto& r : p.u)
    if (r.size() != T) throw ModelError("commitment series length differs from horizon");
  for (std::size_t m = 0; m < s.num_wind(); ++m)
    if (p.w_upper[m].size() != T || p.w_lower[m].size() != T)
      throw ModelError("band series length differs from horizon");
}

std::vector<std::vector<double>> forecasts(const grid::PowerSystem& s) {
  std::vector<std::vector<double>> w;
  for (const auto& farm : s.wind()) w.push_back(farm.forecast);
  return w;
}

}  // namespace

std::vector<std::vector<double>> realized_wind(const grid::PowerSystem& system,
                                               const FirstStagePoint& point,
                                               const ScenarioVertex& v) {
  std::vector<std::vector<double>> w = forecasts(system);
  for (int m = 0; m < v.farms; ++m)
    for (int t = 0; t < v.periods; ++t) {
      if (v.u(m, t)) w[m][t] = point.w_upper[m][t];
      if (v.l(m, t)) w[m][t] = point.w_lower[m][t];
    }
  return w;
}

SubproblemArtifacts build_subproblem(const RecourseSystem& rs, const grid::PowerSystem& system,
                                     const FirstStagePoint& point, const Budget& budget,
                                     double big_m) {
  check_point(system, point);
  budget.validate();
  if (!(big_m > 0.0)) throw InputError("big_m must be positive");
  const int T = system.horizon();
  const int M = static_cast<int>(system.num_wind());
  const auto forecast = forecasts(system);

  SubproblemArtifacts a;
  a.form = rs.form;
  auto& model = a.model;
  for (int m = 0; m < M; ++m)
    for (int t = 0; t < T; ++t) {
      const auto tag = std::to_string(m + 1) + "_" + std::to_string(t + 1);
      a.v_up.push_back(model.add_binary("vu_" + tag));
      a.v_down.push_back(model.add_binary("vl_" + tag));
    }

  milp::LinearExpr objective;
  a.duals.reserve(rs.rows.size());
  for (std::size_t i = 0; i < rs.rows.size(); ++i) {
    const auto& row = rs.rows[i];
    const auto lambda = model.add_continuous("dual_" + row.name(), -big_m, 0.0);
    a.duals.push_back(lambda);
    objective.add(lambda, rs.rhs(row, point.u, forecast));
    for (const auto& [k, c] : row.wind) {
      const auto m = k / static_cast<std::size_t>(T);
      const auto t = k % static_cast<std::size_t>(T);
      for (bool upper : {true, false}) {
        const double edge = upper ? point.w_upper[m][t] : point.w_lower[m][t];
        const auto v = upper ? a.v_up[k] : a.v_down[k];
        const auto aux = model.add_continuous(
            "aux_" + row.name() + (upper ? "_u" : "_l") + std::to_string(k), -big_m, 0.0);
        a.products.push_back({i, k, upper, c * (edge - forecast[m][t]), aux});
        objective.add(aux, a.products.back().coef);
        // -M v <= aux ;  -M(1 - v) <= λ - aux <= 0
        model.add_ge("bm1_" + std::to_string(a.products.size()),
                     milp::LinearExpr(aux) + milp::LinearExpr(v, big_m), 0.0);
        model.add_ge("bm2_" + std::to_string(a.products.size()),
                     milp::LinearExpr(lambda) - milp::LinearExpr(aux) - milp::LinearExpr(v, big_m), -big_m);
        model.add_le("bm3_" + std::to_string(a.products.size()),
                     milp::LinearExpr(lambda) - milp::LinearExpr(aux), 0.0);
      }
    }
  }

  // Dual feasibility, one row per recourse column.
  std::vector<milp::LinearExpr> columns(rs.columns.size());
  for (std::size_t i = 0; i < rs.rows.size(); ++i)
    for (const auto& [k, c] : rs.rows[i].lhs) columns[k].add(a.duals[i], c);
  for (std::size_t k = 0; k < rs.columns.size(); ++k) {
    const auto& col = rs.columns[k];
    const double cost = col.slack ? 1.0 : 0.0;
    const auto name = "dualfeas_" + std::to_string(k);
    if (col.free) {
      model.add_eq(name, std::move(columns[k]), cost);
    } else {
      model.add_le(name, std::move(columns[k]), cost);
    }
  }

  // Budget polytope.
  for (int m = 0; m < M; ++m) {
    milp::LinearExpr per_farm;
    for (int t = 0; t < T; ++t) {
      const auto k = static_cast<std::size_t>(m * T + t);
      per_farm.add(a.v_up[k], 1.0).add(a.v_down[k], 1.0);
      model.add_le("excl_" + std::to_string(k), milp::LinearExpr(a.v_up[k]) + milp::LinearExpr(a.v_down[k]), 1.0);
    }
    model.add_le("budget_t_" + std::to_string(m + 1), std::move(per_farm), budget.temporal);
  }
  for (int t = 0; t < T; ++t) {
    milp::LinearExpr per_period;
    for (int m = 0; m < M; ++m) {
      const auto k = static_cast<std::size_t>(m * T + t);
      per_period.add(a.v_up[k], 1.0).add(a.v_down[k], 1.0);
    }
    model.add_le("budget_s_" + std::to_string(t + 1), std::move(per_period), budget.spatial);
  }

  model.set_objective(milp::Sense::maximize, std::move(objective));
  return a;
}

SubproblemResult solve_subproblem(const RecourseSystem& rs, const grid::PowerSystem& system,
                                  const FirstStagePoint& point, const Budget& budget,
                                  const milp::SolverConfig& config, double bigm_margin) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto art = build_subproblem(rs, system, point, budget, config.big_m);
  const auto out = milp::solve(art.model, config);
  if (out.status != milp::SolveStatus::optimal && out.status != milp::SolveStatus::time_limit)
    throw BackendError(std::string("checking subproblem: ") + milp::to_string(out.status) + " " +
                       out.message);

  SubproblemResult r;
  r.status = out.status;
  r.milp_objective = out.objective;
  r.num_auxiliaries = art.num_auxiliaries();
  const int T = system.horizon();
  const int M = static_cast<int>(system.num_wind());
  r.vertex = ScenarioVertex::zero(M, T);
  for (int m = 0; m < M; ++m)
    for (int t = 0; t < T; ++t) {
      const auto k = static_cast<std::size_t>(m * T + t);
      r.vertex.set(m, t, out.value(art.v_up[k]) > 0.5 ? 1 : (out.value(art.v_down[k]) > 0.5 ? -1 : 0));
    }

  const auto w = realized_wind(system, point, r.vertex);
  const std::vector<double> ones(static_cast<std::size_t>(T), 1.0);
  const auto inner = solve_recourse(rs, point.u, w, ones, ones);
  if (inner.feasible) {
    r.residual = inner.objective;
    r.row_duals = inner.duals;
  } else {
    r.recourse_feasible = false;
    r.residual = std::numeric_limits<double>::infinity();
    r.row_duals.reserve(art.duals.size());
    for (auto d : art.duals) r.row_duals.push_back(out.value(d));
  }
  r.bigm_warnings = milp::check_bigm_slack(r.row_duals, config.big_m, bigm_margin);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace rruc::formulations
