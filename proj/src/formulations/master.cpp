#include "rruc/formulations/master.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <string>

#include "rruc/error.hpp"

namespace rruc::formulations {

namespace {

std::string tag(std::size_t a, int t) { return std::to_string(a + 1) + "_" + std::to_string(t + 1); }

void check_matrix(const Matrix& m, std::size_t rows, int T, const char* what) {
  if (m.size() != rows) throw ModelError(std::string(what) + ": row count does not match the system");
  for (const auto& r : m)
    if (r.size() != static_cast<std::size_t>(T))
      throw ModelError(std::string(what) + ": series length differs from horizon");
}

// u_{g,t} as an expression, with the initial status standing in for t = -1.
milp::LinearExpr commitment(const MasterArtifacts& a, const grid::Generator& gen, std::size_t g, int t) {
  if (t >= 0) return milp::LinearExpr(a.u[g][static_cast<std::size_t>(t)]);
  return milp::LinearExpr(gen.initially_on() ? 1.0 : 0.0);
}

void commitment_rows(MasterArtifacts& a, const grid::PowerSystem& s) {
  auto& model = a.model;
  const int T = s.horizon();
  for (std::size_t g = 0; g < s.num_generators(); ++g) {
    const auto& gen = s.generators()[g];
    for (int t = 0; t < T; ++t) {
      const auto ut = milp::LinearExpr(a.u[g][static_cast<std::size_t>(t)]);
      const auto prev = commitment(a, gen, g, t - 1);
      for (int k = t + 1; k <= std::min(T - 1, t + gen.min_on - 1); ++k)
        model.add_le("minon_" + tag(g, t) + "_" + std::to_string(k + 1),
                     ut - prev - milp::LinearExpr(a.u[g][static_cast<std::size_t>(k)]), 0.0);
      for (int k = t + 1; k <= std::min(T - 1, t + gen.min_off - 1); ++k)
        model.add_le("minoff_" + tag(g, t) + "_" + std::to_string(k + 1),
                     prev - ut + milp::LinearExpr(a.u[g][static_cast<std::size_t>(k)]), 1.0);
      model.add_le("startup_" + tag(g, t), ut - prev - milp::LinearExpr(a.z[g][static_cast<std::size_t>(t)]), 0.0);
    }
    // Carry-over of the initial state.
    if (gen.init_on && gen.init_hours) {
      const int left = *gen.init_on ? gen.min_on - *gen.init_hours : gen.min_off - *gen.init_hours;
      for (int t = 0; t < std::min(T, left); ++t) {
        const double v = *gen.init_on ? 1.0 : 0.0;
        model.set_bounds(a.u[g][static_cast<std::size_t>(t)], v, v);
      }
    }
  }
}

void dispatch_rows(MasterArtifacts& a, const grid::PowerSystem& s, const grid::Ptdf& ptdf, int segments) {
  auto& model = a.model;
  const int T = s.horizon();
  for (std::size_t g = 0; g < s.num_generators(); ++g) {
    const auto& gen = s.generators()[g];
    const double width = (gen.p_max - gen.p_min) / segments;
    for (int t = 0; t < T; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const auto u = a.u[g][ts];
      const auto p = a.p[g][ts];
      // p̂ = Pmin·u + Σ δ_s, cost C(Pmin)·u + Σ slope_s·δ_s
      milp::LinearExpr link = milp::LinearExpr(p) - milp::LinearExpr(u, gen.p_min);
      a.energy_cost.add(u, gen.cost(gen.p_min));
      if (width > 0.0) {
        for (int k = 0; k < segments; ++k) {
          const double lo = gen.p_min + k * width;
          const double slope = (gen.cost(lo + width) - gen.cost(lo)) / width;
          const auto d = model.add_continuous("seg_" + tag(g, t) + "_" + std::to_string(k + 1), 0.0, width);
          link.add(d, -1.0);
          a.energy_cost.add(d, slope);
        }
      }
      model.add_eq("pwl_" + tag(g, t), std::move(link), 0.0);
      model.add_le("pmax_" + tag(g, t), milp::LinearExpr(p) - milp::LinearExpr(u, gen.p_max), 0.0);
      model.add_ge("pmin_" + tag(g, t), milp::LinearExpr(p) - milp::LinearExpr(u, gen.p_min), 0.0);
      a.no_load_cost.add(u, gen.no_load_cost);
      a.startup_cost.add(a.z[g][ts], gen.startup_cost);

      // Ramps between consecutive day-ahead set points.
      if (t > 0 || gen.init_output) {
        const auto prev_p = t > 0 ? milp::LinearExpr(a.p[g][ts - 1]) : milp::LinearExpr(*gen.init_output);
        const auto prev_u = commitment(a, gen, g, t - 1);
        model.add_le("rampdn_" + tag(g, t),
                     prev_p - milp::LinearExpr(p) - milp::LinearExpr(u, gen.ramp_down - gen.p_max), gen.p_max);
        model.add_le("rampup_" + tag(g, t),
                     milp::LinearExpr(p) - prev_p - (gen.ramp_up - gen.p_max) * prev_u, gen.p_max);
      }
    }
  }

  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    milp::LinearExpr balance;
    for (std::size_t g = 0; g < s.num_generators(); ++g) balance.add(a.p[g][ts], 1.0);
    model.add_eq("balance_" + std::to_string(t + 1), std::move(balance), s.total_demand(t) - s.total_forecast(t));
    for (std::size_t l = 0; l < s.num_lines(); ++l) {
      milp::LinearExpr flow;
      for (std::size_t g = 0; g < s.num_generators(); ++g) flow.add(a.p[g][ts], ptdf(l, s.generators()[g].bus));
      for (const auto& farm : s.wind()) flow.add(ptdf(l, farm.bus) * farm.forecast[ts]);
      for (const auto& load : s.loads()) flow.add(-ptdf(l, load.bus) * load.demand[ts]);
      const double cap = s.lines()[l].capacity;
      model.add_constraint("flow_" + tag(l, t), std::move(flow), -cap, cap);
    }
  }
}

void band_and_risk(MasterArtifacts& a, const grid::PowerSystem& s, const risk::RiskTangents* risk) {
  auto& model = a.model;
  const auto& st = a.settings;
  const int T = s.horizon();
  const std::size_t M = s.num_wind();
  if (st.fixed_upper) check_matrix(*st.fixed_upper, M, T, "fixed upper band");
  if (st.fixed_lower) check_matrix(*st.fixed_lower, M, T, "fixed lower band");
  if (risk && (risk->horizon != T || risk->cells.size() != M * static_cast<std::size_t>(T)))
    throw ModelError("risk tangents do not match the system's wind farms and periods");

  a.w_upper.assign(M, {});
  a.w_lower.assign(M, {});
  a.q_upper.assign(M, {});
  a.q_lower.assign(M, {});
  for (std::size_t m = 0; m < M; ++m) {
    const auto& farm = s.wind()[m];
    for (int t = 0; t < T; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const double f = farm.forecast[ts];
      double ulo = f, uhi = farm.capacity, llo = 0.0, lhi = f;
      if (st.fixed_upper) {
        ulo = uhi = (*st.fixed_upper)[m][ts];
        if (ulo < f - 1e-9 || ulo > farm.capacity + 1e-9) throw ModelError("fixed upper band outside [forecast, w_max]");
      }
      if (st.fixed_lower) {
        llo = lhi = (*st.fixed_lower)[m][ts];
        if (llo < -1e-9 || llo > f + 1e-9) throw ModelError("fixed lower band outside [0, forecast]");
      }
      a.w_upper[m].push_back(model.add_continuous("wu_" + tag(m, t), ulo, uhi));
      a.w_lower[m].push_back(model.add_continuous("wl_" + tag(m, t), llo, lhi));
      if (!risk) continue;
      const auto qp = model.add_continuous("qp_" + tag(m, t), 0.0, milp::kInf);
      const auto qn = model.add_continuous("qn_" + tag(m, t), 0.0, milp::kInf);
      a.q_upper[m].push_back(qp);
      a.q_lower[m].push_back(qn);
      a.risk_sum.add(qp, 1.0).add(qn, 1.0);
      const auto& cell = risk->cell(m, ts);
      for (std::size_t z = 0; z < cell.upper.size(); ++z)
        model.add_ge("tanp_" + tag(m, t) + "_" + std::to_string(z + 1),
                     milp::LinearExpr(qp) - milp::LinearExpr(a.w_upper[m][ts], cell.upper[z].slope),
                     cell.upper[z].intercept);
      for (std::size_t z = 0; z < cell.lower.size(); ++z)
        model.add_ge("tann_" + tag(m, t) + "_" + std::to_string(z + 1),
                     milp::LinearExpr(qn) - milp::LinearExpr(a.w_lower[m][ts], cell.lower[z].slope),
                     cell.lower[z].intercept);
    }
  }
  if (risk && std::isfinite(st.risk_limit)) {
    if (st.risk_limit < 0.0) throw InputError("risk limit must be nonnegative");
    model.add_le("risk_limit", a.risk_sum, st.risk_limit);
    a.has_risk_row = true;
  }
}

}  // namespace

double FeasibilityCut::violation(const FirstStagePoint& p, int horizon) const {
  const auto T = static_cast<std::size_t>(horizon);
  double lhs = 0.0;
  for (const auto& [k, c] : commitment) lhs += c * p.u[k / T][k % T];
  for (const auto& b : band) {
    const auto& w = b.upper ? p.w_upper : p.w_lower;
    lhs += b.coef * w[b.farm_period / T][b.farm_period % T];
  }
  return lhs - rhs;
}

FeasibilityCut make_feasibility_cut(const RecourseSystem& rs, const grid::PowerSystem& system,
                                    const std::vector<double>& eta, const FirstStagePoint& x_star,
                                    const ScenarioVertex& v, double residual) {
  if (eta.size() != rs.rows.size()) throw ModelError("dual vector does not match the recourse rows");
  double largest = 0.0;
  for (double e : eta) largest = std::max(largest, std::abs(e));
  if (largest < 1e-9) throw ModelError("feasibility cut from a zero dual vector");

  const auto T = static_cast<std::size_t>(rs.horizon);
  std::vector<double> ucoef(rs.num_generators * T, 0.0);
  std::vector<double> upper(rs.num_farms * T, 0.0);
  std::vector<double> lower(rs.num_farms * T, 0.0);
  double at_star = 0.0;
  for (std::size_t i = 0; i < rs.rows.size(); ++i) {
    if (eta[i] == 0.0) continue;
    const auto& row = rs.rows[i];
    for (const auto& [k, c] : row.commitment) {
      ucoef[k] += eta[i] * c;
      at_star += eta[i] * c * x_star.u[k / T][k % T];
    }
    for (const auto& [k, c] : row.wind) {
      const auto m = static_cast<int>(k / T);
      const auto t = static_cast<int>(k % T);
      if (v.u(m, t)) {
        upper[k] += eta[i] * c;
        at_star += eta[i] * c * x_star.w_upper[k / T][k % T];
      } else if (v.l(m, t)) {
        lower[k] += eta[i] * c;
        at_star += eta[i] * c * x_star.w_lower[k / T][k % T];
      }
    }
  }
  (void)system;
  FeasibilityCut cut;
  for (std::size_t k = 0; k < ucoef.size(); ++k)
    if (ucoef[k] != 0.0) cut.commitment.emplace_back(k, ucoef[k]);
  for (std::size_t k = 0; k < upper.size(); ++k) {
    if (upper[k] != 0.0) cut.band.push_back({k, true, upper[k]});
    if (lower[k] != 0.0) cut.band.push_back({k, false, lower[k]});
  }
  cut.rhs = at_star - residual;
  return cut;
}

MasterArtifacts build_master(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                             const risk::RiskTangents* risk, const MasterSettings& settings) {
  if (settings.cost_segments < 1) throw InputError("cost_segments must be at least 1");
  if (!(settings.penalty >= 0.0)) throw InputError("penalty K must be nonnegative");
  if (settings.reserve_rate && !(*settings.reserve_rate >= 0.0)) throw InputError("reserve rate must be nonnegative");
  if (ptdf.num_lines() != system.num_lines()) throw ModelError("PTDF does not match the system's lines");
  if (settings.objective == MasterObjective::risk_only && !risk)
    throw ModelError("risk-only objective needs risk tangents");
  const int T = system.horizon();
  const std::size_t G = system.num_generators();

  MasterArtifacts a;
  a.settings = settings;
  if (settings.fixed_commitment) check_matrix(*settings.fixed_commitment, G, T, "fixed commitment");
  a.u.assign(G, {});
  a.z.assign(G, {});
  a.p.assign(G, {});
  for (std::size_t g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t) {
      a.u[g].push_back(a.model.add_binary("u_" + tag(g, t)));
      a.z[g].push_back(a.model.add_binary("z_" + tag(g, t)));
      a.p[g].push_back(a.model.add_continuous("p_" + tag(g, t), 0.0, system.generators()[g].p_max));
      if (settings.fixed_commitment) a.model.fix(a.u[g].back(), (*settings.fixed_commitment)[g][static_cast<std::size_t>(t)] > 0.5 ? 1.0 : 0.0);
    }
  commitment_rows(a, system);
  dispatch_rows(a, system, ptdf, settings.cost_segments);
  band_and_risk(a, system, risk);

  if (settings.reserve_rate) {
    for (int t = 0; t < T; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      milp::LinearExpr headroom;
      for (std::size_t g = 0; g < G; ++g)
        headroom.add(a.u[g][ts], system.generators()[g].p_max).add(a.p[g][ts], -1.0);
      a.model.add_ge("reserve_" + std::to_string(t + 1), std::move(headroom),
                     *settings.reserve_rate * system.total_demand(t));
    }
  }

  milp::LinearExpr objective;
  switch (settings.objective) {
    case MasterObjective::cost:
      objective = a.startup_cost + a.no_load_cost + a.energy_cost;
      break;
    case MasterObjective::cost_plus_penalty:
      objective = a.startup_cost + a.no_load_cost + a.energy_cost + settings.penalty * a.risk_sum;
      break;
    case MasterObjective::risk_only:
      objective = a.risk_sum;
      break;
  }
  a.model.set_objective(milp::Sense::minimize, std::move(objective));
  return a;
}

void add_scenario_cut(MasterArtifacts& master, const grid::PowerSystem& system,
                      const RecourseSystem& rs, const ScenarioVertex& v) {
  if (rs.form != NetworkForm::ptdf) throw ModelError("scenario cuts use the PTDF recourse system");
  const int T = system.horizon();
  if (v.farms != static_cast<int>(system.num_wind()) || v.periods != T)
    throw ModelError("scenario vertex does not match the system");
  if (std::find(master.scenario_cuts.begin(), master.scenario_cuts.end(), v) != master.scenario_cuts.end())
    throw ModelError("scenario vertex already registered: " + v.describe());
  if (master.w_upper.size() != system.num_wind()) throw ModelError("master has no band variables");

  auto& model = master.model;
  const auto block = std::to_string(master.scenario_cuts.size() + 1);
  std::vector<milp::VarId> y(rs.columns.size());
  std::vector<bool> present(rs.columns.size(), false);
  for (std::size_t k = 0; k < rs.columns.size(); ++k) {
    const auto& c = rs.columns[k];
    if (c.slack) continue;  // zero-slack block
    y[k] = model.add_continuous("y" + block + "_" + std::to_string(k), c.free ? -milp::kInf : 0.0, milp::kInf);
    present[k] = true;
  }
  const auto Ts = static_cast<std::size_t>(T);
  for (const auto& row : rs.rows) {
    milp::LinearExpr e;
    for (const auto& [k, c] : row.lhs)
      if (present[k]) e.add(y[k], c);
    // Move u and w(v) terms to the left.
    for (const auto& [k, c] : row.commitment) e.add(master.u[k / Ts][k % Ts], -c);
    double constant = row.constant;
    for (const auto& [k, c] : row.wind) {
      const auto m = static_cast<int>(k / Ts);
      const auto t = static_cast<int>(k % Ts);
      if (v.u(m, t)) {
        e.add(master.w_upper[k / Ts][k % Ts], -c);
      } else if (v.l(m, t)) {
        e.add(master.w_lower[k / Ts][k % Ts], -c);
      } else {
        constant += c * system.wind()[k / Ts].forecast[k % Ts];
      }
    }
    if (e.terms().empty()) {
      if (constant >= 0.0) continue;
      throw ModelError("scenario block row " + row.name() + " is infeasible by construction");
    }
    model.add_le("sc" + block + "_" + row.name(), std::move(e), constant);
  }
  master.scenario_cuts.push_back(v);
}

void add_feasibility_cut(MasterArtifacts& master, const FeasibilityCut& cut) {
  const auto T = master.u.empty() ? std::size_t{0} : master.u.front().size();
  milp::LinearExpr e;
  for (const auto& [k, c] : cut.commitment) e.add(master.u[k / T][k % T], c);
  for (const auto& b : cut.band) {
    const auto& w = b.upper ? master.w_upper : master.w_lower;
    e.add(w[b.farm_period / T][b.farm_period % T], b.coef);
  }
  ++master.feasibility_cuts;
  master.model.add_le("fcut_" + std::to_string(master.feasibility_cuts), std::move(e), cut.rhs);
}

MasterSolution solve_master(const MasterArtifacts& master, const milp::SolverConfig& config) {
  const auto out = milp::solve(master.model, config);
  MasterSolution s;
  s.status = out.status;
  s.objective = out.objective;
  s.gap = out.gap;
  s.wall_time = out.wall_time;
  if (!out.has_values()) return s;
  const auto grab = [&](const VarMatrix& vars, Matrix& dst) {
    dst.assign(vars.size(), {});
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (auto v : vars[i]) dst[i].push_back(out.value(v));
  };
  grab(master.u, s.u);
  grab(master.z, s.z);
  grab(master.p, s.p);
  grab(master.w_upper, s.w_upper);
  grab(master.w_lower, s.w_lower);
  grab(master.q_upper, s.q_upper);
  grab(master.q_lower, s.q_lower);
  s.startup_cost = master.startup_cost.evaluate(out.values);
  s.no_load_cost = master.no_load_cost.evaluate(out.values);
  s.energy_cost = master.energy_cost.evaluate(out.values);
  s.risk_envelope = master.risk_sum.evaluate(out.values);
  return s;
}

MasterArtifacts build_extensive(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                                const risk::RiskTangents* risk, const MasterSettings& settings,
                                const std::vector<ScenarioVertex>& vertices) {
  auto a = build_master(system, ptdf, risk, settings);
  const auto rs = build_recourse(system, ptdf, NetworkForm::ptdf);
  for (const auto& v : vertices) add_scenario_cut(a, system, rs, v);
  return a;
}

MasterArtifacts build_duc(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                          double reserve_rate, int cost_segments) {
  MasterSettings st;
  st.objective = MasterObjective::cost;
  st.cost_segments = cost_segments;
  st.reserve_rate = reserve_rate;
  Matrix forecast;
  for (const auto& farm : system.wind()) forecast.push_back(farm.forecast);
  st.fixed_upper = forecast;
  st.fixed_lower = forecast;
  return build_master(system, ptdf, nullptr, st);
}

Band build_ruc_bounds(const grid::PowerSystem& system, const Matrix& sigma, double confidence) {
  if (!(confidence > 0.5 && confidence < 1.0)) throw InputError("confidence level must lie in (0.5, 1)");
  check_matrix(sigma, system.num_wind(), system.horizon(), "sigma");
  const double z = boost::math::quantile(boost::math::normal_distribution<>(), (1.0 + confidence) / 2.0);
  Band b;
  for (std::size_t m = 0; m < system.num_wind(); ++m) {
    const auto& farm = system.wind()[m];
    b.upper.emplace_back();
    b.lower.emplace_back();
    for (std::size_t t = 0; t < farm.forecast.size(); ++t) {
      const double f = farm.forecast[t];
      b.upper.back().push_back(std::min(farm.capacity, f + z * sigma[m][t]));
      b.lower.back().push_back(std::max(0.0, f - z * sigma[m][t]));
    }
  }
  return b;
}

}  // namespace rruc::formulations
