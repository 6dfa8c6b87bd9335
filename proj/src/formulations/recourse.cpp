#include "rruc/formulations/recourse.hpp"

#include <numbers>

#include "rruc/error.hpp"
#include "rruc/milp/solver.hpp"

namespace rruc::formulations {

const char* to_string(RowKind k) {
  switch (k) {
    case RowKind::gen_max: return "gen_max";
    case RowKind::gen_min: return "gen_min";
    case RowKind::ramp_down: return "ramp_down";
    case RowKind::ramp_up: return "ramp_up";
    case RowKind::balance_le: return "balance_le";
    case RowKind::balance_ge: return "balance_ge";
    case RowKind::flow_le: return "flow_le";
    case RowKind::flow_ge: return "flow_ge";
    case RowKind::node_le: return "node_le";
    case RowKind::node_ge: return "node_ge";
    case RowKind::angle_le: return "angle_le";
    case RowKind::angle_ge: return "angle_ge";
    case RowKind::ref_le: return "ref_le";
    case RowKind::ref_ge: return "ref_ge";
    case RowKind::shed_cap: return "shed_cap";
    case RowKind::curtail_cap: return "curtail_cap";
  }
  return "row";
}

std::string Row::name() const {
  return std::string(to_string(kind)) + "_" + std::to_string(index) + "_" + std::to_string(t + 1);
}

double RecourseSystem::rhs(const Row& row, const std::vector<std::vector<double>>& u,
                           const std::vector<std::vector<double>>& w) const {
  const auto T = static_cast<std::size_t>(horizon);
  double b = row.constant;
  for (const auto& [k, c] : row.commitment) b += c * u[k / T][k % T];
  for (const auto& [k, c] : row.wind) b += c * w[k / T][k % T];
  return b;
}

namespace {

class Builder {
 public:
  Builder(const grid::PowerSystem& s, const grid::Ptdf& ptdf, NetworkForm form, CurtailmentCap cap)
      : s_(s), ptdf_(ptdf), T_(s.horizon()) {
    rs_.form = form;
    rs_.cap = cap;
    rs_.horizon = T_;
    rs_.num_generators = s.num_generators();
    rs_.num_farms = s.num_wind();
  }

  RecourseSystem build() {
    add_columns();
    for (int t = 0; t < T_; ++t) {
      generator_rows(t);
      if (rs_.form == NetworkForm::ptdf) {
        ptdf_rows(t);
      } else {
        nodal_rows(t);
      }
      cap_rows(t);
    }
    return std::move(rs_);
  }

 private:
  std::size_t uidx(std::size_t g, int t) const { return g * static_cast<std::size_t>(T_) + static_cast<std::size_t>(t); }
  std::size_t widx(std::size_t m, int t) const { return uidx(m, t); }

  void add_columns() {
    const std::size_t G = s_.num_generators();
    const std::size_t M = s_.num_wind();
    const std::size_t J = s_.num_loads();
    const std::size_t N = s_.num_buses();
    per_t_ = G + M + J + (rs_.form == NetworkForm::nodal ? N : 0);
    for (int t = 0; t < T_; ++t) {
      for (std::size_t g = 0; g < G; ++g) rs_.columns.push_back({ColumnKind::gen, g, t, false, false});
      for (std::size_t m = 0; m < M; ++m) rs_.columns.push_back({ColumnKind::curtail, m, t, false, true});
      for (std::size_t j = 0; j < J; ++j) rs_.columns.push_back({ColumnKind::shed, j, t, false, true});
      if (rs_.form == NetworkForm::nodal)
        for (std::size_t n = 0; n < N; ++n) rs_.columns.push_back({ColumnKind::angle, n, t, true, false});
    }
  }

  std::size_t col(ColumnKind kind, std::size_t i, int t) const {
    const std::size_t base = static_cast<std::size_t>(t) * per_t_;
    const std::size_t G = s_.num_generators();
    const std::size_t M = s_.num_wind();
    const std::size_t J = s_.num_loads();
    switch (kind) {
      case ColumnKind::gen: return base + i;
      case ColumnKind::curtail: return base + G + i;
      case ColumnKind::shed: return base + G + M + i;
      case ColumnKind::angle: return base + G + M + J + i;
    }
    return base;
  }

  Row& add(RowKind kind, std::size_t index, int t) {
    rs_.rows.push_back(Row{kind, index, t, {}, 0.0, {}, {}});
    return rs_.rows.back();
  }

  void generator_rows(int t) {
    for (std::size_t g = 0; g < s_.num_generators(); ++g) {
      const auto& gen = s_.generators()[g];
      auto& up = add(RowKind::gen_max, g, t);
      up.lhs = {{col(ColumnKind::gen, g, t), 1.0}};
      up.commitment = {{uidx(g, t), gen.p_max}};
      auto& lo = add(RowKind::gen_min, g, t);
      lo.lhs = {{col(ColumnKind::gen, g, t), -1.0}};
      lo.commitment = {{uidx(g, t), -gen.p_min}};

      // p_{t-1} - p_t <= Pmax + (R- - Pmax) u_t ;  p_t - p_{t-1} <= Pmax + (R+ - Pmax) u_{t-1}
      if (t > 0) {
        auto& dn = add(RowKind::ramp_down, g, t);
        dn.lhs = {{col(ColumnKind::gen, g, t - 1), 1.0}, {col(ColumnKind::gen, g, t), -1.0}};
        dn.constant = gen.p_max;
        dn.commitment = {{uidx(g, t), gen.ramp_down - gen.p_max}};
        auto& rp = add(RowKind::ramp_up, g, t);
        rp.lhs = {{col(ColumnKind::gen, g, t), 1.0}, {col(ColumnKind::gen, g, t - 1), -1.0}};
        rp.constant = gen.p_max;
        rp.commitment = {{uidx(g, t - 1), gen.ramp_up - gen.p_max}};
      } else if (gen.init_output) {
        const double p0 = *gen.init_output;
        const double u0 = gen.initially_on() ? 1.0 : 0.0;
        auto& dn = add(RowKind::ramp_down, g, t);
        dn.lhs = {{col(ColumnKind::gen, g, t), -1.0}};
        dn.constant = gen.p_max - p0;
        dn.commitment = {{uidx(g, t), gen.ramp_down - gen.p_max}};
        auto& rp = add(RowKind::ramp_up, g, t);
        rp.lhs = {{col(ColumnKind::gen, g, t), 1.0}};
        rp.constant = p0 + gen.p_max + (gen.ramp_up - gen.p_max) * u0;
      }
    }
  }

  // Injection terms common to the balance and PTDF rows, scaled by `sign`.
  void injection_lhs(Row& row, int t, const std::vector<double>* factor, double sign) const {
    for (std::size_t g = 0; g < s_.num_generators(); ++g) {
      const double k = factor ? (*factor)[s_.generators()[g].bus] : 1.0;
      if (k != 0.0) row.lhs.emplace_back(col(ColumnKind::gen, g, t), sign * k);
    }
    for (std::size_t m = 0; m < s_.num_wind(); ++m) {
      const double k = factor ? (*factor)[s_.wind()[m].bus] : 1.0;
      if (k != 0.0) row.lhs.emplace_back(col(ColumnKind::curtail, m, t), -sign * k);
      row.wind.emplace_back(widx(m, t), -sign * k);
    }
    for (std::size_t j = 0; j < s_.num_loads(); ++j) {
      const auto& load = s_.loads()[j];
      const double k = factor ? (*factor)[load.bus] : 1.0;
      if (k != 0.0) row.lhs.emplace_back(col(ColumnKind::shed, j, t), sign * k);
      row.constant += sign * k * load.demand[static_cast<std::size_t>(t)];
    }
  }

  void ptdf_rows(int t) {
    auto& le = add(RowKind::balance_le, 0, t);
    injection_lhs(le, t, nullptr, 1.0);
    auto& ge = add(RowKind::balance_ge, 0, t);
    injection_lhs(ge, t, nullptr, -1.0);
    for (std::size_t l = 0; l < s_.num_lines(); ++l) {
      std::vector<double> factor(s_.num_buses());
      for (std::size_t n = 0; n < s_.num_buses(); ++n) factor[n] = ptdf_(l, n);
      const double cap = s_.lines()[l].capacity;
      auto& fle = add(RowKind::flow_le, l, t);
      injection_lhs(fle, t, &factor, 1.0);
      fle.constant += cap;
      auto& fge = add(RowKind::flow_ge, l, t);
      injection_lhs(fge, t, &factor, -1.0);
      fge.constant += cap;
    }
  }

  void nodal_rows(int t) {
    const std::size_t N = s_.num_buses();
    // Net outflow of bus n as a linear form in θ.
    std::vector<std::vector<double>> outflow(N, std::vector<double>(N, 0.0));
    for (const auto& line : s_.lines()) {
      outflow[line.from][line.from] += line.susceptance;
      outflow[line.from][line.to] -= line.susceptance;
      outflow[line.to][line.to] += line.susceptance;
      outflow[line.to][line.from] -= line.susceptance;
    }
    for (std::size_t n = 0; n < N; ++n) {
      for (double sign : {1.0, -1.0}) {
        auto& row = add(sign > 0 ? RowKind::node_le : RowKind::node_ge, n, t);
        for (std::size_t g = 0; g < s_.num_generators(); ++g)
          if (s_.generators()[g].bus == n) row.lhs.emplace_back(col(ColumnKind::gen, g, t), sign);
        for (std::size_t m = 0; m < s_.num_wind(); ++m)
          if (s_.wind()[m].bus == n) {
            row.lhs.emplace_back(col(ColumnKind::curtail, m, t), -sign);
            row.wind.emplace_back(widx(m, t), -sign);
          }
        for (std::size_t j = 0; j < s_.num_loads(); ++j)
          if (s_.loads()[j].bus == n) {
            row.lhs.emplace_back(col(ColumnKind::shed, j, t), sign);
            row.constant += sign * s_.loads()[j].demand[static_cast<std::size_t>(t)];
          }
        for (std::size_t o = 0; o < N; ++o)
          if (outflow[n][o] != 0.0) row.lhs.emplace_back(col(ColumnKind::angle, o, t), -sign * outflow[n][o]);
      }
    }
    for (std::size_t l = 0; l < s_.num_lines(); ++l) {
      const auto& line = s_.lines()[l];
      for (double sign : {1.0, -1.0}) {
        auto& row = add(sign > 0 ? RowKind::flow_le : RowKind::flow_ge, l, t);
        row.lhs = {{col(ColumnKind::angle, line.from, t), sign * line.susceptance},
                   {col(ColumnKind::angle, line.to, t), -sign * line.susceptance}};
        row.constant = line.capacity;
      }
    }
    for (std::size_t n = 0; n < N; ++n) {
      auto& le = add(RowKind::angle_le, n, t);
      le.lhs = {{col(ColumnKind::angle, n, t), 1.0}};
      le.constant = std::numbers::pi;
      auto& ge = add(RowKind::angle_ge, n, t);
      ge.lhs = {{col(ColumnKind::angle, n, t), -1.0}};
      ge.constant = std::numbers::pi;
    }
    const std::size_t ref = s_.reference_bus();
    add(RowKind::ref_le, ref, t).lhs = {{col(ColumnKind::angle, ref, t), 1.0}};
    add(RowKind::ref_ge, ref, t).lhs = {{col(ColumnKind::angle, ref, t), -1.0}};
  }

  void cap_rows(int t) {
    for (std::size_t j = 0; j < s_.num_loads(); ++j) {
      auto& row = add(RowKind::shed_cap, j, t);
      row.lhs = {{col(ColumnKind::shed, j, t), 1.0}};
      row.constant = s_.loads()[j].demand[static_cast<std::size_t>(t)];
    }
    for (std::size_t m = 0; m < s_.num_wind(); ++m) {
      auto& row = add(RowKind::curtail_cap, m, t);
      row.lhs = {{col(ColumnKind::curtail, m, t), 1.0}};
      if (rs_.cap == CurtailmentCap::installed) {
        row.constant = s_.wind()[m].capacity;
      } else {
        row.wind = {{widx(m, t), 1.0}};
      }
    }
  }

  const grid::PowerSystem& s_;
  const grid::Ptdf& ptdf_;
  int T_;
  std::size_t per_t_ = 0;
  RecourseSystem rs_;
};

}  // namespace

RecourseSystem build_recourse(const grid::PowerSystem& system, const grid::Ptdf& ptdf,
                              NetworkForm form, CurtailmentCap cap) {
  if (form == NetworkForm::ptdf && ptdf.num_lines() != system.num_lines())
    throw ModelError("PTDF does not match the system's lines");
  return Builder(system, ptdf, form, cap).build();
}

RecourseOutcome solve_recourse(const RecourseSystem& rs, const std::vector<std::vector<double>>& u,
                               const std::vector<std::vector<double>>& w,
                               const std::vector<double>& curtail_cost,
                               const std::vector<double>& shed_cost) {
  milp::Model model;
  milp::LinearExpr objective;
  std::vector<milp::VarId> vars;
  vars.reserve(rs.columns.size());
  for (std::size_t k = 0; k < rs.columns.size(); ++k) {
    const auto& c = rs.columns[k];
    vars.push_back(model.add_continuous("y" + std::to_string(k), c.free ? -milp::kInf : 0.0, milp::kInf));
    const auto t = static_cast<std::size_t>(c.t);
    if (c.kind == ColumnKind::curtail) objective.add(vars.back(), curtail_cost[t]);
    if (c.kind == ColumnKind::shed) objective.add(vars.back(), shed_cost[t]);
  }
  for (const auto& row : rs.rows) {
    milp::LinearExpr e;
    for (const auto& [k, a] : row.lhs) e.add(vars[k], a);
    model.add_le(row.name(), std::move(e), rs.rhs(row, u, w));
  }
  model.set_objective(milp::Sense::minimize, std::move(objective));
  milp::SolverConfig cfg;
  cfg.feasibility_tol = 1e-9;
  const auto out = milp::solve(model, cfg);
  RecourseOutcome r;
  if (out.status == milp::SolveStatus::infeasible) return r;
  if (out.status != milp::SolveStatus::optimal)
    throw BackendError("recourse LP: " + std::string(milp::to_string(out.status)) + " " + out.message);
  r.feasible = true;
  r.objective = out.objective;
  r.values = out.values;
  r.duals = out.row_duals;
  return r;
}

}  // namespace rruc::formulations
