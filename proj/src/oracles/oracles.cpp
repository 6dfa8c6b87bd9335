#include "rruc/oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rruc/error.hpp"
#include "rruc/grid/dc_network.hpp"
#include "rruc/milp/solver.hpp"

namespace rruc::oracles {

namespace {

void check_shape(const Matrix& x, std::size_t rows, int T, const char* what) {
  if (x.size() != rows) throw InputError(std::string(what) + ": wrong number of rows");
  for (const auto& r : x)
    if (r.size() != static_cast<std::size_t>(T)) throw InputError(std::string(what) + ": wrong series length");
}

void enumerate(int cell, int farms, int periods, const Budget& b, std::vector<int>& per_farm,
               std::vector<int>& per_period, ScenarioVertex& v, std::vector<ScenarioVertex>& out,
               std::size_t cap) {
  if (cell == farms * periods) {
    if (out.size() >= cap) throw InputError("vertex count exceeds the cap of " + std::to_string(cap));
    out.push_back(v);
    return;
  }
  const int m = cell / periods;
  const int t = cell % periods;
  enumerate(cell + 1, farms, periods, b, per_farm, per_period, v, out, cap);
  if (per_farm[m] >= b.temporal || per_period[t] >= b.spatial) return;
  ++per_farm[m];
  ++per_period[t];
  for (int sign : {1, -1}) {
    v.set(m, t, sign);
    enumerate(cell + 1, farms, periods, b, per_farm, per_period, v, out, cap);
  }
  v.set(m, t, 0);
  --per_farm[m];
  --per_period[t];
}

}  // namespace

std::vector<ScenarioVertex> enumerate_vertices(int farms, int periods, const Budget& budget,
                                               std::size_t cap) {
  budget.validate();
  if (farms < 0 || periods < 0) throw InputError("negative dimensions");
  std::vector<ScenarioVertex> out;
  std::vector<int> per_farm(static_cast<std::size_t>(farms), 0);
  std::vector<int> per_period(static_cast<std::size_t>(periods), 0);
  auto v = ScenarioVertex::zero(farms, periods);
  enumerate(0, farms, periods, budget, per_farm, per_period, v, out, cap);
  return out;
}

RecourseLpResult recourse_lp(const grid::PowerSystem& s, const Matrix& u, const Matrix& wind,
                             const risk::Prices* prices, CurtailmentBound bound) {
  const int T = s.horizon();
  const auto Ts = static_cast<std::size_t>(T);
  check_shape(u, s.num_generators(), T, "commitment");
  check_shape(wind, s.num_wind(), T, "realized wind");
  if (prices && (prices->curtailment.size() != Ts || prices->load_shed.size() != Ts))
    throw InputError("price series length differs from horizon");

  milp::Model model;
  using milp::LinearExpr;
  std::vector<std::vector<milp::VarId>> p(s.num_generators()), dw(s.num_wind()), dd(s.num_loads()),
      theta(s.num_buses());
  LinearExpr curtail, shed, objective;
  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const double e = prices ? prices->curtailment[ts] : 1.0;
    const double f = prices ? prices->load_shed[ts] : 1.0;
    for (std::size_t g = 0; g < s.num_generators(); ++g) {
      const auto& gen = s.generators()[g];
      const double on = u[g][ts];
      p[g].push_back(model.add_continuous("p", gen.p_min * on, gen.p_max * on));
    }
    for (std::size_t m = 0; m < s.num_wind(); ++m) {
      const double cap = bound == CurtailmentBound::installed ? s.wind()[m].capacity : std::max(0.0, wind[m][ts]);
      dw[m].push_back(model.add_continuous("dw", 0.0, cap));
      curtail.add(dw[m].back(), 1.0);
      objective.add(dw[m].back(), e);
    }
    for (std::size_t j = 0; j < s.num_loads(); ++j) {
      dd[j].push_back(model.add_continuous("dd", 0.0, s.loads()[j].demand[ts]));
      shed.add(dd[j].back(), 1.0);
      objective.add(dd[j].back(), f);
    }
    for (std::size_t n = 0; n < s.num_buses(); ++n) {
      const double lim = n == s.reference_bus() ? 0.0 : std::numbers::pi;
      theta[n].push_back(model.add_continuous("theta", -lim, lim));
    }
  }

  for (std::size_t g = 0; g < s.num_generators(); ++g) {
    const auto& gen = s.generators()[g];
    for (int t = 0; t < T; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      // Ramp limits relax to P_max when the unit is switching.
      const double dn_lim = u[g][ts] * gen.ramp_down + (1.0 - u[g][ts]) * gen.p_max;
      if (t > 0) {
        const double up_lim = u[g][ts - 1] * gen.ramp_up + (1.0 - u[g][ts - 1]) * gen.p_max;
        model.add_le("rd", LinearExpr(p[g][ts - 1]) - LinearExpr(p[g][ts]), dn_lim);
        model.add_le("ru", LinearExpr(p[g][ts]) - LinearExpr(p[g][ts - 1]), up_lim);
      } else if (gen.init_output) {
        const double u0 = gen.initially_on() ? 1.0 : 0.0;
        const double up_lim = u0 * gen.ramp_up + (1.0 - u0) * gen.p_max;
        model.add_le("rd", -1.0 * LinearExpr(p[g][0]), dn_lim - *gen.init_output);
        model.add_le("ru", LinearExpr(p[g][0]), up_lim + *gen.init_output);
      }
    }
  }

  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    std::vector<LinearExpr> net(s.num_buses());
    std::vector<double> fixed(s.num_buses(), 0.0);
    for (std::size_t g = 0; g < s.num_generators(); ++g) net[s.generators()[g].bus].add(p[g][ts], 1.0);
    for (std::size_t m = 0; m < s.num_wind(); ++m) {
      net[s.wind()[m].bus].add(dw[m][ts], -1.0);
      fixed[s.wind()[m].bus] += wind[m][ts];
    }
    for (std::size_t j = 0; j < s.num_loads(); ++j) {
      net[s.loads()[j].bus].add(dd[j][ts], 1.0);
      fixed[s.loads()[j].bus] -= s.loads()[j].demand[ts];
    }
    for (const auto& line : s.lines()) {
      const LinearExpr flow = line.susceptance * (LinearExpr(theta[line.from][ts]) - LinearExpr(theta[line.to][ts]));
      net[line.from] -= flow;
      net[line.to] += flow;
      model.add_constraint("flow", flow, -line.capacity, line.capacity);
    }
    for (std::size_t n = 0; n < s.num_buses(); ++n) model.add_eq("node", std::move(net[n]), -fixed[n]);
  }

  model.set_objective(milp::Sense::minimize, objective);
  milp::SolverConfig cfg;
  cfg.feasibility_tol = 1e-9;
  const auto out = milp::solve(model, cfg);
  RecourseLpResult r;
  if (out.status == milp::SolveStatus::infeasible) return r;
  if (out.status != milp::SolveStatus::optimal)
    throw BackendError(std::string("oracle recourse LP: ") + milp::to_string(out.status) + " " + out.message);
  r.feasible = true;
  r.objective = out.objective;
  r.curtailment = curtail.evaluate(out.values);
  r.shed = shed.evaluate(out.values);
  for (int t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const double e = prices ? prices->curtailment[ts] : 1.0;
    const double f = prices ? prices->load_shed[ts] : 1.0;
    for (std::size_t m = 0; m < s.num_wind(); ++m) r.curtailment_loss += e * out.value(dw[m][ts]);
    for (std::size_t j = 0; j < s.num_loads(); ++j) r.shed_loss += f * out.value(dd[j][ts]);
  }
  r.p.assign(s.num_generators(), {});
  for (std::size_t g = 0; g < s.num_generators(); ++g)
    for (auto v : p[g]) r.p[g].push_back(out.value(v));
  return r;
}

WorstCase brute_force_worst_case(const grid::PowerSystem& s, const Matrix& u, const Matrix& w_upper,
                                 const Matrix& w_lower, const Budget& budget, Execution exec,
                                 std::size_t cap) {
  const int T = s.horizon();
  const int M = static_cast<int>(s.num_wind());
  check_shape(w_upper, s.num_wind(), T, "upper band");
  check_shape(w_lower, s.num_wind(), T, "lower band");
  const auto vertices = enumerate_vertices(M, T, budget, cap);
  const auto n = static_cast<std::ptrdiff_t>(vertices.size());
  std::vector<double> residual(vertices.size(), 0.0);

  const auto evaluate = [&](std::ptrdiff_t i) {
    const auto& v = vertices[static_cast<std::size_t>(i)];
    Matrix w;
    for (int m = 0; m < M; ++m) {
      w.push_back(s.wind()[static_cast<std::size_t>(m)].forecast);
      for (int t = 0; t < T; ++t) {
        if (v.u(m, t)) w.back()[static_cast<std::size_t>(t)] = w_upper[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)];
        if (v.l(m, t)) w.back()[static_cast<std::size_t>(t)] = w_lower[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)];
      }
    }
    const auto r = recourse_lp(s, u, w);
    residual[static_cast<std::size_t>(i)] = r.feasible ? r.objective : std::numeric_limits<double>::infinity();
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) evaluate(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) evaluate(i);
  }

  WorstCase wc;
  wc.evaluated = vertices.size();
  const double best = *std::max_element(residual.begin(), residual.end());
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (residual[i] >= best - 1e-9) {
      wc.residual = best;
      wc.vertex = vertices[i];
      break;
    }
  wc.residuals = std::move(residual);
  return wc;
}

std::vector<Matrix> draw_rare_events(const grid::PowerSystem& s, const Matrix& band_upper,
                                     const Matrix& band_lower, const risk::ForecastErrorModel& errors,
                                     const MonteCarloSettings& settings, std::size_t* draws) {
  const int T = s.horizon();
  const auto Ts = static_cast<std::size_t>(T);
  check_shape(band_upper, s.num_wind(), T, "reference upper band");
  check_shape(band_lower, s.num_wind(), T, "reference lower band");
  if (settings.samples == 0) throw InputError("Monte-Carlo sample count must be at least 1");
  if (errors.sigma.size() != s.num_wind()) throw InputError("error model does not match the wind farms");

  // A sample can only leave the band where the band does not cover [0, w_max]
  // and the error has spread.
  bool reachable = false;
  for (std::size_t m = 0; m < s.num_wind(); ++m)
    for (std::size_t t = 0; t < Ts; ++t) {
      const bool covers = band_upper[m][t] >= s.wind()[m].capacity && band_lower[m][t] <= 0.0;
      const double f = s.wind()[m].forecast[t];
      const bool pinned = errors(m, t) == 0.0 && f <= band_upper[m][t] && f >= band_lower[m][t];
      if (!covers && !pinned) reachable = true;
    }
  if (!reachable) throw ModelError("reference band covers every realizable wind output; no rare events to sample");

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t limit = settings.max_draws_per_sample * settings.samples;
  std::vector<Matrix> kept;
  kept.reserve(settings.samples);
  std::size_t count = 0;
  while (kept.size() < settings.samples) {
    if (count >= limit)
      throw ModelError("rejection rate too high: " + std::to_string(kept.size()) + " rare events in " +
                       std::to_string(count) + " draws");
    ++count;
    Matrix w(s.num_wind(), std::vector<double>(Ts));
    bool outside = false;
    for (std::size_t m = 0; m < s.num_wind(); ++m)
      for (std::size_t t = 0; t < Ts; ++t) {
        const double x = s.wind()[m].forecast[t] + errors(m, t) * normal(rng);
        w[m][t] = std::clamp(x, 0.0, s.wind()[m].capacity);
        if (w[m][t] > band_upper[m][t] || w[m][t] < band_lower[m][t]) outside = true;
      }
    if (outside) kept.push_back(std::move(w));
  }
  if (draws) *draws = count;
  return kept;
}

EvaluationReport monte_carlo_rare_event_loss(const grid::PowerSystem& s, const Matrix& u,
                                             const Matrix& band_upper, const Matrix& band_lower,
                                             const risk::ForecastErrorModel& errors,
                                             const risk::Prices& prices, const MonteCarloSettings& settings,
                                             Execution exec) {
  check_shape(u, s.num_generators(), s.horizon(), "commitment");
  std::size_t draws = 0;
  const auto samples = draw_rare_events(s, band_upper, band_lower, errors, settings, &draws);
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<RecourseLpResult> results(samples.size());
  const auto evaluate = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    results[k] = recourse_lp(s, u, samples[k], &prices, CurtailmentBound::realized);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) evaluate(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) evaluate(i);
  }

  EvaluationReport rep;
  rep.samples = samples.size();
  rep.draws = draws;
  std::size_t infeasible = 0;
  double wgc = 0.0, ls = 0.0;
  for (const auto& r : results) {
    if (!r.feasible) {
      ++infeasible;
      continue;
    }
    wgc += r.curtailment_loss;
    ls += r.shed_loss;
  }
  const double N = static_cast<double>(rep.samples);
  rep.average_curtailment_loss = wgc / N;
  rep.average_shed_loss = ls / N;
  rep.average_loss = rep.average_curtailment_loss + rep.average_shed_loss;
  rep.infeasible_share = static_cast<double>(infeasible) / N;
  return rep;
}

bool Verdict::passed() const {
  return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.passed; });
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

Verdict verify_solution(const formulations::MasterSolution& sol, const grid::PowerSystem& s,
                        const risk::RiskTangents& risk, const risk::Prices& prices, const Budget& budget,
                        const VerifySettings& st) {
  Verdict verdict;
  const auto add = [&](std::string item, bool ok, std::string detail) {
    verdict.findings.push_back({std::move(item), ok, std::move(detail)});
  };
  const int T = s.horizon();
  const auto Ts = static_cast<std::size_t>(T);
  const double tol = st.feasibility_tol;
  try {
    check_shape(sol.u, s.num_generators(), T, "u");
    check_shape(sol.z, s.num_generators(), T, "z");
    check_shape(sol.p, s.num_generators(), T, "p");
    check_shape(sol.w_upper, s.num_wind(), T, "w_upper");
    check_shape(sol.w_lower, s.num_wind(), T, "w_lower");
    check_shape(sol.q_upper, s.num_wind(), T, "q_upper");
    check_shape(sol.q_lower, s.num_wind(), T, "q_lower");
  } catch (const InputError& e) {
    add("shape", false, e.what());
    return verdict;
  }

  // Commitment logic.
  {
    std::string bad;
    for (std::size_t g = 0; g < s.num_generators() && bad.empty(); ++g) {
      const auto& gen = s.generators()[g];
      const auto on = [&](int t) {
        return t < 0 ? (gen.initially_on() ? 1.0 : 0.0) : std::round(sol.u[g][static_cast<std::size_t>(t)]);
      };
      for (int t = 0; t < T && bad.empty(); ++t) {
        const double up = on(t) - on(t - 1);
        if (sol.z[g][static_cast<std::size_t>(t)] < up - tol) bad = gen.id + " start-up flag missing at t" + std::to_string(t + 1);
        for (int k = t + 1; k <= std::min(T - 1, t + gen.min_on - 1); ++k)
          if (up > 0.5 && on(k) < 0.5) bad = gen.id + " violates min-on at t" + std::to_string(t + 1);
        for (int k = t + 1; k <= std::min(T - 1, t + gen.min_off - 1); ++k)
          if (up < -0.5 && on(k) > 0.5) bad = gen.id + " violates min-off at t" + std::to_string(t + 1);
      }
    }
    add("commitment", bad.empty(), bad.empty() ? "min-on/off and start-up replay" : bad);
  }

  // Day-ahead dispatch at the forecast.
  {
    std::string bad;
    double worst_flow = 0.0;
    for (std::size_t g = 0; g < s.num_generators(); ++g) {
      const auto& gen = s.generators()[g];
      for (std::size_t t = 0; t < Ts; ++t) {
        const double u = std::round(sol.u[g][t]);
        const double p = sol.p[g][t];
        if (p > u * gen.p_max + tol || p < u * gen.p_min - tol) bad = gen.id + " output outside its limits";
        if (t > 0) {
          const double d = sol.p[g][t - 1] - p;
          if (d > u * gen.ramp_down + (1 - u) * gen.p_max + tol) bad = gen.id + " ramp-down limit";
          const double u0 = std::round(sol.u[g][t - 1]);
          if (-d > u0 * gen.ramp_up + (1 - u0) * gen.p_max + tol) bad = gen.id + " ramp-up limit";
        }
      }
    }
    for (int t = 0; t < T; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      std::vector<double> inj(s.num_buses(), 0.0);
      for (std::size_t g = 0; g < s.num_generators(); ++g) inj[s.generators()[g].bus] += sol.p[g][ts];
      for (const auto& farm : s.wind()) inj[farm.bus] += farm.forecast[ts];
      for (const auto& load : s.loads()) inj[load.bus] -= load.demand[ts];
      double sum = 0.0;
      for (double x : inj) sum += x;
      if (std::abs(sum) > tol * 10) {
        bad = "power balance off by " + fmt(sum) + " MW at t" + std::to_string(t + 1);
        continue;
      }
      inj[s.reference_bus()] -= sum;
      const auto flow = grid::solve_dc_flow(s, inj);
      for (std::size_t l = 0; l < s.num_lines(); ++l)
        worst_flow = std::max(worst_flow, std::abs(flow.flows[l]) - s.lines()[l].capacity);
    }
    if (worst_flow > tol * 10) bad = "line overload " + fmt(worst_flow) + " MW at forecast";
    add("dispatch", bad.empty(), bad.empty() ? "limits, ramps, balance and flows at forecast" : bad);
  }

  // Band bounds and tangent rows.
  {
    std::string bad;
    for (std::size_t m = 0; m < s.num_wind(); ++m)
      for (std::size_t t = 0; t < Ts; ++t) {
        const auto& farm = s.wind()[m];
        const double f = farm.forecast[t];
        if (sol.w_upper[m][t] < f - tol || sol.w_upper[m][t] > farm.capacity + tol) bad = "w_upper outside [forecast, w_max]";
        if (sol.w_lower[m][t] < -tol || sol.w_lower[m][t] > f + tol) bad = "w_lower outside [0, forecast]";
        const auto& cell = risk.cell(m, t);
        for (const auto& tan : cell.upper)
          if (sol.q_upper[m][t] < tan.slope * sol.w_upper[m][t] + tan.intercept - 1e-6) bad = "Q^p below a tangent";
        for (const auto& tan : cell.lower)
          if (sol.q_lower[m][t] < tan.slope * sol.w_lower[m][t] + tan.intercept - 1e-6) bad = "Q^n below a tangent";
      }
    add("band", bad.empty(), bad.empty() ? "bounds and tangent rows" : bad);
  }

  // Risk.
  double q_sum = 0.0, gap_bound = 0.0;
  for (std::size_t m = 0; m < s.num_wind(); ++m)
    for (std::size_t t = 0; t < Ts; ++t) {
      q_sum += sol.q_upper[m][t] + sol.q_lower[m][t];
      gap_bound += risk.cell(m, t).max_gap_upper + risk.cell(m, t).max_gap_lower;
    }
  const double exact = risk::total_risk_exact(s, risk, prices, sol.w_upper, sol.w_lower);
  {
    const double slack = 1e-6 * std::max(1.0, exact);
    const bool below = exact - q_sum <= gap_bound + slack;
    const bool above = !st.tight_risk || q_sum - exact <= slack;
    add("risk-gap", below && above,
        "sum Q = " + fmt(q_sum) + " $, quadrature = " + fmt(exact) + " $, PWL bound " + fmt(gap_bound) + " $");
  }
  if (std::isfinite(st.risk_limit))
    add("risk-limit", q_sum <= st.risk_limit + 1e-6 * std::max(1.0, st.risk_limit),
        "sum Q = " + fmt(q_sum) + " $ against " + fmt(st.risk_limit) + " $");

  // Robustness by exhaustive recourse.
  try {
    const auto wc = brute_force_worst_case(s, sol.u, sol.w_upper, sol.w_lower, budget, st.exec);
    add("robustness", wc.residual <= st.robustness_tol,
        "worst residual " + fmt(wc.residual) + " MW at " + wc.vertex.describe() + " over " +
            std::to_string(wc.evaluated) + " vertices");
  } catch (const InputError& e) {
    add("robustness", false, e.what());
  }
  return verdict;
}

}  // namespace rruc::oracles
