#include "rruc/ccg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rruc/error.hpp"
#include "rruc/formulations/recourse.hpp"
#include "rruc/formulations/subproblem.hpp"
#include "rruc/oracles/oracles.hpp"

namespace rruc::ccg {

namespace fm = formulations;

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::a1: return "a1";
    case Algorithm::a2: return "a2";
    case Algorithm::a3: return "a3";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "a1") return Algorithm::a1;
  if (s == "a2") return Algorithm::a2;
  if (s == "a3") return Algorithm::a3;
  throw InputError("unknown algorithm '" + s + "'");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::infeasible_risk_level: return "infeasible-risk-level";
    case RunStatus::iteration_limit: return "iteration-limit";
    case RunStatus::time_limit: return "time-limit";
  }
  return "?";
}

void ConvergenceConfig::validate() const {
  if (!(feasibility_tol > 0.0)) throw InputError("feasibility tolerance must be positive");
  if (residual_change_tol && !(*residual_change_tol > 0.0)) throw InputError("residual change tolerance must be positive");
  if (max_iterations < 1) throw InputError("max_iterations must be at least 1");
  if (!(time_limit > 0.0)) throw InputError("time limit must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_problem(const Problem& p) {
  if (!p.system || !p.ptdf) throw InputError("problem needs a system and its PTDF");
  p.budget.validate();
}

void finish(RrucSolution& r, const Problem& p) {
  const auto& m = r.master;
  if (m.status != milp::SolveStatus::optimal && m.status != milp::SolveStatus::time_limit) return;
  if (m.u.empty() && p.system->num_generators() > 0) return;
  if (p.master.objective == fm::MasterObjective::cost_plus_penalty) r.penalty_cost = p.master.penalty * m.risk_envelope;
  if (p.risk && !m.w_upper.empty())
    r.risk_exact = risk::total_risk_exact(*p.system, *p.risk, p.prices, m.w_upper, m.w_lower);
}

}  // namespace

RrucSolution run(Algorithm algorithm, const Problem& problem, const milp::SolverConfig& solver,
                 const ConvergenceConfig& convergence, const IterationCallback& on_iteration) {
  check_problem(problem);
  solver.validate();
  convergence.validate();
  const auto t0 = Clock::now();
  const auto& sys = *problem.system;

  RrucSolution out;
  out.algorithm = algorithm;
  auto master = fm::build_master(sys, *problem.ptdf, problem.risk, problem.master);
  const auto rs_ptdf = fm::build_recourse(sys, *problem.ptdf, fm::NetworkForm::ptdf);
  const auto rs_nodal = fm::build_recourse(sys, *problem.ptdf, fm::NetworkForm::nodal);
  const auto& rs_sub = algorithm == Algorithm::a1 ? rs_ptdf : rs_nodal;

  double previous_residual = 0.0;
  for (int k = 1; k <= convergence.max_iterations; ++k) {
    IterationRecord rec;
    rec.iteration = k;

    auto cfg = solver;
    const double remaining = convergence.time_limit - seconds_since(t0);
    if (remaining <= 0.0) {
      out.status = RunStatus::time_limit;
      break;
    }
    cfg.time_limit = std::min(cfg.time_limit, remaining);
    out.master = fm::solve_master(master, cfg);
    rec.master_time = out.master.wall_time;
    out.master_time += rec.master_time;
    if (out.master.status == milp::SolveStatus::infeasible) {
      out.status = RunStatus::infeasible_risk_level;
      break;
    }
    if (!out.master.u.size() && sys.num_generators() > 0) {
      if (out.master.status == milp::SolveStatus::time_limit) {
        out.status = RunStatus::time_limit;
        break;
      }
      throw BackendError(std::string("master problem: ") + milp::to_string(out.master.status));
    }
    rec.master_objective = out.master.objective;

    const auto sp = fm::solve_subproblem(rs_sub, sys, out.master.point(), problem.budget, cfg);
    rec.subproblem_time = sp.wall_time;
    out.subproblem_time += sp.wall_time;
    out.subproblem_auxiliaries = sp.num_auxiliaries;
    rec.residual = sp.residual;
    rec.vertex = sp.vertex;
    rec.bigm_warnings = sp.bigm_warnings.size();
    out.final_residual = sp.residual;

    bool done = sp.residual <= convergence.feasibility_tol;
    if (!done && convergence.residual_change_tol && k > 1 && std::isfinite(sp.residual) &&
        std::abs(sp.residual - previous_residual) < *convergence.residual_change_tol) {
      done = true;
      rec.note = "stopped on the |R_k+1 - R_k| rule";
    }
    previous_residual = sp.residual;
    if (done) {
      rec.scenario_cuts = master.scenario_cuts.size();
      rec.feasibility_cuts = master.feasibility_cuts;
      out.log.push_back(rec);
      if (on_iteration) on_iteration(out.log.back());
      out.status = RunStatus::converged;
      break;
    }

    if (std::find(master.scenario_cuts.begin(), master.scenario_cuts.end(), sp.vertex) != master.scenario_cuts.end())
      throw ModelError("iteration " + std::to_string(k) + " returned vertex " + sp.vertex.describe() +
                       " again with residual " + std::to_string(sp.residual) +
                       "; the master no longer enforces its cut (check tolerances and M_big)");
    fm::add_scenario_cut(master, sys, rs_ptdf, sp.vertex);
    if (algorithm == Algorithm::a3) {
      if (!sp.recourse_feasible) {
        rec.note = "no recourse at the vertex; feasibility cut skipped";
      } else {
        try {
          fm::add_feasibility_cut(master, fm::make_feasibility_cut(rs_nodal, sys, sp.row_duals, out.master.point(),
                                                                   sp.vertex, sp.residual));
        } catch (const ModelError& e) {
          rec.note = std::string("feasibility cut skipped: ") + e.what();
        }
      }
    }
    rec.scenario_cuts = master.scenario_cuts.size();
    rec.feasibility_cuts = master.feasibility_cuts;
    out.log.push_back(rec);
    if (on_iteration) on_iteration(out.log.back());
    if (k == convergence.max_iterations) out.status = RunStatus::iteration_limit;
  }
  finish(out, problem);
  out.wall_time = seconds_since(t0);
  return out;
}

RrucSolution run_extensive(const Problem& problem, const milp::SolverConfig& solver, std::size_t vertex_cap) {
  check_problem(problem);
  const auto t0 = Clock::now();
  const auto& sys = *problem.system;
  const auto vertices =
      oracles::enumerate_vertices(static_cast<int>(sys.num_wind()), sys.horizon(), problem.budget, vertex_cap);
  const auto model = fm::build_extensive(sys, *problem.ptdf, problem.risk, problem.master, vertices);
  RrucSolution out;
  out.master = fm::solve_master(model, solver);
  out.master_time = out.master.wall_time;
  switch (out.master.status) {
    case milp::SolveStatus::optimal: out.status = RunStatus::converged; break;
    case milp::SolveStatus::infeasible: out.status = RunStatus::infeasible_risk_level; break;
    case milp::SolveStatus::time_limit: out.status = RunStatus::time_limit; break;
    default: throw BackendError(std::string("extensive form: ") + milp::to_string(out.master.status));
  }
  finish(out, problem);
  out.wall_time = seconds_since(t0);
  return out;
}

Admissibility assess_admissibility(const Problem& problem, const Matrix& u, const milp::SolverConfig& solver,
                                   const ConvergenceConfig& convergence, Algorithm algorithm) {
  check_problem(problem);
  if (!problem.risk) throw InputError("admissibility assessment needs risk tangents");
  Problem p = problem;
  p.master.fixed_commitment = u;
  p.master.objective = fm::MasterObjective::risk_only;
  p.master.risk_limit = milp::kInf;
  p.master.fixed_upper.reset();
  p.master.fixed_lower.reset();
  const auto sol = run(algorithm, p, solver, convergence);
  if (sol.status == RunStatus::infeasible_risk_level)
    throw ModelError("commitment cannot serve the robust uncertainty set");
  Admissibility a;
  a.status = sol.status;
  a.w_upper = sol.master.w_upper;
  a.w_lower = sol.master.w_lower;
  a.risk_envelope = sol.master.risk_envelope;
  a.risk_exact = sol.risk_exact;
  a.iterations = sol.iterations();
  return a;
}

SweepReport sweep_risk_levels(const Problem& problem, const std::vector<double>& levels,
                              const milp::SolverConfig& solver, const ConvergenceConfig& convergence,
                              Algorithm algorithm, double bisection_tol) {
  if (levels.empty()) throw InputError("no risk levels to sweep");
  if (!std::is_sorted(levels.begin(), levels.end(), std::greater<>()))
    throw InputError("risk levels must be sorted in descending order");
  if (!(bisection_tol > 0.0)) throw InputError("bisection tolerance must be positive");

  const auto solve_at = [&](double level) {
    Problem p = problem;
    p.master.risk_limit = level;
    const auto sol = run(algorithm, p, solver, convergence);
    SweepPoint pt;
    pt.level = level;
    pt.status = sol.status;
    pt.iterations = sol.iterations();
    if (sol.status != RunStatus::infeasible_risk_level) {
      pt.cost = sol.master.operational_cost();
      pt.risk = sol.master.risk_envelope;
    }
    return pt;
  };

  SweepReport rep;
  std::optional<double> feasible, infeasible;
  for (double level : levels) {
    rep.points.push_back(solve_at(level));
    if (rep.points.back().status != RunStatus::infeasible_risk_level) feasible = level;
  }
  if (!feasible) throw ModelError("every swept risk level is infeasible");
  if (levels.size() == 1) return rep;
  for (const auto& pt : rep.points)
    if (pt.status == RunStatus::infeasible_risk_level && pt.level < *feasible) {
      infeasible = pt.level;
      break;
    }
  if (!infeasible) {
    // Nothing infeasible below the smallest feasible level yet; probe zero.
    if (solve_at(0.0).status != RunStatus::infeasible_risk_level) {
      rep.mfrl = 0.0;
      rep.feasible_bound = rep.infeasible_bound = 0.0;
      return rep;
    }
    infeasible = 0.0;
  }
  double hi = *feasible, lo = *infeasible;
  if (!std::isfinite(hi)) {
    // Only +inf was feasible: bracket from the attained risk.
    hi = rep.points.front().risk;
    if (solve_at(hi).status == RunStatus::infeasible_risk_level) hi = std::max(1.0, 2.0 * hi);
  }
  while (hi - lo > bisection_tol) {
    const double mid = 0.5 * (hi + lo);
    if (solve_at(mid).status == RunStatus::infeasible_risk_level) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++rep.bisection_steps;
  }
  rep.mfrl = hi;
  rep.feasible_bound = hi;
  rep.infeasible_bound = lo;
  return rep;
}

}  // namespace rruc::ccg
