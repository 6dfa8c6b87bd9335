#include "rruc/milp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "highs_c.hpp"
#include "rruc/error.hpp"

namespace rruc::milp {

void SolverConfig::validate() const {
  if (backend != "highs") throw InputError("unknown MILP backend '" + backend + "'");
  if (!(mip_gap > 0.0 && mip_gap < 1.0)) throw InputError("mip_gap must lie in (0, 1)");
  if (!(time_limit > 0.0)) throw InputError("time_limit must be positive");
  if (!(big_m > 0.0)) throw InputError("big_m must be positive");
  if (!(feasibility_tol > 0.0)) throw InputError("feasibility_tol must be positive");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::time_limit: return "time-limit";
    case SolveStatus::error: return "error";
  }
  return "error";
}

std::string backend_version() { return std::string("HiGHS ") + Highs_version(); }

namespace {

struct Csr {
  std::vector<HighsInt> start;
  std::vector<HighsInt> index;
  std::vector<double> value;
  std::vector<double> lower;
  std::vector<double> upper;
};

Csr to_csr(const Model& model) {
  Csr a;
  a.start.reserve(model.num_constraints() + 1);
  std::vector<Term> row;
  for (const auto& c : model.constraints()) {
    a.start.push_back(static_cast<HighsInt>(a.index.size()));
    row.assign(c.expr.terms().begin(), c.expr.terms().end());
    std::sort(row.begin(), row.end(),
              [](const Term& x, const Term& y) { return x.var.index < y.var.index; });
    for (std::size_t i = 0; i < row.size();) {
      double coef = 0.0;
      const auto col = row[i].var.index;
      for (; i < row.size() && row[i].var.index == col; ++i) coef += row[i].coef;
      if (coef == 0.0) continue;
      a.index.push_back(static_cast<HighsInt>(col));
      a.value.push_back(coef);
    }
    const double shift = c.expr.constant();
    a.lower.push_back(c.lower - shift);
    a.upper.push_back(c.upper - shift);
  }
  a.start.push_back(static_cast<HighsInt>(a.index.size()));
  return a;
}

struct HighsDeleter {
  void operator()(void* h) const { Highs_destroy(h); }
};
using HighsPtr = std::unique_ptr<void, HighsDeleter>;

HighsPtr make_instance(const SolverConfig& config, bool presolve) {
  HighsPtr h(Highs_create());
  if (!h) throw BackendError("HiGHS: could not create a solver instance");
  if (Highs_getSizeofHighsInt(h.get()) != static_cast<HighsInt>(sizeof(HighsInt)))
    throw BackendError("HiGHS: linked library uses a different integer width");
  void* p = h.get();
  Highs_setBoolOptionValue(p, "output_flag", 0);
  Highs_setDoubleOptionValue(p, "mip_rel_gap", config.mip_gap);
  if (std::isfinite(config.time_limit)) Highs_setDoubleOptionValue(p, "time_limit", config.time_limit);
  Highs_setDoubleOptionValue(p, "primal_feasibility_tolerance", config.feasibility_tol);
  Highs_setDoubleOptionValue(p, "mip_feasibility_tolerance", config.feasibility_tol);
  Highs_setIntOptionValue(p, "random_seed", config.seed);
  if (!presolve) Highs_setStringOptionValue(p, "presolve", "off");
  return h;
}

HighsInt run_once(const Model& model, const Csr& a, const SolverConfig& config, bool presolve,
                  SolveOutcome& out) {
  const auto n = static_cast<HighsInt>(model.num_variables());
  const auto m = static_cast<HighsInt>(model.num_constraints());
  std::vector<double> cost(model.num_variables(), 0.0);
  for (const auto& t : model.objective().terms()) cost[t.var.index] += t.coef;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<HighsInt> integrality;
  lo.reserve(model.num_variables());
  hi.reserve(model.num_variables());
  for (const auto& v : model.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
    integrality.push_back(v.kind == VarKind::binary ? highs::kInteger : 0);
  }
  const bool mip = model.is_mip();
  const HighsInt sense = model.sense() == Sense::minimize ? highs::kMinimize : highs::kMaximize;

  auto h = make_instance(config, presolve);
  const HighsInt nnz = a.start.back();
  HighsInt rc = 0;
  if (mip) {
    rc = Highs_passMip(h.get(), n, m, nnz, highs::kRowwise, sense, model.objective().constant(),
                       cost.data(), lo.data(), hi.data(), a.lower.data(), a.upper.data(),
                       a.start.data(), a.index.data(), a.value.data(), integrality.data());
  } else {
    rc = Highs_passLp(h.get(), n, m, nnz, highs::kRowwise, sense, model.objective().constant(),
                      cost.data(), lo.data(), hi.data(), a.lower.data(), a.upper.data(),
                      a.start.data(), a.index.data(), a.value.data());
  }
  if (rc == highs::kStatusError) {
    out.status = SolveStatus::error;
    out.message = "HiGHS rejected the model";
    return -1;
  }
  if (Highs_run(h.get()) == highs::kStatusError) {
    out.status = SolveStatus::error;
    out.message = "HiGHS run failed";
    return -1;
  }
  const HighsInt status = Highs_getModelStatus(h.get());
  HighsInt primal = 0;
  Highs_getIntInfoValue(h.get(), "primal_solution_status", &primal);
  const bool optimal = status == highs::kOptimal || status == highs::kModelEmpty;
  if (optimal || (status == highs::kTimeLimit && primal == highs::kSolutionFeasible)) {
    out.values.assign(model.num_variables(), 0.0);
    std::vector<double> col_dual(model.num_variables());
    std::vector<double> row_value(model.num_constraints());
    std::vector<double> row_dual(model.num_constraints());
    Highs_getSolution(h.get(), out.values.data(), col_dual.data(), row_value.data(),
                      row_dual.data());
    // Binaries come back as doubles within the integrality tolerance.
    for (std::size_t j = 0; j < model.num_variables(); ++j)
      if (model.variables()[j].kind == VarKind::binary) out.values[j] = std::round(out.values[j]);
    if (!mip) out.row_duals = std::move(row_dual);
    out.objective = Highs_getObjectiveValue(h.get());
    if (mip) Highs_getDoubleInfoValue(h.get(), "mip_gap", &out.gap);
  }
  return status;
}

}  // namespace

SolveOutcome solve(const Model& model, const SolverConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  if (model.num_variables() == 0) {
    bool feasible = true;
    for (const auto& c : model.constraints())
      feasible = feasible && c.lower <= c.expr.constant() + config.feasibility_tol &&
                 c.expr.constant() <= c.upper + config.feasibility_tol;
    out.status = feasible ? SolveStatus::optimal : SolveStatus::infeasible;
    out.objective = model.objective().constant();
    out.row_duals.assign(model.num_constraints(), 0.0);
    return out;
  }

  const Csr a = to_csr(model);
  HighsInt status = run_once(model, a, config, true, out);
  if (status == highs::kUnboundedOrInfeasible) {
    out = SolveOutcome{};
    status = run_once(model, a, config, false, out);
  }
  switch (status) {
    case -1: break;
    case highs::kOptimal:
    case highs::kModelEmpty: out.status = SolveStatus::optimal; break;
    case highs::kInfeasible: out.status = SolveStatus::infeasible; break;
    case highs::kUnbounded: out.status = SolveStatus::unbounded; break;
    case highs::kTimeLimit: out.status = SolveStatus::time_limit; break;
    default:
      out.status = SolveStatus::error;
      out.message = "HiGHS model status " + std::to_string(status);
  }
  if (out.status != SolveStatus::optimal && out.status != SolveStatus::time_limit) {
    out.values.clear();
    out.row_duals.clear();
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<BigMWarning> check_bigm_slack(std::span<const double> values, double big_m,
                                          double margin) {
  std::vector<BigMWarning> hits;
  const double threshold = (1.0 - margin) * big_m;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) >= threshold) hits.push_back({i, values[i]});
  return hits;
}

std::vector<BigMWarning> check_bigm_slack(const SolveOutcome& outcome, std::span<const VarId> vars,
                                          double big_m, double margin) {
  std::vector<double> picked;
  picked.reserve(vars.size());
  for (auto v : vars) picked.push_back(outcome.value(v));
  return check_bigm_slack(picked, big_m, margin);
}

}  // namespace rruc::milp
