#include "rruc/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rruc/error.hpp"
#include "rruc/grid/case_io.hpp"

namespace rruc::app {

namespace {

using nlohmann::json;
namespace fm = rruc::formulations;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shortest text that reads back to the same double.
std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int digits = 4) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

json limit_json(double x) { return std::isfinite(x) ? json(x) : json("unbounded"); }

void write_text(const fs::path& path, const std::string& text, CommandResult& result) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
  result.files.push_back(path);
}

fs::path output_dir(const Session& s, const CommandOptions& o) {
  fs::path dir = o.output_dir.value_or(s.config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::unique_ptr<Session> open_session(const fs::path& case_path, const fs::path& config_path,
                                      const CommandOptions& o) {
  auto system = grid::load_case_file(case_path);
  auto config = load_config_file(config_path, system.horizon());
  if (o.algorithm) config.algorithm = *o.algorithm;
  return std::make_unique<Session>(std::move(system), std::move(config));
}

void say(const CommandOptions& o, const std::string& line) {
  if (o.log) *o.log << line << '\n';
}

// Maps the error taxonomy onto exit codes.
template <class F>
CommandResult guarded(F body) {
  CommandResult r;
  try {
    body(r);
  } catch (const InputError& e) {
    r.exit_code = kInputError;
    r.message = std::string("input error: ") + e.what();
  } catch (const ModelError& e) {
    r.exit_code = kInfeasible;
    r.message = std::string("model error: ") + e.what();
  } catch (const BackendError& e) {
    r.exit_code = kBackendError;
    r.message = std::string("backend error: ") + e.what();
  } catch (const json::exception& e) {
    r.exit_code = kInputError;
    r.message = std::string("input error: ") + e.what();
  }
  return r;
}

// Q set to the tangent envelope of the stored band, so baselines carry a
// consistent risk column.
void envelope_risk(fm::MasterSolution& m, const Session& s) {
  const std::size_t M = s.system.num_wind(), T = static_cast<std::size_t>(s.system.horizon());
  m.q_upper.assign(M, std::vector<double>(T, 0.0));
  m.q_lower.assign(M, std::vector<double>(T, 0.0));
  m.risk_envelope = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t t = 0; t < T; ++t) {
      const auto& c = s.risk.cell(i, t);
      m.q_upper[i][t] = risk::envelope(c.upper, m.w_upper[i][t]);
      m.q_lower[i][t] = risk::envelope(c.lower, m.w_lower[i][t]);
      m.risk_envelope += m.q_upper[i][t] + m.q_lower[i][t];
    }
}

ccg::RrucSolution solve_duc(const Session& s) {
  const auto t0 = Clock::now();
  const auto model = fm::build_duc(s.system, s.ptdf, s.config.reserve_rate, s.config.cost_segments);
  ccg::RrucSolution out;
  out.master = fm::solve_master(model, s.config.solver);
  out.master_time = out.master.wall_time;
  switch (out.master.status) {
    case milp::SolveStatus::optimal: out.status = ccg::RunStatus::converged; break;
    case milp::SolveStatus::infeasible: out.status = ccg::RunStatus::infeasible_risk_level; break;
    case milp::SolveStatus::time_limit: out.status = ccg::RunStatus::time_limit; break;
    default: throw BackendError(std::string("deterministic UC: ") + milp::to_string(out.master.status));
  }
  ccg::IterationRecord rec;
  rec.iteration = 1;
  rec.master_objective = out.master.objective;
  rec.master_time = out.master.wall_time;
  rec.vertex = fm::ScenarioVertex::zero(static_cast<int>(s.system.num_wind()), s.system.horizon());
  rec.note = "deterministic";
  out.log.push_back(rec);
  out.wall_time = seconds_since(t0);
  return out;
}

// -0.0 from rounded binaries prints as 0.
json matrix_json(fm::Matrix m) {
  for (auto& row : m)
    for (auto& x : row) x += 0.0;
  return m;
}

fm::Matrix matrix_from(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  return doc.at(key).get<fm::Matrix>();
}

// Engine variant for runs the config does not name (baselines, extensive):
// the nodal subproblem is the smaller one.
ccg::Algorithm engine_algorithm(const RunConfig& c) {
  if (c.algorithm == "a1" || c.algorithm == "a2" || c.algorithm == "a3") return ccg::parse_algorithm(c.algorithm);
  return ccg::Algorithm::a2;
}

double optional_number(const json& v) { return v.is_number() ? v.get<double>() : milp::kInf; }

}  // namespace

ModelRun solve_model(const Session& session, const std::string& model, const ccg::IterationCallback& on_iteration) {
  const auto& cfg = session.config;
  ModelRun run;
  run.model = model;
  const auto base = session.problem();

  if (model == "duc") {
    run.solution = solve_duc(session);
  } else if (model == "ruc") {
    const auto band = fm::build_ruc_bounds(session.system, session.errors.sigma, cfg.ruc_confidence);
    auto p = base;
    p.master.objective = fm::MasterObjective::cost;
    p.master.risk_limit = milp::kInf;
    p.master.fixed_upper = band.upper;
    p.master.fixed_lower = band.lower;
    run.solution = ccg::run(engine_algorithm(cfg), p, cfg.solver, cfg.convergence, on_iteration);
  } else if (model == "extensive") {
    run.solution = ccg::run_extensive(base, cfg.solver);
  } else {
    run.solution = ccg::run(ccg::parse_algorithm(model), base, cfg.solver, cfg.convergence, on_iteration);
  }

  if (!run.feasible()) {
    run.message = model == "duc"   ? "deterministic UC is infeasible at forecast wind with the reserve requirement"
                  : model == "ruc" ? "no commitment is robust over the fixed RUC band"
                                   : "risk level " + num(cfg.risk_limit) + " $ admits no robust commitment";
    return run;
  }

  if (model == "duc" || model == "ruc") {
    const auto t0 = Clock::now();
    envelope_risk(run.solution.master, session);
    run.solution.risk_exact = risk::total_risk_exact(session.system, session.risk, cfg.prices,
                                                     run.solution.master.w_upper, run.solution.master.w_lower);
    run.solution.penalty_cost = 0.0;
    const auto a = ccg::assess_admissibility(base, run.solution.master.u, cfg.solver, cfg.convergence,
                                             engine_algorithm(cfg));
    run.risk = a.risk_exact;
    run.risk_band_upper = a.w_upper;
    run.risk_band_lower = a.w_lower;
    run.solution.wall_time += seconds_since(t0);
  } else {
    run.risk = run.solution.risk_exact;
    run.risk_band_upper = run.solution.master.w_upper;
    run.risk_band_lower = run.solution.master.w_lower;
  }
  if (run.solution.status != ccg::RunStatus::converged)
    run.message = std::string("stopped on ") + ccg::to_string(run.solution.status);
  return run;
}

std::string serialize_solution(const ModelRun& run, const Session& session) {
  const auto& m = run.solution.master;
  json doc;
  doc["schema"] = "rruc-solution/1";
  doc["model"] = run.model;
  doc["status"] = ccg::to_string(run.solution.status);
  doc["shape"] = {{"generators", session.system.num_generators()},
                  {"wind", session.system.num_wind()},
                  {"horizon", session.system.horizon()}};
  doc["budget"] = {{"temporal", session.config.budget.temporal}, {"spatial", session.config.budget.spatial}};
  doc["risk_limit"] = limit_json(session.config.risk_limit);
  doc["objective"] = m.objective;
  doc["gap"] = m.gap;
  doc["costs"] = {{"startup", m.startup_cost},
                  {"no_load", m.no_load_cost},
                  {"energy", m.energy_cost},
                  {"operational", m.operational_cost()},
                  {"penalty", run.solution.penalty_cost}};
  doc["risk"] = {{"envelope", m.risk_envelope}, {"exact", run.solution.risk_exact}, {"scored", run.risk}};
  doc["final_residual"] = run.solution.final_residual;
  doc["u"] = matrix_json(m.u);
  doc["z"] = matrix_json(m.z);
  doc["p"] = matrix_json(m.p);
  doc["w_upper"] = matrix_json(m.w_upper);
  doc["w_lower"] = matrix_json(m.w_lower);
  doc["q_upper"] = matrix_json(m.q_upper);
  doc["q_lower"] = matrix_json(m.q_lower);
  if (run.model == "duc" || run.model == "ruc") {
    doc["assessed_band"] = {{"w_upper", run.risk_band_upper}, {"w_lower", run.risk_band_lower}};
  }
  json log = json::array();
  for (const auto& r : run.solution.log) log.push_back({{"iteration", r.iteration}, {"vertex", r.vertex.describe()}});
  doc["vertex_log"] = log;
  return doc.dump(2) + "\n";
}

StoredSolution load_solution_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open solution file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("solution " + path.string() + ": not valid JSON: " + e.what());
  }
  if (doc.value("schema", std::string()) != "rruc-solution/1")
    throw InputError("solution " + path.string() + ": unknown schema");
  StoredSolution s;
  try {
    s.model = doc.at("model").get<std::string>();
    s.status = doc.at("status").get<std::string>();
    auto& m = s.master;
    m.status = milp::SolveStatus::optimal;
    m.objective = doc.at("objective").get<double>();
    m.gap = doc.value("gap", 0.0);
    const auto& c = doc.at("costs");
    m.startup_cost = c.at("startup").get<double>();
    m.no_load_cost = c.at("no_load").get<double>();
    m.energy_cost = c.at("energy").get<double>();
    m.risk_envelope = doc.at("risk").at("envelope").get<double>();
    s.risk = optional_number(doc.at("risk").at("scored"));
    m.u = matrix_from(doc, "u");
    m.z = matrix_from(doc, "z");
    m.p = matrix_from(doc, "p");
    m.w_upper = matrix_from(doc, "w_upper");
    m.w_lower = matrix_from(doc, "w_lower");
    m.q_upper = matrix_from(doc, "q_upper");
    m.q_lower = matrix_from(doc, "q_lower");
    for (const auto& r : doc.value("vertex_log", json::array())) s.vertex_log.push_back(r.at("vertex").get<std::string>());
  } catch (const json::exception& e) {
    throw InputError("solution " + path.string() + ": " + e.what());
  }
  return s;
}

std::string breakdown_header() {
  return "model,status,uc_cost,ed_cost,operational_cost,risk,cost_plus_risk,penalty,objective,iterations,total_s,mp_s,"
         "sp_s";
}

std::string breakdown_row(const ModelRun& run) {
  const auto& s = run.solution;
  const auto& m = s.master;
  std::ostringstream o;
  o << run.model << ',' << ccg::to_string(s.status) << ',';
  if (run.feasible()) {
    const double uc = m.startup_cost + m.no_load_cost;
    o << fixed(uc) << ',' << fixed(m.energy_cost) << ',' << fixed(m.operational_cost()) << ',' << fixed(run.risk)
      << ',' << fixed(m.operational_cost() + run.risk) << ',' << fixed(s.penalty_cost) << ',' << fixed(m.objective);
  } else {
    o << ",,,,,,";
  }
  o << ',' << s.iterations() << ',' << fixed(s.wall_time, 3) << ',' << fixed(s.master_time, 3) << ','
    << fixed(s.subproblem_time, 3);
  return o.str();
}

CommandResult cmd_solve(const fs::path& case_path, const fs::path& config_path, const CommandOptions& options) {
  return guarded([&](CommandResult& r) {
    const auto session = open_session(case_path, config_path, options);
    const auto& cfg = session->config;
    const auto dir = output_dir(*session, options);
    for (const auto& w : cfg.prices.validate(session->system.horizon())) say(options, "warning: " + w);

    if (options.dump_lp) {
      auto settings = session->problem().master;
      const auto model = cfg.algorithm == "duc"
                             ? fm::build_duc(session->system, session->ptdf, cfg.reserve_rate, cfg.cost_segments)
                             : fm::build_master(session->system, session->ptdf, &session->risk, settings);
      write_text(dir / "master.lp", model.model.to_lp_text(), r);
    }

    const auto run = solve_model(*session, cfg.algorithm, [&](const ccg::IterationRecord& rec) {
      say(options, "iter " + std::to_string(rec.iteration) + "  master " + fixed(rec.master_objective, 2) +
                       "  R " + fixed(rec.residual, 6) + "  " + rec.vertex.describe() +
                       (rec.note.empty() ? "" : "  (" + rec.note + ")"));
    });

    std::string jsonl;
    for (const auto& rec : run.solution.log) {
      json line = {{"iteration", rec.iteration},
                   {"master_objective", rec.master_objective},
                   {"residual", std::isfinite(rec.residual) ? json(rec.residual) : json("inf")},
                   {"vertex", rec.vertex.describe()},
                   {"master_s", rec.master_time},
                   {"subproblem_s", rec.subproblem_time},
                   {"scenario_cuts", rec.scenario_cuts},
                   {"feasibility_cuts", rec.feasibility_cuts},
                   {"bigm_warnings", rec.bigm_warnings}};
      if (!rec.note.empty()) line["note"] = rec.note;
      jsonl += line.dump() + "\n";
    }
    write_text(dir / "iterations.jsonl", jsonl, r);
    write_text(dir / "breakdown.csv", breakdown_header() + "\n" + breakdown_row(run) + "\n", r);

    if (!run.feasible()) {
      r.exit_code = kInfeasible;
      r.message = run.message;
      if (cfg.algorithm != "duc" && cfg.algorithm != "ruc") {
        // Least achievable ΣQ over all robust commitments.
        auto p = session->problem();
        p.master.objective = fm::MasterObjective::risk_only;
        p.master.risk_limit = milp::kInf;
        const auto least = ccg::run(engine_algorithm(cfg), p, cfg.solver, cfg.convergence);
        if (least.status == ccg::RunStatus::converged)
          r.message += "; minimum feasible risk level is about " + fixed(least.master.risk_envelope, 2) +
                       " $ (bracket it with `rruc sweep`)";
        else
          r.message += "; the uncertainty set admits no robust commitment at any risk level";
      }
      return;
    }

    write_text(dir / "solution.json", serialize_solution(run, *session), r);
    if (run.has_band()) {
      std::ostringstream band;
      band << "farm,period,forecast,w_lower,w_upper\n";
      for (std::size_t m = 0; m < session->system.num_wind(); ++m)
        for (int t = 0; t < session->system.horizon(); ++t) {
          const auto tt = static_cast<std::size_t>(t);
          band << session->system.wind()[m].id << ',' << t + 1 << ','
               << fixed(session->system.wind()[m].forecast[tt]) << ',' << fixed(run.risk_band_lower[m][tt]) << ','
               << fixed(run.risk_band_upper[m][tt]) << '\n';
        }
      write_text(dir / "band.csv", band.str(), r);
    }
    r.message = run.message.empty() ? std::string(ccg::to_string(run.solution.status)) +
                                          ": objective " + fixed(run.solution.objective(), 2) + " $, risk " +
                                          fixed(run.risk, 2) + " $"
                                    : run.message;
  });
}

CommandResult cmd_verify(const fs::path& case_path, const fs::path& config_path, const fs::path& solution_path,
                         const CommandOptions& options) {
  return guarded([&](CommandResult& r) {
    const auto session = open_session(case_path, config_path, options);
    const auto stored = load_solution_file(solution_path);
    const auto dir = output_dir(*session, options);
    oracles::VerifySettings vs;
    vs.robustness_tol = session->config.convergence.feasibility_tol;
    // Baselines are not bound by the risk budget of the config.
    if (stored.model != "duc" && stored.model != "ruc") vs.risk_limit = session->config.risk_limit;
    const auto verdict = oracles::verify_solution(stored.master, session->system, session->risk,
                                                  session->config.prices, session->config.budget, vs);
    std::ostringstream text;
    for (const auto& f : verdict.findings) text << (f.passed ? "PASS " : "FAIL ") << f.item << ": " << f.detail << '\n';
    text << "verdict: " << (verdict.passed() ? "pass" : "fail") << '\n';
    write_text(dir / "verdict.txt", text.str(), r);
    if (!verdict.passed()) {
      r.exit_code = kInfeasible;
      std::string failed;
      for (const auto& f : verdict.findings)
        if (!f.passed) failed += (failed.empty() ? "" : ", ") + f.item;
      r.message = "verification failed: " + failed;
      return;
    }
    r.message = "verification passed";
  });
}

CommandResult cmd_evaluate(const fs::path& case_path, const fs::path& config_path,
                           const std::vector<fs::path>& solution_paths, std::optional<std::size_t> samples,
                           std::optional<std::uint64_t> seed, const CommandOptions& options) {
  return guarded([&](CommandResult& r) {
    const auto session = open_session(case_path, config_path, options);
    if (solution_paths.empty()) throw InputError("evaluate needs at least one solution file");
    oracles::MonteCarloSettings mc;
    mc.samples = samples.value_or(session->config.samples);
    mc.seed = seed.value_or(session->config.seed);
    if (mc.samples == 0) throw InputError("sample count must be at least 1");
    std::vector<StoredSolution> stored;
    for (const auto& p : solution_paths) stored.push_back(load_solution_file(p));
    const auto dir = output_dir(*session, options);

    const auto band = fm::build_ruc_bounds(session->system, session->errors.sigma, session->config.ruc_confidence);
    std::ostringstream csv;
    csv << "# rare events: samples leaving the " << fixed(session->config.ruc_confidence, 3)
        << " Gaussian band; loss = full re-dispatch at the stored commitment, e*curtailment + f*shed\n";
    csv << "model,solution,samples,draws,seed,average_loss,average_curtailment_loss,average_shed_loss,"
           "infeasible_share\n";
    for (std::size_t i = 0; i < stored.size(); ++i) {
      const auto rep = oracles::monte_carlo_rare_event_loss(session->system, stored[i].master.u, band.upper,
                                                            band.lower, session->errors, session->config.prices, mc);
      csv << stored[i].model << ',' << solution_paths[i].string() << ',' << rep.samples << ',' << rep.draws << ','
          << mc.seed << ',' << num(rep.average_loss) << ',' << num(rep.average_curtailment_loss) << ','
          << num(rep.average_shed_loss) << ',' << num(rep.infeasible_share) << '\n';
      say(options, stored[i].model + ": average loss " + fixed(rep.average_loss, 2) + " $");
    }
    write_text(dir / "evaluation.csv", csv.str(), r);
    r.message = "evaluated " + std::to_string(stored.size()) + " solution(s) on " + std::to_string(mc.samples) +
                " rare events";
  });
}

CommandResult cmd_sweep(const fs::path& case_path, const fs::path& config_path, const std::vector<double>& levels,
                        const CommandOptions& options) {
  return guarded([&](CommandResult& r) {
    const auto session = open_session(case_path, config_path, options);
    const auto& cfg = session->config;
    auto lv = levels.empty() ? cfg.risk_levels : levels;
    if (lv.empty()) throw InputError("no risk levels given on the command line or in the config");
    std::sort(lv.begin(), lv.end(), std::greater<>());
    const auto dir = output_dir(*session, options);
    const auto rep =
        ccg::sweep_risk_levels(session->problem(), lv, cfg.solver, cfg.convergence, engine_algorithm(cfg), cfg.mfrl_tol);
    std::ostringstream csv;
    csv << "risk_level,status,operational_cost,risk,iterations\n";
    for (const auto& p : rep.points) {
      csv << (std::isfinite(p.level) ? fixed(p.level) : "unbounded") << ',' << ccg::to_string(p.status) << ',';
      if (p.status == ccg::RunStatus::infeasible_risk_level)
        csv << ",,";
      else
        csv << fixed(p.cost) << ',' << fixed(p.risk) << ',';
      csv << p.iterations << '\n';
    }
    write_text(dir / "sweep.csv", csv.str(), r);
    if (rep.mfrl) {
      json m = {{"mfrl", *rep.mfrl},
                {"feasible_bound", rep.feasible_bound},
                {"infeasible_bound", rep.infeasible_bound},
                {"bisection_steps", rep.bisection_steps}};
      write_text(dir / "mfrl.json", m.dump(2) + "\n", r);
      r.message = "MFRL in [" + fixed(rep.infeasible_bound, 2) + ", " + fixed(rep.feasible_bound, 2) + "] $";
    } else {
      r.message = "swept " + std::to_string(rep.points.size()) + " level(s); no MFRL bracket";
    }
  });
}

CommandResult cmd_benchmark(const fs::path& case_path, const fs::path& config_path, const CommandOptions& options) {
  return guarded([&](CommandResult& r) {
    const auto session = open_session(case_path, config_path, options);
    const auto& cfg = session->config;
    const auto dir = output_dir(*session, options);
    auto budgets = cfg.benchmark_budgets;
    if (budgets.empty()) budgets.push_back(cfg.budget);
    std::ostringstream csv;
    csv << "algorithm,budget_temporal,budget_spatial,status,objective,total_s,mp_s,fac_sp_s,iterations,"
           "sp_auxiliaries\n";
    for (const auto& b : budgets) {
      auto p = session->problem();
      p.budget = b;
      for (auto alg : {ccg::Algorithm::a1, ccg::Algorithm::a2, ccg::Algorithm::a3}) {
        const auto sol = ccg::run(alg, p, cfg.solver, cfg.convergence);
        csv << ccg::to_string(alg) << ',' << b.temporal << ',' << b.spatial << ',' << ccg::to_string(sol.status)
            << ',' << fixed(sol.objective()) << ',' << fixed(sol.wall_time, 3) << ',' << fixed(sol.master_time, 3)
            << ',' << fixed(sol.subproblem_time, 3) << ',' << sol.iterations() << ',' << sol.subproblem_auxiliaries
            << '\n';
        say(options, std::string(ccg::to_string(alg)) + " (" + std::to_string(b.temporal) + "," +
                         std::to_string(b.spatial) + "): " + fixed(sol.wall_time, 2) + " s");
      }
    }
    write_text(dir / "benchmark.csv", csv.str(), r);
    r.message = "benchmarked " + std::to_string(budgets.size()) + " budget(s)";
  });
}

}  // namespace rruc::app
