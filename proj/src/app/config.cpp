#include "rruc/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rruc/error.hpp"

namespace rruc::app {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("config " + path + ": " + what);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Optional member: calls `f` when present.
template <class F>
void opt(const json& obj, const char* key, F f) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) f(*it, std::string(key));
}

double limit_value(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "unbounded") return milp::kInf;
    fail(path, "expected number or \"unbounded\"");
  }
  return number(v, path);
}

formulations::Budget budget(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected object with temporal and spatial");
  formulations::Budget b;
  if (!v.contains("temporal") || !v.contains("spatial")) fail(path, "needs temporal and spatial");
  b.temporal = integer(v["temporal"], path + ".temporal");
  b.spatial = integer(v["spatial"], path + ".spatial");
  return b;
}

void prices(const json& v, int T, risk::Prices& out) {
  if (v.is_object()) {
    if (!v.contains("curtailment") || !v.contains("load_shed")) fail("prices", "needs curtailment and load_shed");
    out.curtailment = numbers(v["curtailment"], "prices.curtailment");
    out.load_shed = numbers(v["load_shed"], "prices.load_shed");
    if (out.curtailment.size() != static_cast<std::size_t>(T) || out.load_shed.size() != static_cast<std::size_t>(T))
      fail("prices", "series length differs from the horizon " + std::to_string(T));
    return;
  }
  if (!v.is_array()) fail("prices", "expected object of series or array of period blocks");
  out.curtailment.assign(static_cast<std::size_t>(T), std::nan(""));
  out.load_shed.assign(static_cast<std::size_t>(T), std::nan(""));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto path = "prices[" + std::to_string(i) + "]";
    const auto& blk = v[i];
    if (!blk.is_object() || !blk.contains("periods")) fail(path, "expected {periods, curtailment, load_shed}");
    const auto range = numbers(blk["periods"], path + ".periods");
    if (range.size() != 2) fail(path + ".periods", "expected [first, last]");
    const int first = static_cast<int>(range[0]), last = static_cast<int>(range[1]);
    if (first < 1 || last > T || first > last) fail(path + ".periods", "outside 1.." + std::to_string(T));
    const double e = number(blk.value("curtailment", json()), path + ".curtailment");
    const double f = number(blk.value("load_shed", json()), path + ".load_shed");
    for (int t = first; t <= last; ++t) {
      out.curtailment[static_cast<std::size_t>(t - 1)] = e;
      out.load_shed[static_cast<std::size_t>(t - 1)] = f;
    }
  }
  for (int t = 0; t < T; ++t)
    if (std::isnan(out.curtailment[static_cast<std::size_t>(t)]))
      fail("prices", "period " + std::to_string(t + 1) + " has no price block");
}

}  // namespace

void RunConfig::validate(const grid::PowerSystem& system) const {
  static const std::vector<std::string> algorithms{"a1", "a2", "a3", "extensive", "duc", "ruc"};
  if (std::find(algorithms.begin(), algorithms.end(), algorithm) == algorithms.end())
    throw InputError("config algorithm: unknown '" + algorithm + "'");
  budget.validate();
  for (const auto& b : benchmark_budgets) b.validate();
  (void)prices.validate(system.horizon());
  if (!(penalty > 0.0)) throw InputError("config penalty: K must be positive");
  if (!(risk_limit >= 0.0)) throw InputError("config risk_limit: must be nonnegative or \"unbounded\"");
  if (sigma.size() != system.num_wind())
    throw InputError("config sigma: " + std::to_string(sigma.size()) + " values for " +
                     std::to_string(system.num_wind()) + " wind farms");
  for (double s : sigma)
    if (!(s >= 0.0)) throw InputError("config sigma: values must be nonnegative");
  if (tangents_per_segment < 1) throw InputError("config tangents_per_segment: must be at least 1");
  if (cost_segments < 1) throw InputError("config cost_segments: must be at least 1");
  if (!(reserve_rate >= 0.0)) throw InputError("config reserve_rate: must be nonnegative");
  if (!(ruc_confidence > 0.5 && ruc_confidence < 1.0)) throw InputError("config ruc_confidence: must lie in (0.5, 1)");
  if (!(mfrl_tol > 0.0)) throw InputError("config mfrl_tol: must be positive");
  solver.validate();
  convergence.validate();
}

RunConfig load_config(std::string_view document, int horizon) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "expected a JSON object");
  RunConfig c;
  opt(doc, "schema", [](const json& v, const std::string& p) {
    if (integer(v, p) != kConfigSchemaVersion) fail(p, "unsupported schema version");
  });
  opt(doc, "algorithm", [&](const json& v, const std::string& p) {
    if (!v.is_string()) fail(p, "expected string");
    c.algorithm = v.get<std::string>();
  });
  opt(doc, "budget", [&](const json& v, const std::string& p) { c.budget = budget(v, p); });
  if (!doc.contains("prices")) fail("prices", "missing required field");
  prices(doc["prices"], horizon, c.prices);
  opt(doc, "risk_limit", [&](const json& v, const std::string& p) { c.risk_limit = limit_value(v, p); });
  opt(doc, "penalty", [&](const json& v, const std::string& p) { c.penalty = number(v, p); });
  if (!doc.contains("sigma")) fail("sigma", "missing required field");
  c.sigma = numbers(doc["sigma"], "sigma");
  opt(doc, "sigma_decay", [&](const json& v, const std::string& p) { c.sigma_decay = number(v, p); });
  opt(doc, "alpha", [&](const json& v, const std::string& p) {
    const auto a = numbers(v, p);
    if (a.size() != 3) fail(p, "expected three levels");
    c.alpha = {a[0], a[1], a[2]};
  });
  opt(doc, "tangents_per_segment", [&](const json& v, const std::string& p) { c.tangents_per_segment = integer(v, p); });
  opt(doc, "cost_segments", [&](const json& v, const std::string& p) { c.cost_segments = integer(v, p); });
  opt(doc, "reserve_rate", [&](const json& v, const std::string& p) { c.reserve_rate = number(v, p); });
  opt(doc, "ruc_confidence", [&](const json& v, const std::string& p) { c.ruc_confidence = number(v, p); });
  opt(doc, "solver", [&](const json& s, const std::string&) {
    opt(s, "backend", [&](const json& v, const std::string& p) {
      if (!v.is_string()) fail("solver." + p, "expected string");
      c.solver.backend = v.get<std::string>();
    });
    opt(s, "mip_gap", [&](const json& v, const std::string& p) { c.solver.mip_gap = number(v, "solver." + p); });
    opt(s, "time_limit", [&](const json& v, const std::string& p) { c.solver.time_limit = limit_value(v, "solver." + p); });
    opt(s, "big_m", [&](const json& v, const std::string& p) { c.solver.big_m = number(v, "solver." + p); });
    opt(s, "seed", [&](const json& v, const std::string& p) { c.solver.seed = integer(v, "solver." + p); });
  });
  opt(doc, "convergence", [&](const json& s, const std::string&) {
    opt(s, "feasibility_tol", [&](const json& v, const std::string& p) { c.convergence.feasibility_tol = number(v, "convergence." + p); });
    opt(s, "residual_change_tol", [&](const json& v, const std::string& p) { c.convergence.residual_change_tol = number(v, "convergence." + p); });
    opt(s, "max_iterations", [&](const json& v, const std::string& p) { c.convergence.max_iterations = integer(v, "convergence." + p); });
    opt(s, "time_limit", [&](const json& v, const std::string& p) { c.convergence.time_limit = limit_value(v, "convergence." + p); });
  });
  opt(doc, "seed", [&](const json& v, const std::string& p) {
    if (!v.is_number_unsigned()) fail(p, "expected nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  });
  opt(doc, "samples", [&](const json& v, const std::string& p) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(p, "expected nonnegative integer");
    c.samples = v.get<std::size_t>();
  });
  opt(doc, "risk_levels", [&](const json& v, const std::string& p) {
    if (!v.is_array()) fail(p, "expected array");
    for (std::size_t i = 0; i < v.size(); ++i) c.risk_levels.push_back(limit_value(v[i], p + "[" + std::to_string(i) + "]"));
  });
  opt(doc, "benchmark_budgets", [&](const json& v, const std::string& p) {
    if (!v.is_array()) fail(p, "expected array");
    for (std::size_t i = 0; i < v.size(); ++i) c.benchmark_budgets.push_back(budget(v[i], p + "[" + std::to_string(i) + "]"));
  });
  opt(doc, "mfrl_tol", [&](const json& v, const std::string& p) { c.mfrl_tol = number(v, p); });
  opt(doc, "output_dir", [&](const json& v, const std::string& p) {
    if (!v.is_string()) fail(p, "expected string");
    c.output_dir = v.get<std::string>();
  });
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path, int horizon) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), horizon);
}

std::string serialize_config(const RunConfig& c) {
  const auto limit = [](double x) { return std::isfinite(x) ? json(x) : json("unbounded"); };
  json doc;
  doc["schema"] = kConfigSchemaVersion;
  doc["algorithm"] = c.algorithm;
  doc["budget"] = {{"temporal", c.budget.temporal}, {"spatial", c.budget.spatial}};
  doc["prices"] = {{"curtailment", c.prices.curtailment}, {"load_shed", c.prices.load_shed}};
  doc["risk_limit"] = limit(c.risk_limit);
  doc["penalty"] = c.penalty;
  doc["sigma"] = c.sigma;
  doc["sigma_decay"] = c.sigma_decay;
  doc["alpha"] = c.alpha;
  doc["tangents_per_segment"] = c.tangents_per_segment;
  doc["cost_segments"] = c.cost_segments;
  doc["reserve_rate"] = c.reserve_rate;
  doc["ruc_confidence"] = c.ruc_confidence;
  doc["solver"] = {{"backend", c.solver.backend}, {"mip_gap", c.solver.mip_gap},
                   {"time_limit", limit(c.solver.time_limit)}, {"big_m", c.solver.big_m}, {"seed", c.solver.seed}};
  doc["convergence"] = {{"feasibility_tol", c.convergence.feasibility_tol},
                        {"max_iterations", c.convergence.max_iterations},
                        {"time_limit", limit(c.convergence.time_limit)}};
  if (c.convergence.residual_change_tol) doc["convergence"]["residual_change_tol"] = *c.convergence.residual_change_tol;
  doc["seed"] = c.seed;
  doc["samples"] = c.samples;
  json levels = json::array();
  for (double l : c.risk_levels) levels.push_back(limit(l));
  doc["risk_levels"] = levels;
  json budgets = json::array();
  for (const auto& b : c.benchmark_budgets) budgets.push_back({{"temporal", b.temporal}, {"spatial", b.spatial}});
  doc["benchmark_budgets"] = budgets;
  doc["mfrl_tol"] = c.mfrl_tol;
  doc["output_dir"] = c.output_dir;
  return doc.dump(2);
}

Session::Session(grid::PowerSystem s, RunConfig c)
    : system(std::move(s)), config(std::move(c)), ptdf(grid::compute_ptdf(system)) {
  config.validate(system);
  errors = risk::make_error_model(system, config.sigma, config.sigma_decay);
  risk::RiskSettings rs;
  rs.layout = risk::PdfLayout::from_alpha(config.alpha[0], config.alpha[1], config.alpha[2]);
  rs.tangents_per_segment = config.tangents_per_segment;
  risk = risk::build_system_tangents(system, errors, config.prices, rs);
}

ccg::Problem Session::problem() const {
  ccg::Problem p;
  p.system = &system;
  p.ptdf = &ptdf;
  p.risk = &risk;
  p.prices = config.prices;
  p.budget = config.budget;
  p.master.risk_limit = config.risk_limit;
  p.master.penalty = config.penalty;
  p.master.cost_segments = config.cost_segments;
  return p;
}

}  // namespace rruc::app
