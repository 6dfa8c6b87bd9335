#include "rruc/grid/case_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rruc/error.hpp"

namespace rruc::grid {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected string");
  return v.get<std::string>();
}

std::vector<double> series(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

const json& array(const json& obj, const std::string& path, const char* key) {
  const auto& v = field(obj, path, key);
  if (!v.is_array()) fail(path + "." + key, "expected array");
  return v;
}

std::size_t lookup_bus(const std::map<std::string, std::size_t>& index, const std::string& id,
                       const std::string& path) {
  auto it = index.find(id);
  if (it == index.end()) fail(path, "unknown bus '" + id + "'");
  return it->second;
}

}  // namespace

PowerSystem load_case(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("case: not valid JSON: ") + e.what());
  }
  const std::string root = "case";
  if (!doc.is_object()) fail(root, "expected object");
  if (doc.contains("version")) {
    if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kCaseSchemaVersion)
      fail("case.version", "unsupported schema version");
  }
  const int horizon = integer(doc, root, "horizon");

  std::vector<Bus> buses;
  std::map<std::string, std::size_t> bus_index;
  const auto& jb = array(doc, root, "buses");
  for (std::size_t i = 0; i < jb.size(); ++i) {
    const auto path = "buses[" + std::to_string(i) + "]";
    Bus b;
    b.id = text(jb[i], path, "id");
    if (jb[i].contains("ref")) {
      if (!jb[i]["ref"].is_boolean()) fail(path + ".ref", "expected boolean");
      b.reference = jb[i]["ref"].get<bool>();
    }
    if (!bus_index.emplace(b.id, i).second) fail(path + ".id", "duplicate bus id '" + b.id + "'");
    buses.push_back(std::move(b));
  }

  std::vector<Line> lines;
  if (doc.contains("lines")) {
    const auto& jl = array(doc, root, "lines");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const auto path = "lines[" + std::to_string(i) + "]";
      Line l;
      l.id = text(jl[i], path, "id");
      l.from = lookup_bus(bus_index, text(jl[i], path, "from"), path + ".from");
      l.to = lookup_bus(bus_index, text(jl[i], path, "to"), path + ".to");
      l.susceptance = number(jl[i], path, "susceptance");
      l.capacity = number(jl[i], path, "capacity_mw");
      lines.push_back(std::move(l));
    }
  }

  std::vector<Generator> generators;
  const auto& jg = array(doc, root, "generators");
  for (std::size_t i = 0; i < jg.size(); ++i) {
    const auto path = "generators[" + std::to_string(i) + "]";
    const auto& j = jg[i];
    Generator g;
    g.id = text(j, path, "id");
    g.bus = lookup_bus(bus_index, text(j, path, "bus"), path + ".bus");
    g.p_min = number(j, path, "pmin_mw");
    g.p_max = number(j, path, "pmax_mw");
    g.ramp_up = number(j, path, "ramp_up_mw");
    g.ramp_down = number(j, path, "ramp_down_mw");
    g.min_on = integer(j, path, "min_on");
    g.min_off = integer(j, path, "min_off");
    g.startup_cost = number(j, path, "startup_cost");
    g.no_load_cost = number(j, path, "no_load_cost");
    g.c2 = number(j, path, "c2");
    g.c1 = number(j, path, "c1");
    if (j.contains("init_on")) {
      if (!j["init_on"].is_boolean()) fail(path + ".init_on", "expected boolean");
      g.init_on = j["init_on"].get<bool>();
    }
    if (j.contains("init_hours")) g.init_hours = integer(j, path, "init_hours");
    if (j.contains("init_output_mw")) g.init_output = number(j, path, "init_output_mw");
    generators.push_back(std::move(g));
  }

  std::vector<WindFarm> wind;
  if (doc.contains("wind")) {
    const auto& jw = array(doc, root, "wind");
    for (std::size_t i = 0; i < jw.size(); ++i) {
      const auto path = "wind[" + std::to_string(i) + "]";
      WindFarm w;
      w.id = text(jw[i], path, "id");
      w.bus = lookup_bus(bus_index, text(jw[i], path, "bus"), path + ".bus");
      w.capacity = number(jw[i], path, "wmax_mw");
      w.forecast = series(field(jw[i], path, "forecast_mw"), path + ".forecast_mw");
      wind.push_back(std::move(w));
    }
  }

  // Loads are kept in bus order so that serialization round-trips exactly.
  std::vector<Load> loads;
  const auto& jd = field(doc, root, "demand");
  if (!jd.is_object()) fail("case.demand", "expected object mapping bus id to series");
  std::map<std::size_t, Load> by_bus;
  for (auto it = jd.begin(); it != jd.end(); ++it) {
    const auto path = "demand." + it.key();
    Load d;
    d.bus = lookup_bus(bus_index, it.key(), path);
    d.demand = series(it.value(), path);
    by_bus.emplace(d.bus, std::move(d));
  }
  for (auto& [bus, load] : by_bus) loads.push_back(std::move(load));

  return PowerSystem::create(std::move(buses), std::move(generators), std::move(lines),
                             std::move(wind), std::move(loads), horizon);
}

PowerSystem load_case_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open case file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_case(buffer.str());
}

std::string serialize_case(const PowerSystem& system) {
  json doc;
  doc["version"] = kCaseSchemaVersion;
  doc["horizon"] = system.horizon();
  const auto& buses = system.buses();

  doc["buses"] = json::array();
  for (const auto& b : buses) {
    json jb{{"id", b.id}};
    if (b.reference) jb["ref"] = true;
    doc["buses"].push_back(jb);
  }
  doc["lines"] = json::array();
  for (const auto& l : system.lines()) {
    doc["lines"].push_back({{"id", l.id},
                            {"from", buses[l.from].id},
                            {"to", buses[l.to].id},
                            {"susceptance", l.susceptance},
                            {"capacity_mw", l.capacity}});
  }
  doc["generators"] = json::array();
  for (const auto& g : system.generators()) {
    json jg{{"id", g.id},
            {"bus", buses[g.bus].id},
            {"pmin_mw", g.p_min},
            {"pmax_mw", g.p_max},
            {"ramp_up_mw", g.ramp_up},
            {"ramp_down_mw", g.ramp_down},
            {"min_on", g.min_on},
            {"min_off", g.min_off},
            {"startup_cost", g.startup_cost},
            {"no_load_cost", g.no_load_cost},
            {"c2", g.c2},
            {"c1", g.c1}};
    if (g.init_on) jg["init_on"] = *g.init_on;
    if (g.init_hours) jg["init_hours"] = *g.init_hours;
    if (g.init_output) jg["init_output_mw"] = *g.init_output;
    doc["generators"].push_back(jg);
  }
  doc["wind"] = json::array();
  for (const auto& w : system.wind()) {
    doc["wind"].push_back({{"id", w.id},
                           {"bus", buses[w.bus].id},
                           {"wmax_mw", w.capacity},
                           {"forecast_mw", w.forecast}});
  }
  doc["demand"] = json::object();
  for (const auto& d : system.loads()) doc["demand"][buses[d.bus].id] = d.demand;
  return doc.dump(2);
}

}  // namespace rruc::grid
