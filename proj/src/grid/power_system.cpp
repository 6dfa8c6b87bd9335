#include "rruc/grid/power_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "rruc/error.hpp"

namespace rruc::grid {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

bool finite(double x) { return std::isfinite(x); }

void validate_generator(const Generator& g, std::size_t num_buses) {
  const std::string where = "generator '" + g.id + "': ";
  require(g.bus < num_buses, where + "bus does not exist");
  require(finite(g.p_min) && finite(g.p_max), where + "p_min/p_max must be finite");
  require(g.p_min >= 0.0 && g.p_min <= g.p_max, where + "requires 0 <= p_min <= p_max");
  require(finite(g.ramp_up) && g.ramp_up >= 0.0, where + "ramp_up must be >= 0");
  require(finite(g.ramp_down) && g.ramp_down >= 0.0, where + "ramp_down must be >= 0");
  require(g.min_on >= 1 && g.min_off >= 1, where + "min_on and min_off must be >= 1");
  require(finite(g.startup_cost) && finite(g.no_load_cost) && finite(g.c2) && finite(g.c1),
          where + "cost coefficients must be finite");
  require(g.c2 >= 0.0, where + "c2 must be >= 0 (convex cost)");
  if (g.init_hours) require(*g.init_hours >= 0, where + "init_hours must be >= 0");
  if (g.init_output) {
    const double p0 = *g.init_output;
    if (g.initially_on()) {
      require(p0 >= g.p_min - 1e-9 && p0 <= g.p_max + 1e-9,
              where + "init_output must lie in [p_min, p_max] for a unit initially on");
    } else {
      require(std::abs(p0) <= 1e-9, where + "init_output must be 0 for a unit initially off");
    }
  }
}

}  // namespace

PowerSystem PowerSystem::create(std::vector<Bus> buses, std::vector<Generator> generators,
                                std::vector<Line> lines, std::vector<WindFarm> wind,
                                std::vector<Load> loads, int horizon) {
  require(horizon >= 1, "horizon must be >= 1");
  require(!buses.empty(), "case has no buses");

  std::set<std::string> ids;
  std::size_t refs = 0;
  std::size_t ref = 0;
  for (std::size_t n = 0; n < buses.size(); ++n) {
    require(!buses[n].id.empty(), "bus with empty id");
    require(ids.insert(buses[n].id).second, "duplicate bus id '" + buses[n].id + "'");
    if (buses[n].reference) {
      ++refs;
      ref = n;
    }
  }
  require(refs != 0, "missing reference bus");
  require(refs == 1, "more than one reference bus");

  for (const auto& g : generators) validate_generator(g, buses.size());

  for (const auto& l : lines) {
    const std::string where = "line '" + l.id + "': ";
    require(l.from < buses.size() && l.to < buses.size(), where + "bus does not exist");
    require(l.from != l.to, where + "from and to buses must differ");
    require(finite(l.susceptance) && l.susceptance > 0.0, where + "susceptance must be > 0");
    require(finite(l.capacity) && l.capacity > 0.0, where + "capacity must be > 0");
  }

  const auto T = static_cast<std::size_t>(horizon);
  for (const auto& w : wind) {
    const std::string where = "wind farm '" + w.id + "': ";
    require(w.bus < buses.size(), where + "bus does not exist");
    require(finite(w.capacity) && w.capacity >= 0.0, where + "capacity must be >= 0");
    require(w.forecast.size() == T, where + "forecast length differs from horizon");
    for (double f : w.forecast)
      require(finite(f) && f >= 0.0 && f <= w.capacity + 1e-9,
              where + "forecast must lie in [0, capacity]");
  }

  std::set<std::size_t> load_buses;
  for (const auto& d : loads) {
    require(d.bus < buses.size(), "load at missing bus");
    require(load_buses.insert(d.bus).second,
            "bus '" + buses[d.bus].id + "' has more than one demand series");
    require(d.demand.size() == T,
            "demand series at bus '" + buses[d.bus].id + "' differs from horizon");
    for (double x : d.demand)
      require(finite(x) && x >= 0.0, "demand at bus '" + buses[d.bus].id + "' must be >= 0");
  }

  std::vector<std::vector<std::size_t>> adjacency(buses.size());
  for (const auto& l : lines) {
    adjacency[l.from].push_back(l.to);
    adjacency[l.to].push_back(l.from);
  }
  for (auto& a : adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  // Connectivity by breadth-first search from the reference bus.
  std::vector<bool> seen(buses.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(ref);
  seen[ref] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto n = frontier.front();
    frontier.pop();
    for (auto o : adjacency[n]) {
      if (!seen[o]) {
        seen[o] = true;
        ++reached;
        frontier.push(o);
      }
    }
  }
  require(reached == buses.size(), "network is not connected");

  PowerSystem system;
  system.buses_ = std::move(buses);
  system.generators_ = std::move(generators);
  system.lines_ = std::move(lines);
  system.wind_ = std::move(wind);
  system.loads_ = std::move(loads);
  system.horizon_ = horizon;
  system.reference_bus_ = ref;
  system.adjacency_ = std::move(adjacency);
  return system;
}

double PowerSystem::total_demand(int t) const {
  double sum = 0.0;
  for (const auto& d : loads_) sum += d.demand[static_cast<std::size_t>(t)];
  return sum;
}

double PowerSystem::total_forecast(int t) const {
  double sum = 0.0;
  for (const auto& w : wind_) sum += w.forecast[static_cast<std::size_t>(t)];
  return sum;
}

std::size_t PowerSystem::bus_index(const std::string& id) const {
  for (std::size_t n = 0; n < buses_.size(); ++n)
    if (buses_[n].id == id) return n;
  throw InputError("unknown bus '" + id + "'");
}

}  // namespace rruc::grid
