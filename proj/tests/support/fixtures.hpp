#pragma once

#include <string>
#include <vector>

#include "rruc/grid/power_system.hpp"

namespace rruc::testing {

inline grid::Generator make_gen(std::string id, std::size_t bus, double pmin, double pmax,
                                double c1, double startup = 0.0, double no_load = 0.0) {
  grid::Generator g;
  g.id = std::move(id);
  g.bus = bus;
  g.p_min = pmin;
  g.p_max = pmax;
  g.ramp_up = pmax;
  g.ramp_down = pmax;
  g.c1 = c1;
  g.startup_cost = startup;
  g.no_load_cost = no_load;
  return g;
}

/// One bus, one generator, one load, optional wind farm.
inline grid::PowerSystem single_bus(double pmin, double pmax, std::vector<double> demand,
                                    std::vector<double> forecast = {}, double wmax = 0.0,
                                    double c1 = 10.0, double startup = 2.0, double no_load = 5.0) {
  const int T = static_cast<int>(demand.size());
  std::vector<grid::WindFarm> wind;
  if (!forecast.empty()) wind.push_back({"w1", 0, wmax, std::move(forecast)});
  return grid::PowerSystem::create({{"b1", true}}, {make_gen("g1", 0, pmin, pmax, c1, startup, no_load)},
                                   {}, std::move(wind), {{0, std::move(demand)}}, T);
}

/// Three-bus triangle with equal susceptances; bus 3 is the reference.
inline grid::PowerSystem triangle(double susceptance = 10.0, double capacity = 1000.0) {
  std::vector<grid::Bus> buses{{"b1", false}, {"b2", false}, {"b3", true}};
  std::vector<grid::Line> lines{{"l12", 0, 1, susceptance, capacity},
                                {"l23", 1, 2, susceptance, capacity},
                                {"l13", 0, 2, susceptance, capacity}};
  std::vector<grid::Generator> gens{make_gen("g1", 0, 0, 200, 10.0),
                                    make_gen("g3", 2, 0, 200, 20.0)};
  return grid::PowerSystem::create(buses, gens, lines, {}, {{1, {50.0}}}, 1);
}

/// Desk instance: 3 buses, 2 generators, 1 wind farm, T = 2.
inline grid::PowerSystem desk(double line_cap = 60.0) {
  std::vector<grid::Bus> buses{{"b1", true}, {"b2", false}, {"b3", false}};
  std::vector<grid::Line> lines{{"l12", 0, 1, 500.0, line_cap},
                                {"l23", 1, 2, 500.0, line_cap},
                                {"l13", 0, 2, 500.0, line_cap}};
  auto g1 = make_gen("g1", 0, 20, 150, 12.0, 200.0, 50.0);
  g1.ramp_up = g1.ramp_down = 60;
  g1.min_on = 2;
  g1.c2 = 0.01;
  auto g2 = make_gen("g2", 2, 10, 80, 30.0, 50.0, 20.0);
  g2.ramp_up = g2.ramp_down = 40;
  g2.c2 = 0.02;
  std::vector<grid::WindFarm> wind{{"w1", 1, 100.0, {40.0, 55.0}}};
  std::vector<grid::Load> loads{{1, {60.0, 70.0}}, {2, {50.0, 60.0}}};
  return grid::PowerSystem::create(buses, {g1, g2}, lines, wind, loads, 2);
}

}  // namespace rruc::testing
