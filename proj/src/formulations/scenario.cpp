#include "rruc/formulations/scenario.hpp"

#include "rruc/error.hpp"

namespace rruc::formulations {

void Budget::validate() const {
  if (temporal < 0 || spatial < 0) throw InputError("uncertainty budgets must be >= 0");
}

ScenarioVertex ScenarioVertex::zero(int farms, int periods) {
  ScenarioVertex v;
  v.farms = farms;
  v.periods = periods;
  v.up.assign(static_cast<std::size_t>(farms * periods), 0);
  v.down.assign(static_cast<std::size_t>(farms * periods), 0);
  return v;
}

void ScenarioVertex::set(int m, int t, int sign) {
  const auto k = static_cast<std::size_t>(m * periods + t);
  up[k] = sign > 0 ? 1 : 0;
  down[k] = sign < 0 ? 1 : 0;
}

bool ScenarioVertex::satisfies(const Budget& b) const {
  for (int m = 0; m < farms; ++m) {
    int used = 0;
    for (int t = 0; t < periods; ++t) {
      if (u(m, t) + l(m, t) > 1) return false;
      used += u(m, t) + l(m, t);
    }
    if (used > b.temporal) return false;
  }
  for (int t = 0; t < periods; ++t) {
    int used = 0;
    for (int m = 0; m < farms; ++m) used += u(m, t) + l(m, t);
    if (used > b.spatial) return false;
  }
  return true;
}

int ScenarioVertex::deviations() const {
  int n = 0;
  for (std::size_t k = 0; k < up.size(); ++k) n += up[k] + down[k];
  return n;
}

std::string ScenarioVertex::describe() const {
  std::string s;
  for (int m = 0; m < farms; ++m)
    for (int t = 0; t < periods; ++t) {
      if (!u(m, t) && !l(m, t)) continue;
      if (!s.empty()) s += ' ';
      s += "w" + std::to_string(m + 1) + "@t" + std::to_string(t + 1) + (u(m, t) ? ":+" : ":-");
    }
  return s.empty() ? "forecast" : s;
}

}  // namespace rruc::formulations
