#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rruc::formulations {

/// Uncertainty budgets: Γ^T deviating periods per farm, Γ^S deviating farms
/// per period.
struct Budget {
  int temporal = 0;
  int spatial = 0;

  void validate() const;
  bool operator==(const Budget&) const = default;
};

/// Binary realization of the uncertainty set: each (farm, period) sits at the
/// forecast, the upper band edge (up) or the lower band edge (down).
struct ScenarioVertex {
  int farms = 0;
  int periods = 0;
  std::vector<std::uint8_t> up;    // v^u, [m * T + t]
  std::vector<std::uint8_t> down;  // v^l, [m * T + t]

  static ScenarioVertex zero(int farms, int periods);

  [[nodiscard]] std::uint8_t u(int m, int t) const { return up[static_cast<std::size_t>(m * periods + t)]; }
  [[nodiscard]] std::uint8_t l(int m, int t) const { return down[static_cast<std::size_t>(m * periods + t)]; }
  void set(int m, int t, int sign);  // +1 up, -1 down, 0 forecast

  [[nodiscard]] bool satisfies(const Budget& b) const;
  [[nodiscard]] int deviations() const;
  /// Compact text such as "w1@t2:+ w2@t1:-" or "forecast".
  [[nodiscard]] std::string describe() const;

  bool operator==(const ScenarioVertex&) const = default;
  auto operator<=>(const ScenarioVertex&) const = default;
};

}  // namespace rruc::formulations
