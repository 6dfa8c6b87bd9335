#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rruc::grid {

struct Bus {
  std::string id;
  bool reference = false;

  bool operator==(const Bus&) const = default;
};

struct Generator {
  std::string id;
  std::size_t bus = 0;  // index into PowerSystem::buses
  double p_min = 0.0;   // MW
  double p_max = 0.0;   // MW
  double ramp_up = 0.0;    // MW per period
  double ramp_down = 0.0;  // MW per period
  int min_on = 1;          // periods
  int min_off = 1;         // periods
  double startup_cost = 0.0;  // $
  double no_load_cost = 0.0;  // $ per period committed
  double c2 = 0.0;            // $/MW^2
  double c1 = 0.0;            // $/MW

  // Initial conditions. When absent the unit is treated as having been off
  // long enough that no minimum-off carry-over applies.
  std::optional<bool> init_on;
  std::optional<int> init_hours;
  std::optional<double> init_output;  // MW; enables the t=1 ramp rows

  [[nodiscard]] double cost(double p) const { return c2 * p * p + c1 * p; }
  [[nodiscard]] bool initially_on() const { return init_on.value_or(false); }

  bool operator==(const Generator&) const = default;
};

struct Line {
  std::string id;
  std::size_t from = 0;  // o_1
  std::size_t to = 0;    // o_2
  double susceptance = 0.0;  // MW per radian of angle difference
  double capacity = 0.0;     // MW

  bool operator==(const Line&) const = default;
};

struct WindFarm {
  std::string id;
  std::size_t bus = 0;
  double capacity = 0.0;          // installed w_max, MW
  std::vector<double> forecast;   // MW per period

  bool operator==(const WindFarm&) const = default;
};

/// Demand series attached to one bus.
struct Load {
  std::size_t bus = 0;
  std::vector<double> demand;  // MW per period

  bool operator==(const Load&) const = default;
};

/// Immutable grid description. Construct through `PowerSystem::create`
/// (or `load_case`), which validates every invariant.
class PowerSystem {
 public:
  static PowerSystem create(std::vector<Bus> buses, std::vector<Generator> generators,
                            std::vector<Line> lines, std::vector<WindFarm> wind,
                            std::vector<Load> loads, int horizon);

  [[nodiscard]] const std::vector<Bus>& buses() const { return buses_; }
  [[nodiscard]] const std::vector<Generator>& generators() const { return generators_; }
  [[nodiscard]] const std::vector<Line>& lines() const { return lines_; }
  [[nodiscard]] const std::vector<WindFarm>& wind() const { return wind_; }
  [[nodiscard]] const std::vector<Load>& loads() const { return loads_; }
  [[nodiscard]] int horizon() const { return horizon_; }
  [[nodiscard]] std::size_t reference_bus() const { return reference_bus_; }

  [[nodiscard]] std::size_t num_buses() const { return buses_.size(); }
  [[nodiscard]] std::size_t num_generators() const { return generators_.size(); }
  [[nodiscard]] std::size_t num_lines() const { return lines_.size(); }
  [[nodiscard]] std::size_t num_wind() const { return wind_.size(); }
  [[nodiscard]] std::size_t num_loads() const { return loads_.size(); }

  /// Adjacent buses Φ(n), without duplicates, ascending.
  [[nodiscard]] const std::vector<std::size_t>& neighbours(std::size_t bus) const {
    return adjacency_[bus];
  }

  [[nodiscard]] double total_demand(int t) const;
  [[nodiscard]] double total_forecast(int t) const;
  /// Index of the bus with the given id, or throws InputError.
  [[nodiscard]] std::size_t bus_index(const std::string& id) const;

  bool operator==(const PowerSystem&) const = default;

 private:
  PowerSystem() = default;

  std::vector<Bus> buses_;
  std::vector<Generator> generators_;
  std::vector<Line> lines_;
  std::vector<WindFarm> wind_;
  std::vector<Load> loads_;
  int horizon_ = 0;
  std::size_t reference_bus_ = 0;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace rruc::grid
