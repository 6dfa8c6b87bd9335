#pragma once

#include <span>
#include <vector>

#include "rruc/grid/power_system.hpp"

namespace rruc::risk {

/// Per-period standard deviation of the forecast error of one wind farm:
///   σ_t = σ_rel · ŵ_t · (1 + exp(-decay · t)),  t = 1, 2, ...
/// σ_t is zero wherever the forecast is zero.
std::vector<double> sigma_profile(double sigma_rel, std::span<const double> forecast,
                                  double decay = 1.0);

/// Zero-mean Gaussian forecast errors, independent across farms and periods.
struct ForecastErrorModel {
  std::vector<double> relative;            // σ_m per farm
  std::vector<std::vector<double>> sigma;  // [farm][period], MW

  [[nodiscard]] double operator()(std::size_t farm, std::size_t period) const {
    return sigma[farm][period];
  }
};

ForecastErrorModel make_error_model(const grid::PowerSystem& system,
                                    std::span<const double> sigma_rel, double decay = 1.0);

}  // namespace rruc::risk
