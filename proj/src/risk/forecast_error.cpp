#include "rruc/risk/forecast_error.hpp"

#include <cmath>

#include "rruc/error.hpp"

namespace rruc::risk {

std::vector<double> sigma_profile(double sigma_rel, std::span<const double> forecast,
                                  double decay) {
  if (!(sigma_rel >= 0.0)) throw InputError("relative forecast deviation must be >= 0");
  if (!(decay >= 0.0)) throw InputError("sigma decay rate must be >= 0");
  std::vector<double> out;
  out.reserve(forecast.size());
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    out.push_back(sigma_rel * forecast[i] * (1.0 + std::exp(-decay * t)));
  }
  return out;
}

ForecastErrorModel make_error_model(const grid::PowerSystem& system,
                                    std::span<const double> sigma_rel, double decay) {
  if (sigma_rel.size() != system.num_wind())
    throw InputError("expected one relative deviation per wind farm (" +
                     std::to_string(system.num_wind()) + "), got " +
                     std::to_string(sigma_rel.size()));
  ForecastErrorModel model;
  model.relative.assign(sigma_rel.begin(), sigma_rel.end());
  for (std::size_t m = 0; m < system.num_wind(); ++m)
    model.sigma.push_back(sigma_profile(sigma_rel[m], system.wind()[m].forecast, decay));
  return model;
}

}  // namespace rruc::risk
