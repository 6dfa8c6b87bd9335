#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rruc/grid/power_system.hpp"

namespace rruc::grid {

/// Power transfer distribution factors: one row per line, one column per bus.
/// Entry (l, n) is the MW flow on line l (positive from `from` toward `to`)
/// per MW injected at bus n and withdrawn at the reference bus.
struct Ptdf {
  Eigen::MatrixXd factors;

  [[nodiscard]] double operator()(std::size_t line, std::size_t bus) const {
    return factors(static_cast<Eigen::Index>(line), static_cast<Eigen::Index>(bus));
  }
  [[nodiscard]] std::size_t num_lines() const { return static_cast<std::size_t>(factors.rows()); }
  [[nodiscard]] std::size_t num_buses() const { return static_cast<std::size_t>(factors.cols()); }
};

/// Nodal susceptance matrix B (Laplacian of line susceptances).
Eigen::MatrixXd admittance_matrix(const PowerSystem& system);

Ptdf compute_ptdf(const PowerSystem& system);

struct DcFlow {
  std::vector<double> angles;  // rad, reference bus at 0
  std::vector<double> flows;   // MW per line
  double max_abs_angle = 0.0;
  bool angle_limit_exceeded = false;  // some |θ| > π
};

/// Solves Bθ = P with θ_ref = 0. Injections must sum to zero within 1e-6 MW.
DcFlow solve_dc_flow(const PowerSystem& system, std::span<const double> injections);

}  // namespace rruc::grid
