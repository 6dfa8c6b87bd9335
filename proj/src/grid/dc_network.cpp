#include "rruc/grid/dc_network.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "rruc/error.hpp"

namespace rruc::grid {

namespace {

using Eigen::Index;

/// LU factorization of B with the reference row and column removed.
struct ReducedSystem {
  std::vector<Index> position;  // bus -> reduced index, -1 for the reference
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
};

ReducedSystem reduce(const PowerSystem& system) {
  const auto B = admittance_matrix(system);
  const auto n = static_cast<Index>(system.num_buses());
  const auto ref = static_cast<Index>(system.reference_bus());
  ReducedSystem out;
  out.position.assign(static_cast<std::size_t>(n), -1);
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    if (i != ref) out.position[static_cast<std::size_t>(i)] = k++;

  Eigen::MatrixXd reduced(n - 1, n - 1);
  for (Index i = 0; i < n; ++i) {
    const auto ri = out.position[static_cast<std::size_t>(i)];
    if (ri < 0) continue;
    for (Index j = 0; j < n; ++j) {
      const auto rj = out.position[static_cast<std::size_t>(j)];
      if (rj >= 0) reduced(ri, rj) = B(i, j);
    }
  }
  out.lu.compute(reduced);
  if (n > 1 && !out.lu.isInvertible())
    throw ModelError("reduced admittance matrix is singular");
  return out;
}

}  // namespace

Eigen::MatrixXd admittance_matrix(const PowerSystem& system) {
  const auto n = static_cast<Index>(system.num_buses());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : system.lines()) {
    const auto i = static_cast<Index>(l.from);
    const auto j = static_cast<Index>(l.to);
    B(i, i) += l.susceptance;
    B(j, j) += l.susceptance;
    B(i, j) -= l.susceptance;
    B(j, i) -= l.susceptance;
  }
  return B;
}

Ptdf compute_ptdf(const PowerSystem& system) {
  const auto n = static_cast<Index>(system.num_buses());
  const auto L = static_cast<Index>(system.num_lines());
  Ptdf ptdf{Eigen::MatrixXd::Zero(L, n)};
  if (L == 0 || n == 1) return ptdf;

  const auto reduced = reduce(system);
  // X = B_reduced^{-1}, padded back to full size with a zero reference row/column.
  const Eigen::MatrixXd inv = reduced.lu.inverse();
  auto X = [&](std::size_t bus, Index col) -> double {
    const auto p = reduced.position[bus];
    return p < 0 ? 0.0 : inv(p, col);
  };
  for (Index l = 0; l < L; ++l) {
    const auto& line = system.lines()[static_cast<std::size_t>(l)];
    for (Index b = 0; b < n; ++b) {
      const auto col = reduced.position[static_cast<std::size_t>(b)];
      if (col < 0) continue;  // reference column stays exactly zero
      ptdf.factors(l, b) = line.susceptance * (X(line.from, col) - X(line.to, col));
    }
  }
  return ptdf;
}

DcFlow solve_dc_flow(const PowerSystem& system, std::span<const double> injections) {
  if (injections.size() != system.num_buses())
    throw InputError("injection vector length differs from bus count");
  const double imbalance = std::accumulate(injections.begin(), injections.end(), 0.0);
  if (std::abs(imbalance) > 1e-6)
    throw InputError("injections do not balance (sum = " + std::to_string(imbalance) + " MW)");

  const auto n = static_cast<Index>(system.num_buses());
  DcFlow out;
  out.angles.assign(system.num_buses(), 0.0);
  if (n > 1) {
    const auto reduced = reduce(system);
    Eigen::VectorXd rhs(n - 1);
    for (Index i = 0; i < n; ++i) {
      const auto p = reduced.position[static_cast<std::size_t>(i)];
      if (p >= 0) rhs(p) = injections[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd theta = reduced.lu.solve(rhs);
    for (Index i = 0; i < n; ++i) {
      const auto p = reduced.position[static_cast<std::size_t>(i)];
      if (p >= 0) out.angles[static_cast<std::size_t>(i)] = theta(p);
    }
  }
  out.flows.reserve(system.num_lines());
  for (const auto& l : system.lines())
    out.flows.push_back(l.susceptance * (out.angles[l.from] - out.angles[l.to]));
  for (double a : out.angles) out.max_abs_angle = std::max(out.max_abs_angle, std::abs(a));
  out.angle_limit_exceeded = out.max_abs_angle > std::numbers::pi;
  return out;
}

}  // namespace rruc::grid
