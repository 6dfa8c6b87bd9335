#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "rruc/formulations/recourse.hpp"
#include "rruc/formulations/subproblem.hpp"

namespace rruc::formulations {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Second-stage system of one network form in matrix shape,
///   A y <= g + E u + G w ,  y = (p, s, θ),
/// with the slack columns s picked out by `slack`. For the nodal form the same
/// blocks play the role of N, M and O.
struct CompactBlock {
  NetworkForm form = NetworkForm::ptdf;
  SparseMatrix recourse;    // A (F together with H)
  SparseMatrix commitment;  // E / M, columns g·T + t
  SparseMatrix wind;        // G / O, columns m·T + t, structural zeros kept
  Eigen::VectorXd constant; // g / p
  std::vector<std::size_t> slack;  // column indices of Δw and ΔD
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;

  [[nodiscard]] std::size_t num_products() const { return 2 * static_cast<std::size_t>(wind.nonZeros()); }
};

struct CompactMatrices {
  CompactBlock ptdf;
  CompactBlock nodal;
};

CompactBlock assemble_block(const RecourseSystem& rs);
CompactMatrices assemble_compact(const grid::PowerSystem& system, const grid::Ptdf& ptdf);

/// Objective coefficients of the auxiliary products at a band: for every
/// structural entry (i, m·T+t) of the wind block, G_i,mt·(w^u - ŵ) for v^u and
/// G_i,mt·(w^l - ŵ) for v^l, in the order the subproblem creates them.
std::vector<double> product_coefficients(const CompactBlock& block, const grid::PowerSystem& system,
                                         const FirstStagePoint& point);

}  // namespace rruc::formulations
