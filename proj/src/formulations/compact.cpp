#include "rruc/formulations/compact.hpp"

#include <vector>

namespace rruc::formulations {

namespace {

std::string column_name(const Column& c) {
  const char* prefix = "p";
  switch (c.kind) {
    case ColumnKind::gen: prefix = "p"; break;
    case ColumnKind::curtail: prefix = "dw"; break;
    case ColumnKind::shed: prefix = "dD"; break;
    case ColumnKind::angle: prefix = "theta"; break;
  }
  return std::string(prefix) + "_" + std::to_string(c.index) + "_" + std::to_string(c.t + 1);
}

}  // namespace

CompactBlock assemble_block(const RecourseSystem& rs) {
  using Triplet = Eigen::Triplet<double>;
  const auto rows = static_cast<Eigen::Index>(rs.rows.size());
  const auto T = static_cast<std::size_t>(rs.horizon);
  std::vector<Triplet> a, e, g;
  CompactBlock b;
  b.form = rs.form;
  b.constant.resize(rows);
  for (std::size_t i = 0; i < rs.rows.size(); ++i) {
    const auto& row = rs.rows[i];
    const auto r = static_cast<Eigen::Index>(i);
    for (const auto& [k, c] : row.lhs) a.emplace_back(r, static_cast<Eigen::Index>(k), c);
    for (const auto& [k, c] : row.commitment) e.emplace_back(r, static_cast<Eigen::Index>(k), c);
    for (const auto& [k, c] : row.wind) g.emplace_back(r, static_cast<Eigen::Index>(k), c);
    b.constant[r] = row.constant;
    b.row_names.push_back(row.name());
  }
  for (std::size_t k = 0; k < rs.columns.size(); ++k) {
    if (rs.columns[k].slack) b.slack.push_back(k);
    b.column_names.push_back(column_name(rs.columns[k]));
  }
  b.recourse.resize(rows, static_cast<Eigen::Index>(rs.columns.size()));
  b.recourse.setFromTriplets(a.begin(), a.end());
  b.commitment.resize(rows, static_cast<Eigen::Index>(rs.num_generators * T));
  b.commitment.setFromTriplets(e.begin(), e.end());
  // Keep explicit zeros: the product count depends on the structure, not the values.
  b.wind.resize(rows, static_cast<Eigen::Index>(rs.num_farms * T));
  b.wind.setFromTriplets(g.begin(), g.end(), [](double x, double y) { return x + y; });
  return b;
}

CompactMatrices assemble_compact(const grid::PowerSystem& system, const grid::Ptdf& ptdf) {
  return {assemble_block(build_recourse(system, ptdf, NetworkForm::ptdf)),
          assemble_block(build_recourse(system, ptdf, NetworkForm::nodal))};
}

std::vector<double> product_coefficients(const CompactBlock& block, const grid::PowerSystem& system,
                                         const FirstStagePoint& point) {
  const auto T = static_cast<std::size_t>(system.horizon());
  std::vector<double> q;
  q.reserve(block.num_products());
  for (Eigen::Index i = 0; i < block.wind.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(block.wind, i); it; ++it) {
      const auto k = static_cast<std::size_t>(it.col());
      const double f = system.wind()[k / T].forecast[k % T];
      q.push_back(it.value() * (point.w_upper[k / T][k % T] - f));
      q.push_back(it.value() * (point.w_lower[k / T][k % T] - f));
    }
  return q;
}

}  // namespace rruc::formulations
