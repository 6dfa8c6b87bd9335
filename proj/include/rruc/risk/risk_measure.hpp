#pragma once

#include <span>
#include <string>
#include <vector>

#include "rruc/grid/power_system.hpp"
#include "rruc/risk/forecast_error.hpp"
#include "rruc/risk/pwl_pdf.hpp"

namespace rruc::risk {

/// Per-period prices of wind curtailment (e_t) and load shedding (f_t), $/MWh.
struct Prices {
  std::vector<double> curtailment;
  std::vector<double> load_shed;

  /// Throws InputError on negative prices or length mismatch; returns
  /// human-readable warnings for periods where shedding is not dearer than
  /// curtailment.
  std::vector<std::string> validate(int horizon) const;
};

/// Expected curtailment plus shedding cost ($) of one farm in one period when
/// the admissible band is [w_lower, w_upper]:
///   e·E[(δ - (w_upper - ŵ))⁺] + f·E[((w_lower - ŵ) - δ)⁺]
/// evaluated in closed form on the piecewise-linear density.
/// Requires 0 <= w_lower <= ŵ <= w_upper <= w_max (1e-9 slack).
double risk_exact(double w_upper, double w_lower, const PiecewiseLinearPdf& pdf,
                  double curtailment_price, double shed_price, double forecast, double w_max);

/// Q ≥ slope·w + intercept.
struct Tangent {
  double slope = 0.0;      // $/MW
  double intercept = 0.0;  // $
  double abscissa = 0.0;   // MW, point of tangency
};

/// Tangent families of one (farm, period) cell.
struct CellTangents {
  std::vector<Tangent> upper;  // over w^u, slopes <= 0
  std::vector<Tangent> lower;  // over w^l, slopes >= 0
  double max_gap_upper = 0.0;  // sampled max of exact minus envelope, $
  double max_gap_lower = 0.0;
};

double envelope(std::span<const Tangent> family, double w);

/// Tangents to the two risk branches of one cell. Each PDF segment that
/// overlaps a branch's domain receives `per_segment` tangents at the midpoints
/// of equal subdivisions; both domain ends get one more each. Duplicate lines
/// are dropped.
CellTangents build_risk_tangents(const PiecewiseLinearPdf& pdf, double curtailment_price,
                                 double shed_price, double forecast, double w_max,
                                 int per_segment);

/// Everything the optimization layer needs about operational risk.
struct RiskTangents {
  int horizon = 0;
  std::vector<PiecewiseLinearPdf> pdfs;  // [m * T + t]
  std::vector<CellTangents> cells;       // [m * T + t]

  [[nodiscard]] const CellTangents& cell(std::size_t m, std::size_t t) const {
    return cells[m * static_cast<std::size_t>(horizon) + t];
  }
  [[nodiscard]] const PiecewiseLinearPdf& pdf(std::size_t m, std::size_t t) const {
    return pdfs[m * static_cast<std::size_t>(horizon) + t];
  }
};

struct RiskSettings {
  PdfLayout layout = PdfLayout::standard();
  int tangents_per_segment = 4;
};

RiskTangents build_system_tangents(const grid::PowerSystem& system,
                                   const ForecastErrorModel& errors, const Prices& prices,
                                   const RiskSettings& settings);

/// Exact risk of a full band schedule ([m][t] matrices), summed over cells.
double total_risk_exact(const grid::PowerSystem& system, const RiskTangents& risk,
                        const Prices& prices, const std::vector<std::vector<double>>& w_upper,
                        const std::vector<std::vector<double>>& w_lower);

}  // namespace rruc::risk
