#include "rruc/risk/risk_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rruc/error.hpp"

namespace rruc::risk {

std::vector<std::string> Prices::validate(int horizon) const {
  const auto T = static_cast<std::size_t>(horizon);
  if (curtailment.size() != T || load_shed.size() != T)
    throw InputError("price series length differs from horizon");
  std::vector<std::string> warnings;
  for (std::size_t t = 0; t < T; ++t) {
    if (!(curtailment[t] >= 0.0) || !(load_shed[t] >= 0.0))
      throw InputError("prices must be >= 0 (period " + std::to_string(t + 1) + ")");
    if (!(load_shed[t] > curtailment[t]))
      warnings.push_back("period " + std::to_string(t + 1) +
                         ": load-shed price does not exceed curtailment price");
  }
  return warnings;
}

double risk_exact(double w_upper, double w_lower, const PiecewiseLinearPdf& pdf,
                  double curtailment_price, double shed_price, double forecast, double w_max) {
  constexpr double slack = 1e-9;
  if (!(w_lower >= -slack && w_lower <= forecast + slack && forecast <= w_upper + slack &&
        w_upper <= w_max + slack))
    throw InputError("admissible band must satisfy 0 <= w_lower <= forecast <= w_upper <= w_max");
  const double above = pdf.expected_excess(w_upper - forecast);
  const double below = pdf.expected_shortfall(w_lower - forecast);
  return curtailment_price * above + shed_price * below;
}

double envelope(std::span<const Tangent> family, double w) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : family) best = std::max(best, t.slope * w + t.intercept);
  return best;
}

namespace {

/// Tangency points in δ-space for a branch whose domain is [lo, hi]: every PDF
/// segment overlapping the domain is split into `per_segment` equal parts and
/// their midpoints are used, plus the two domain ends.
std::vector<double> tangency_points(const PiecewiseLinearPdf& pdf, double lo, double hi,
                                    int per_segment) {
  std::vector<double> cuts{lo, hi};
  for (double x : pdf.x)
    if (x > lo && x < hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> points{lo};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    for (int z = 0; z < per_segment; ++z)
      points.push_back(a + (b - a) * (z + 0.5) / per_segment);
  }
  points.push_back(hi);
  return points;
}

void drop_duplicates(std::vector<Tangent>& family) {
  std::vector<Tangent> kept;
  for (const auto& t : family) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Tangent& k) {
      return std::abs(k.slope - t.slope) <= 1e-12 * (1.0 + std::abs(t.slope)) &&
             std::abs(k.intercept - t.intercept) <= 1e-9 * (1.0 + std::abs(t.intercept));
    });
    if (!dup) kept.push_back(t);
  }
  family = std::move(kept);
}

template <class Exact>
double sampled_gap(const std::vector<Tangent>& family, double lo, double hi, Exact exact) {
  constexpr int samples = 200;
  double gap = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double w = lo + (hi - lo) * i / samples;
    gap = std::max(gap, exact(w) - envelope(family, w));
  }
  return gap;
}

}  // namespace

CellTangents build_risk_tangents(const PiecewiseLinearPdf& pdf, double curtailment_price,
                                 double shed_price, double forecast, double w_max,
                                 int per_segment) {
  if (per_segment < 1) throw InputError("tangents per segment must be >= 1");
  CellTangents cell;

  const auto upper_value = [&](double w) {
    return curtailment_price * pdf.expected_excess(w - forecast);
  };
  for (double a : tangency_points(pdf, 0.0, w_max - forecast, per_segment)) {
    const double w = forecast + a;
    const double slope = -curtailment_price * pdf.mass_above(a);
    cell.upper.push_back({slope, upper_value(w) - slope * w, w});
  }

  const auto lower_value = [&](double w) {
    return shed_price * pdf.expected_shortfall(w - forecast);
  };
  for (double b : tangency_points(pdf, -forecast, 0.0, per_segment)) {
    const double w = forecast + b;
    const double slope = shed_price * pdf.mass_below(b);
    cell.lower.push_back({slope, lower_value(w) - slope * w, w});
  }

  drop_duplicates(cell.upper);
  drop_duplicates(cell.lower);
  cell.max_gap_upper = sampled_gap(cell.upper, forecast, w_max, upper_value);
  cell.max_gap_lower = sampled_gap(cell.lower, 0.0, forecast, lower_value);
  return cell;
}

RiskTangents build_system_tangents(const grid::PowerSystem& system,
                                   const ForecastErrorModel& errors, const Prices& prices,
                                   const RiskSettings& settings) {
  const int T = system.horizon();
  prices.validate(T);
  RiskTangents out;
  out.horizon = T;
  for (std::size_t m = 0; m < system.num_wind(); ++m) {
    const auto& farm = system.wind()[m];
    for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t) {
      const double f = farm.forecast[t];
      auto pdf = build_pwl_pdf(errors(m, t), settings.layout, -f, farm.capacity - f);
      out.cells.push_back(build_risk_tangents(pdf, prices.curtailment[t], prices.load_shed[t], f,
                                              farm.capacity, settings.tangents_per_segment));
      out.pdfs.push_back(std::move(pdf));
    }
  }
  return out;
}

double total_risk_exact(const grid::PowerSystem& system, const RiskTangents& risk,
                        const Prices& prices, const std::vector<std::vector<double>>& w_upper,
                        const std::vector<std::vector<double>>& w_lower) {
  double total = 0.0;
  for (std::size_t m = 0; m < system.num_wind(); ++m) {
    const auto& farm = system.wind()[m];
    for (std::size_t t = 0; t < static_cast<std::size_t>(system.horizon()); ++t) {
      total += risk_exact(w_upper[m][t], w_lower[m][t], risk.pdf(m, t), prices.curtailment[t],
                          prices.load_shed[t], farm.forecast[t], farm.capacity);
    }
  }
  return total;
}

}  // namespace rruc::risk
