#pragma once

#include <vector>

namespace rruc::risk {

/// Cumulative probability levels at which Gaussian quantiles become interior
/// PDF breakpoints. Levels must be strictly increasing inside (0, 1).
struct PdfLayout {
  std::vector<double> levels;

  /// Symmetric eight-segment layout from three tail/centre masses:
  /// {α1, α1+α2, ½-α3/2, ½, ½+α3/2, 1-α1-α2, 1-α1}. α3 is the probability
  /// held by the two central segments together.
  static PdfLayout from_alpha(double alpha1, double alpha2, double alpha3);
  /// from_alpha(0.5%, 2.5%, 49.5%).
  static PdfLayout standard();
};

/// Piecewise-linear density of the forecast error δ (MW). A single breakpoint
/// denotes a point mass at that abscissa (degenerate σ = 0).
struct PiecewiseLinearPdf {
  std::vector<double> x;        // ascending breakpoints
  std::vector<double> density;  // 1/MW at each breakpoint

  [[nodiscard]] bool is_point_mass() const { return x.size() == 1; }
  [[nodiscard]] std::size_t num_segments() const { return x.empty() ? 0 : x.size() - 1; }
  [[nodiscard]] double lower() const { return x.front(); }
  [[nodiscard]] double upper() const { return x.back(); }

  [[nodiscard]] double operator()(double delta) const;
  /// Trapezoid mass, exact for a piecewise-linear density.
  [[nodiscard]] double mass() const;
  /// P(δ > a) and P(δ < b).
  [[nodiscard]] double mass_above(double a) const;
  [[nodiscard]] double mass_below(double b) const;
  /// ∫_a^∞ (δ - a) y(δ) dδ, the expected excess above a.
  [[nodiscard]] double expected_excess(double a) const;
  /// ∫_-∞^b (b - δ) y(δ) dδ, the expected shortfall below b.
  [[nodiscard]] double expected_shortfall(double b) const;
};

/// Gaussian N(0, σ²) approximated on the layout's quantiles. Each outer tail
/// closes with a linear ramp to zero density sized to carry the tail mass the
/// layout leaves outside its extreme quantiles. The result is clipped to
/// [support_lo, support_hi] and renormalized to unit mass. σ = 0 yields a
/// point mass at 0.
PiecewiseLinearPdf build_pwl_pdf(double sigma, const PdfLayout& layout, double support_lo,
                                 double support_hi);

double standard_normal_quantile(double p);
double standard_normal_pdf(double z);

}  // namespace rruc::risk
