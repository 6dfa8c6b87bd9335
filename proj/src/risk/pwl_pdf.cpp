#include "rruc/risk/pwl_pdf.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "rruc/error.hpp"

namespace rruc::risk {

double standard_normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double standard_normal_pdf(double z) {
  return boost::math::pdf(boost::math::normal_distribution<double>(), z);
}

PdfLayout PdfLayout::from_alpha(double alpha1, double alpha2, double alpha3) {
  if (!(alpha1 > 0.0 && alpha2 > 0.0 && alpha3 > 0.0))
    throw InputError("quantile masses must be positive");
  if (!(alpha1 + alpha2 + alpha3 / 2.0 < 0.5))
    throw InputError("quantile masses leave no room between tail and centre segments");
  return PdfLayout{{alpha1, alpha1 + alpha2, 0.5 - alpha3 / 2.0, 0.5, 0.5 + alpha3 / 2.0,
                    1.0 - alpha1 - alpha2, 1.0 - alpha1}};
}

PdfLayout PdfLayout::standard() { return from_alpha(0.005, 0.025, 0.495); }

double PiecewiseLinearPdf::operator()(double delta) const {
  if (is_point_mass() || delta < x.front() || delta > x.back()) return 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), delta);
  if (it == x.end()) return density.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double h = x[i] - x[i - 1];
  const double s = h > 0.0 ? (delta - x[i - 1]) / h : 0.0;
  return density[i - 1] + s * (density[i] - density[i - 1]);
}

double PiecewiseLinearPdf::mass() const {
  if (is_point_mass()) return 1.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    m += 0.5 * (x[i + 1] - x[i]) * (density[i] + density[i + 1]);
  return m;
}

double PiecewiseLinearPdf::mass_above(double a) const {
  if (is_point_mass()) return x[0] > a ? 1.0 : 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double l = std::max(x[i], a);
    const double r = x[i + 1];
    if (r <= l) continue;
    m += 0.5 * (r - l) * ((*this)(l) + density[i + 1]);
  }
  return m;
}

double PiecewiseLinearPdf::mass_below(double b) const {
  if (is_point_mass()) return x[0] < b ? 1.0 : 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double l = x[i];
    const double r = std::min(x[i + 1], b);
    if (r <= l) continue;
    m += 0.5 * (r - l) * (density[i] + (*this)(r));
  }
  return m;
}

double PiecewiseLinearPdf::expected_excess(double a) const {
  if (is_point_mass()) return std::max(0.0, x[0] - a);
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double l = std::max(x[i], a);
    const double r = x[i + 1];
    if (r <= l) continue;
    const double h = r - l;
    const double d = l - a;  // >= 0
    const double yl = (*this)(l);
    const double slope = (density[i + 1] - density[i]) / (x[i + 1] - x[i]);
    e += yl * (h * h / 2.0 + d * h) + slope * (h * h * h / 3.0 + d * h * h / 2.0);
  }
  return e;
}

double PiecewiseLinearPdf::expected_shortfall(double b) const {
  if (is_point_mass()) return std::max(0.0, b - x[0]);
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double l = x[i];
    const double r = std::min(x[i + 1], b);
    if (r <= l) continue;
    const double h = r - l;
    const double d = b - r;  // >= 0
    const double yr = (*this)(r);
    const double slope = (density[i + 1] - density[i]) / (x[i + 1] - x[i]);
    e += yr * (h * h / 2.0 + d * h) - slope * (h * h * h / 3.0 + d * h * h / 2.0);
  }
  return e;
}

PiecewiseLinearPdf build_pwl_pdf(double sigma, const PdfLayout& layout, double support_lo,
                                 double support_hi) {
  if (!(support_lo <= support_hi)) throw InputError("empty support for forecast-error density");
  if (!(sigma >= 0.0)) throw InputError("forecast-error sigma must be >= 0");
  if (sigma == 0.0 || support_lo == support_hi) {
    return PiecewiseLinearPdf{{std::clamp(0.0, support_lo, support_hi)}, {1.0}};
  }
  const auto& levels = layout.levels;
  if (levels.empty()) throw InputError("PDF layout has no quantile levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw InputError("quantile level outside (0, 1)");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw InputError("quantile levels must be strictly increasing");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (double p : levels) {
    const double z = standard_normal_quantile(p);
    xs.push_back(sigma * z);
    ys.push_back(standard_normal_pdf(z) / sigma);
  }
  // Linear tails to zero density holding the mass outside the extreme quantiles.
  const double left = xs.front() - 2.0 * levels.front() / ys.front();
  const double right = xs.back() + 2.0 * (1.0 - levels.back()) / ys.back();
  xs.insert(xs.begin(), left);
  ys.insert(ys.begin(), 0.0);
  xs.push_back(right);
  ys.push_back(0.0);

  const PiecewiseLinearPdf raw{xs, ys};
  PiecewiseLinearPdf pdf;
  const double lo = std::max(support_lo, left);
  const double hi = std::min(support_hi, right);
  if (!(lo < hi)) {
    // Support lies entirely in a zero-density tail: collapse onto the nearest edge.
    return PiecewiseLinearPdf{{support_lo >= right ? support_lo : support_hi}, {1.0}};
  }
  pdf.x.push_back(lo);
  pdf.density.push_back(raw(lo));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > lo && xs[i] < hi) {
      pdf.x.push_back(xs[i]);
      pdf.density.push_back(ys[i]);
    }
  }
  pdf.x.push_back(hi);
  pdf.density.push_back(raw(hi));

  const double m = pdf.mass();
  if (!(m > 0.0)) throw InputError("forecast-error density has no mass on its support");
  for (auto& y : pdf.density) y /= m;
  return pdf;
}

}  // namespace rruc::risk
