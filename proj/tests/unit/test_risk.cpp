#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "rruc/error.hpp"
#include "rruc/risk/forecast_error.hpp"
#include "rruc/risk/pwl_pdf.hpp"
#include "rruc/risk/risk_measure.hpp"

using namespace rruc;
using namespace rruc::risk;

namespace {

// Composite trapezoid of f over [a, b] with n intervals.
template <class F>
double trapezoid(F f, double a, double b, int n) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

struct Cell {
  double forecast;
  double w_max;
  double sigma;
  double e;
  double f;
  PiecewiseLinearPdf pdf;
};

Cell make_cell(double forecast, double w_max, double sigma, double e = 30.0, double f = 150.0) {
  return {forecast, w_max, sigma, e, f,
          build_pwl_pdf(sigma, PdfLayout::standard(), -forecast, w_max - forecast)};
}

double quadrature_risk(const Cell& c, double wu, double wl) {
  constexpr int n = 100000;
  const double a = wu - c.forecast;
  const double b = wl - c.forecast;
  const double up = trapezoid([&](double d) { return (d - a) * c.pdf(d); }, a, c.w_max - c.forecast, n);
  const double dn = trapezoid([&](double d) { return (b - d) * c.pdf(d); }, -c.forecast, b, n);
  return c.e * up + c.f * dn;
}

}  // namespace

TEST_CASE("sigma profile") {
  const std::vector<double> flat(40, 100.0);
  const auto s = sigma_profile(0.2, flat);
  CHECK(s.back() == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(s.front() == doctest::Approx(20.0 * (1.0 + std::exp(-1.0))));
  const std::vector<double> zero{0.0, 0.0};
  for (double x : sigma_profile(0.2, zero)) CHECK(x == 0.0);
  CHECK_THROWS_AS((void)sigma_profile(-0.1, flat), InputError);

  const auto sys = testing::desk();
  const std::vector<double> rel{0.2};
  const auto model = make_error_model(sys, rel);
  CHECK(model(0, 1) == doctest::Approx(0.2 * 55.0 * (1.0 + std::exp(-2.0))));
}

TEST_CASE("pwl pdf shape") {
  SUBCASE("symmetric support gives a symmetric density") {
    const auto pdf = build_pwl_pdf(10.0, PdfLayout::standard(), -100.0, 100.0);
    CHECK(pdf.num_segments() == 8);
    for (std::size_t i = 0; i < pdf.x.size(); ++i) {
      CHECK(pdf.x[i] == doctest::Approx(-pdf.x[pdf.x.size() - 1 - i]).epsilon(1e-12));
      CHECK(pdf(pdf.x[i]) == doctest::Approx(pdf(-pdf.x[i])).epsilon(1e-12));
    }
  }
  SUBCASE("unit mass for clipped and unclipped supports") {
    for (auto [lo, hi] : {std::pair{-100.0, 100.0}, std::pair{-5.0, 200.0}, std::pair{-30.0, 3.0}}) {
      const auto pdf = build_pwl_pdf(10.0, PdfLayout::standard(), lo, hi);
      const double m = trapezoid([&](double d) { return pdf(d); }, pdf.lower(), pdf.upper(), 200000);
      CHECK(std::abs(pdf.mass() - 1.0) <= 1e-9);
      CHECK(std::abs(m - 1.0) <= 1e-6);
      for (double y : pdf.density) CHECK(y >= 0.0);
    }
  }
  SUBCASE("moments track the Gaussian") {
    const double sigma = 10.0;
    const auto pdf = build_pwl_pdf(sigma, PdfLayout::standard(), -1000.0, 1000.0);
    const int n = 200000;
    const double mean = trapezoid([&](double d) { return d * pdf(d); }, pdf.lower(), pdf.upper(), n);
    const double var =
        trapezoid([&](double d) { return (d - mean) * (d - mean) * pdf(d); }, pdf.lower(), pdf.upper(), n);
    CHECK(std::abs(mean) <= 0.05 * sigma);
    CHECK(std::abs(std::sqrt(var) - sigma) <= 0.1 * sigma);
  }
  SUBCASE("zero sigma collapses to a point mass") {
    const auto pdf = build_pwl_pdf(0.0, PdfLayout::standard(), -10.0, 10.0);
    CHECK(pdf.is_point_mass());
    CHECK(pdf.expected_excess(-2.0) == 2.0);
    CHECK(pdf.expected_shortfall(3.0) == 3.0);
  }
}

TEST_CASE("risk_exact closed form") {
  const auto c = make_cell(150.0, 500.0, 0.2 * 150.0);
  CHECK(risk_exact(c.w_max, 0.0, c.pdf, c.e, c.f, c.forecast, c.w_max) == 0.0);
  CHECK_THROWS_AS((void)risk_exact(100.0, 0.0, c.pdf, c.e, c.f, c.forecast, c.w_max), InputError);

  SUBCASE("zero-width band on a symmetric density") {
    const auto s = make_cell(250.0, 500.0, 20.0);
    const double positive =
        trapezoid([&](double d) { return d * s.pdf(d); }, 0.0, s.w_max - s.forecast, 100000);
    const double r = risk_exact(s.forecast, s.forecast, s.pdf, s.e, s.f, s.forecast, s.w_max);
    CHECK(r == doctest::Approx((s.e + s.f) * positive).epsilon(1e-8));
  }

  SUBCASE("matches 1e5-point trapezoid quadrature") {
    std::mt19937_64 rng(11);
    for (const auto& cell : {c, make_cell(20.0, 100.0, 8.0), make_cell(480.0, 500.0, 60.0)}) {
      std::uniform_real_distribution<double> up(cell.forecast, cell.w_max);
      std::uniform_real_distribution<double> dn(0.0, cell.forecast);
      for (int i = 0; i < 20; ++i) {
        const double wu = up(rng);
        const double wl = dn(rng);
        const double exact = risk_exact(wu, wl, cell.pdf, cell.e, cell.f, cell.forecast, cell.w_max);
        const double quad = quadrature_risk(cell, wu, wl);
        CHECK(std::abs(exact - quad) <= 1e-6 * std::max(1.0, std::abs(quad)));
      }
    }
  }
}

TEST_CASE("risk_exact is convex and monotone on grids") {
  const auto c = make_cell(200.0, 500.0, 40.0);
  const int n = 200;
  std::vector<double> ru;
  std::vector<double> rl;
  for (int i = 0; i <= n; ++i) {
    ru.push_back(risk_exact(c.forecast + (c.w_max - c.forecast) * i / n, c.forecast, c.pdf, c.e, c.f,
                            c.forecast, c.w_max));
    rl.push_back(risk_exact(c.forecast, c.forecast * i / n, c.pdf, c.e, c.f, c.forecast, c.w_max));
  }
  for (int i = 1; i <= n; ++i) {
    CHECK(ru[i] <= ru[i - 1] + 1e-9);
    CHECK(rl[i] >= rl[i - 1] - 1e-9);
  }
  for (int i = 1; i < n; ++i) {
    CHECK(ru[i + 1] - 2 * ru[i] + ru[i - 1] >= -1e-7);
    CHECK(rl[i + 1] - 2 * rl[i] + rl[i - 1] >= -1e-7);
  }
  // widening the band never raises risk
  CHECK(risk_exact(300, 100, c.pdf, c.e, c.f, c.forecast, c.w_max) <=
        risk_exact(250, 150, c.pdf, c.e, c.f, c.forecast, c.w_max));
}

TEST_CASE("tangent families") {
  const auto c = make_cell(150.0, 500.0, 0.2 * 150.0 * (1 + std::exp(-3.0)));
  const auto cell = build_risk_tangents(c.pdf, c.e, c.f, c.forecast, c.w_max, 4);
  for (const auto& t : cell.upper) CHECK(t.slope <= 0.0);
  for (const auto& t : cell.lower) CHECK(t.slope >= 0.0);

  // the tangent at w_max is the zero line (it may be merged with an identical
  // tangent further left where the density has already vanished)
  const auto& last = cell.upper.back();
  CHECK(std::abs(last.slope) <= 1e-12);
  CHECK(std::abs(last.intercept) <= 1e-9);
  CHECK(envelope(cell.upper, c.w_max) == doctest::Approx(0.0));

  const auto upper_exact = [&](double w) { return c.e * c.pdf.expected_excess(w - c.forecast); };
  const auto lower_exact = [&](double w) { return c.f * c.pdf.expected_shortfall(w - c.forecast); };

  for (int i = 0; i <= 100; ++i) {
    const double wu = c.forecast + (c.w_max - c.forecast) * i / 100.0;
    const double wl = c.forecast * i / 100.0;
    CHECK(envelope(cell.upper, wu) <= upper_exact(wu) + 1e-9);
    CHECK(envelope(cell.lower, wl) <= lower_exact(wl) + 1e-9);
  }
  for (const auto& t : cell.upper) {
    const double v = upper_exact(t.abscissa);
    CHECK(std::abs(t.slope * t.abscissa + t.intercept - v) <= 1e-8 * std::max(1.0, v));
  }
  for (const auto& t : cell.lower) {
    const double v = lower_exact(t.abscissa);
    CHECK(std::abs(t.slope * t.abscissa + t.intercept - v) <= 1e-8 * std::max(1.0, v));
  }
}

TEST_CASE("envelope gap stays below 1% of the zero-width risk") {
  // 500 MW farms, forecasts across the range, σ_m in {20%, 15%, 10%}
  for (double rel : {0.2, 0.15, 0.1}) {
    for (double f : {30.0, 150.0, 300.0, 470.0}) {
      for (int t : {1, 12, 24}) {
        const double sigma = rel * f * (1.0 + std::exp(-static_cast<double>(t)));
        const auto c = make_cell(f, 500.0, sigma, 40.0, 200.0);
        const auto cell = build_risk_tangents(c.pdf, c.e, c.f, c.forecast, c.w_max, 4);
        const double base = risk_exact(f, f, c.pdf, c.e, c.f, f, c.w_max);
        double gap = 0.0;
        for (int i = 0; i <= 1000; ++i) {
          const double wu = f + (c.w_max - f) * i / 1000.0;
          const double wl = f * i / 1000.0;
          gap = std::max(gap, c.e * c.pdf.expected_excess(wu - f) - envelope(cell.upper, wu));
          gap = std::max(gap, c.f * c.pdf.expected_shortfall(wl - f) - envelope(cell.lower, wl));
        }
        CHECK(gap <= 0.01 * base);
      }
    }
  }
}

TEST_CASE("system tangents and total risk") {
  const auto sys = testing::desk();
  const std::vector<double> rel{0.2};
  const auto errors = make_error_model(sys, rel);
  const Prices prices{{20.0, 40.0}, {100.0, 200.0}};
  const auto risk = build_system_tangents(sys, errors, prices, RiskSettings{});
  REQUIRE(risk.cells.size() == 2);
  const std::vector<std::vector<double>> wu{{100.0, 100.0}};
  const std::vector<std::vector<double>> wl{{0.0, 0.0}};
  CHECK(total_risk_exact(sys, risk, prices, wu, wl) == 0.0);

  const Prices cheap{{50.0, 40.0}, {100.0, 30.0}};
  CHECK(cheap.validate(2).size() == 1);
  const Prices negative{{-1.0, 40.0}, {100.0, 200.0}};
  CHECK_THROWS_AS((void)negative.validate(2), InputError);
}
