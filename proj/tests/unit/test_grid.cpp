#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "../support/fixtures.hpp"
#include "rruc/error.hpp"
#include "rruc/grid/case_io.hpp"
#include "rruc/grid/dc_network.hpp"

using namespace rruc;
using namespace rruc::grid;

namespace {

const char* kTwoBus = R"({
  "version": 1, "horizon": 2,
  "buses": [{"id": "a", "ref": true}, {"id": "b"}],
  "lines": [{"id": "ab", "from": "a", "to": "b", "susceptance": 10, "capacity_mw": 100}],
  "generators": [{"id": "g", "bus": "a", "pmin_mw": 0, "pmax_mw": 100, "ramp_up_mw": 50,
                  "ramp_down_mw": 50, "min_on": 1, "min_off": 1, "startup_cost": 2,
                  "no_load_cost": 5, "c2": 0, "c1": 10,
                  "init_on": true, "init_hours": 3, "init_output_mw": 40}],
  "wind": [{"id": "w", "bus": "b", "wmax_mw": 80, "forecast_mw": [20, 30]}],
  "demand": {"b": [50, 60]}
})";

// Flows by solving the reduced B θ = P directly, independent of the PTDF code.
std::vector<double> oracle_flows(const PowerSystem& s, const std::vector<double>& p) {
  const auto n = static_cast<Eigen::Index>(s.num_buses());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& l : s.lines()) {
    const auto i = static_cast<Eigen::Index>(l.from);
    const auto j = static_cast<Eigen::Index>(l.to);
    B(i, i) += l.susceptance;
    B(j, j) += l.susceptance;
    B(i, j) -= l.susceptance;
    B(j, i) -= l.susceptance;
  }
  const auto r = static_cast<Eigen::Index>(s.reference_bus());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; ++k)
    if (k != r) keep.push_back(k);
  Eigen::MatrixXd Br(keep.size(), keep.size());
  Eigen::VectorXd pr(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    pr(a) = p[keep[a]];
    for (std::size_t b = 0; b < keep.size(); ++b) Br(a, b) = B(keep[a], keep[b]);
  }
  Eigen::VectorXd th_r = Br.colPivHouseholderQr().solve(pr);
  std::vector<double> theta(n, 0.0);
  for (std::size_t a = 0; a < keep.size(); ++a) theta[keep[a]] = th_r(a);
  std::vector<double> flows;
  for (const auto& l : s.lines()) flows.push_back(l.susceptance * (theta[l.from] - theta[l.to]));
  return flows;
}

}  // namespace

TEST_CASE("load_case reads every field") {
  const auto s = load_case(kTwoBus);
  CHECK(s.num_buses() == 2);
  CHECK(s.reference_bus() == 0);
  CHECK(s.horizon() == 2);
  REQUIRE(s.num_generators() == 1);
  CHECK(s.generators()[0].init_output.value() == 40.0);
  CHECK(s.generators()[0].init_hours.value() == 3);
  CHECK(s.wind()[0].bus == 1);
  CHECK(s.total_demand(1) == 60.0);
  CHECK(s.total_forecast(0) == 20.0);
  CHECK(s.neighbours(0) == std::vector<std::size_t>{1});
}

TEST_CASE("serialize then load is the identity") {
  const auto s = load_case(kTwoBus);
  CHECK(load_case(serialize_case(s)) == s);
  const auto d = testing::desk();
  CHECK(load_case(serialize_case(d)) == d);
}

TEST_CASE("schema errors name the field") {
  std::string doc = kTwoBus;
  doc.replace(doc.find("\"pmax_mw\": 100"), 14, "\"pmax_mw\": \"x\"");
  try {
    (void)load_case(doc);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("generators[0].pmax_mw: expected number") != std::string::npos);
  }
}

TEST_CASE("structural validation") {
  SUBCASE("no reference bus") {
    std::string doc = kTwoBus;
    doc.replace(doc.find(", \"ref\": true"), 13, "");
    CHECK_THROWS_AS((void)load_case(doc), InputError);
  }
  SUBCASE("two reference buses") {
    std::string doc = kTwoBus;
    doc.replace(doc.find("{\"id\": \"b\"}"), 11, "{\"id\": \"b\", \"ref\": true}");
    CHECK_THROWS_AS((void)load_case(doc), InputError);
  }
  SUBCASE("disconnected network") {
    std::string doc = kTwoBus;
    doc.replace(doc.find("\"lines\": [{"), 9, "\"lineZ\": ");
    CHECK_THROWS_AS((void)load_case(doc), InputError);
  }
  SUBCASE("series length mismatch") {
    std::string doc = kTwoBus;
    doc.replace(doc.find("[50, 60]"), 8, "[50]");
    CHECK_THROWS_AS((void)load_case(doc), InputError);
  }
  SUBCASE("forecast above capacity") {
    std::string doc = kTwoBus;
    doc.replace(doc.find("[20, 30]"), 8, "[20, 90]");
    CHECK_THROWS_AS((void)load_case(doc), InputError);
  }
}

TEST_CASE("single bus case has an empty PTDF") {
  const auto s = testing::single_bus(0, 100, {50});
  const auto ptdf = compute_ptdf(s);
  CHECK(ptdf.num_lines() == 0);
}

TEST_CASE("two-bus sign convention") {
  const auto s = load_case(kTwoBus);
  const auto ptdf = compute_ptdf(s);
  CHECK(ptdf(0, 1) == doctest::Approx(-1.0));
  CHECK(ptdf(0, 0) == 0.0);

  const std::vector<double> p{-5.0, 5.0};
  const auto flow = solve_dc_flow(s, p);
  CHECK(flow.angles[0] == 0.0);
  CHECK(flow.angles[1] - flow.angles[0] == doctest::Approx(0.5));
  CHECK(flow.flows[0] == doctest::Approx(-5.0));
}

TEST_CASE("triangle PTDF splits 2/3 and 1/3") {
  const auto s = testing::triangle();
  const auto ptdf = compute_ptdf(s);
  // lines: l12, l23, l13; injection at b1 withdrawn at the reference b3
  std::vector<double> p{1.0, 0.0, -1.0};
  const auto want = oracle_flows(s, p);
  CHECK(want[2] == doctest::Approx(2.0 / 3.0));
  CHECK(want[0] == doctest::Approx(1.0 / 3.0));
  CHECK(want[1] == doctest::Approx(1.0 / 3.0));
  for (std::size_t l = 0; l < 3; ++l) CHECK(ptdf(l, 0) == doctest::Approx(want[l]).epsilon(1e-12));
  for (std::size_t l = 0; l < 3; ++l) CHECK(ptdf(l, s.reference_bus()) == 0.0);
}

TEST_CASE("PTDF flows equal angle-model flows for balanced injections") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (const auto& s : {testing::triangle(), testing::desk(), testing::triangle(3.0)}) {
    const auto ptdf = compute_ptdf(s);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> p(s.num_buses());
      double sum = 0.0;
      for (std::size_t n = 1; n < p.size(); ++n) sum += (p[n] = u(rng));
      p[0] = -sum;
      const auto flow = solve_dc_flow(s, p);
      const auto oracle = oracle_flows(s, p);
      for (std::size_t l = 0; l < s.num_lines(); ++l) {
        double f = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) f += ptdf(l, n) * p[n];
        CHECK(std::abs(f - flow.flows[l]) <= 1e-8);
        CHECK(std::abs(oracle[l] - flow.flows[l]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("solve_dc_flow checks its inputs") {
  const auto s = testing::triangle();
  const std::vector<double> zero(3, 0.0);
  const auto flow = solve_dc_flow(s, zero);
  for (double f : flow.flows) CHECK(f == 0.0);
  for (double a : flow.angles) CHECK(a == 0.0);
  const std::vector<double> bad{1.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)solve_dc_flow(s, bad), InputError);
  const std::vector<double> huge{-1e5, 0.0, 1e5};
  CHECK(solve_dc_flow(s, huge).angle_limit_exceeded);
}
