#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rcp/metrics.hpp"
#include "rcp/rng.hpp"

TEST_SUITE("metrics") {

TEST_CASE("consensus error vanishes when everyone agrees") {
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  std::vector<Eigen::VectorXd> xs(4, x);
  CHECK(rcp::consensus_error(xs) == 0.0);
}

TEST_CASE("two scalar agents at plus and minus one") {
  std::vector<Eigen::VectorXd> xs(2);
  xs[0] = Eigen::VectorXd::Constant(1, 1.0);
  xs[1] = Eigen::VectorXd::Constant(1, -1.0);
  CHECK(rcp::consensus_error(xs) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("consensus error equals the scaled pairwise spread") {
  // (1/n) sum_i ||x_i - xbar||^2 == (1/(2n^2)) sum_i sum_j ||x_i - x_j||^2
  rcp::RandomStream rng(21);
  const int n = 5, d = 4;
  std::vector<Eigen::VectorXd> xs(n);
  for (auto& x : xs) {
    x.resize(d);
    for (int i = 0; i < d; ++i) x(i) = rng.normal();
  }
  double pairwise = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pairwise += (xs[i] - xs[j]).squaredNorm();
  pairwise /= 2.0 * n * n;
  CHECK(std::abs(rcp::consensus_error(xs) - pairwise) < 1e-12);
}

TEST_CASE("consensus error ignores common translations") {
  rcp::RandomStream rng(22);
  const int n = 6, d = 3;
  std::vector<Eigen::VectorXd> xs(n);
  for (auto& x : xs) {
    x.resize(d);
    for (int i = 0; i < d; ++i) x(i) = rng.normal();
  }
  const double before = rcp::consensus_error(xs);
  Eigen::VectorXd shift(d);
  shift << 5.0, -3.0, 11.0;
  for (auto& x : xs) x += shift;
  CHECK(std::abs(rcp::consensus_error(xs) - before) < 1e-12);
}

TEST_CASE("consensus error rejects an empty network") {
  CHECK_THROWS_AS(rcp::consensus_error({}), std::invalid_argument);
}

TEST_CASE("residual is the prefix minimum of consensus plus gradient") {
  rcp::RandomStream rng(23);
  double residual = 1e300;
  double oracle = 1e300;
  for (int k = 0; k < 500; ++k) {
    const double c = std::exp(rng.normal());
    const double g = std::exp(rng.normal());
    residual = rcp::residual_update(residual, c, g);
    oracle = std::min(oracle, c + g);
    CHECK(residual == oracle);
  }
}

TEST_CASE("log-log slope recovers exact power laws") {
  std::vector<std::pair<double, double>> sq, flat;
  for (int k = 1; k <= 300; ++k) {
    sq.emplace_back(k, 1.0 / (double(k) * k));
    flat.emplace_back(k, 3.7);
  }
  CHECK(rcp::loglog_slope(sq, 10, 300) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(rcp::loglog_slope(flat, 10, 300) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log-log slope tolerates multiplicative noise") {
  rcp::RandomStream rng(24);
  std::vector<std::pair<double, double>> series;
  for (int k = 1; k <= 200; ++k)
    series.emplace_back(k, (1.0 / k) * std::exp(0.05 * rng.normal()));
  const double slope = rcp::loglog_slope(series, 1, 200);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("log-log slope refuses thin or invalid windows") {
  std::vector<std::pair<double, double>> series;
  for (int k = 1; k <= 20; ++k) series.emplace_back(k, 1.0 / k);
  CHECK_THROWS_WITH_AS(rcp::loglog_slope(series, 15, 20),
                       "loglog_slope: fewer than 10 points in window",
                       std::invalid_argument);
  series[4].second = 0.0;
  CHECK_THROWS_WITH_AS(rcp::loglog_slope(series, 1, 20),
                       "loglog_slope: nonpositive value inside the fit window",
                       std::invalid_argument);
}

}  // TEST_SUITE
