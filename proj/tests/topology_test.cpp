#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "rcp/rng.hpp"
#include "rcp/topology.hpp"
#include "test_support.hpp"

using rcp::Graph;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("ring of three is the triangle") {
  Graph g = Graph::ring(3);
  CHECK(g.size() == 3);
  std::set<std::pair<int, int>> keys;
  for (const auto& [key, w] : g.edges()) {
    keys.insert(key);
    CHECK(w == 1.0);
  }
  CHECK(keys == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("complete graph on four agents") {
  Graph g = Graph::complete(4);
  CHECK(g.edges().size() == 6);
  auto sb = g.spectral_bounds();
  CHECK(sb.lambda_min_pos == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(sb.lambda_max == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("single edge Laplacian") {
  Graph g(2, {{0, 1, 1.0}});
  Eigen::MatrixXd L = g.laplacian();
  CHECK(L(0, 0) == 1.0);
  CHECK(L(0, 1) == -1.0);
  CHECK(L(1, 0) == -1.0);
  CHECK(L(1, 1) == 1.0);
  auto sb = g.spectral_bounds();
  CHECK(sb.lambda_min_pos == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sb.lambda_max == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ring of ten spectral bounds") {
  auto sb = Graph::ring(10).spectral_bounds();
  CHECK(sb.lambda_min_pos == doctest::Approx(0.381966).epsilon(1e-6));
  CHECK(sb.lambda_max == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("ring eigenvalues match the circulant closed form") {
  for (int n = 3; n <= 16; ++n) {
    CAPTURE(n);
    double lam_min = 1e300, lam_max = 0.0;
    for (int k = 1; k < n; ++k) {
      const double lam = 2.0 - 2.0 * std::cos(2.0 * kPi * k / n);
      lam_min = std::min(lam_min, lam);
      lam_max = std::max(lam_max, lam);
    }
    auto sb = Graph::ring(n).spectral_bounds();
    CHECK(std::abs(sb.lambda_min_pos - lam_min) < 1e-8);
    CHECK(std::abs(sb.lambda_max - lam_max) < 1e-8);
  }
}

TEST_CASE("Laplacian annihilates the all-ones vector") {
  for (const Graph& g :
       {Graph::ring(7), Graph::torus(3, 4), Graph::complete(5)}) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.size());
    CHECK((g.laplacian() * ones).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("spectral bounds sandwich the quadratic form on mean-zero vectors") {
  Graph g = Graph::ring(10);
  Eigen::MatrixXd L = g.laplacian();
  auto sb = g.spectral_bounds();
  rcp::RandomStream rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd z(g.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    z.array() -= z.mean();
    const double q = z.dot(L * z);
    const double nsq = z.squaredNorm();
    CHECK(q >= sb.lambda_min_pos * nsq * (1.0 - 1e-9));
    CHECK(q <= sb.lambda_max * nsq * (1.0 + 1e-9));
  }
}

TEST_CASE("torus wires a 4-regular grid") {
  Graph g = Graph::torus(3, 3);
  CHECK(g.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(g.neighbors(i).size() == 4);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(9);
  CHECK((g.laplacian() * ones).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("edge list files accept comments and optional weights") {
  rcp_test::TempFile f("edges",
                       "# a triangle with one heavy edge\n"
                       "0 1\n"
                       "1 2 2.5\n"
                       "2 0\n");
  Graph g = Graph::from_edge_list_file(f.path());
  CHECK(g.size() == 3);
  CHECK(g.edges().at({1, 2}) == 2.5);
  CHECK(g.edges().at({0, 1}) == 1.0);
}

TEST_CASE("construction rejects malformed graphs") {
  CHECK_THROWS_AS(Graph::ring(1), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Graph(3, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}}),
                       "self loops are not allowed", std::invalid_argument);
  CHECK_THROWS_WITH_AS(Graph(2, {{0, 1, -1.0}}),
                       "edge weights must be positive", std::invalid_argument);
  CHECK_THROWS_WITH_AS(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}),
                       "graph is not connected", std::invalid_argument);
  CHECK_THROWS_WITH_AS(Graph(2, {{0, 5, 1.0}}), "edge endpoint out of range",
                       std::invalid_argument);
  CHECK_THROWS_AS(Graph::torus(1, 5), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edge_list_file("/nonexistent/edges.txt"),
                  std::runtime_error);
}

TEST_CASE("edge list parse errors name the line") {
  rcp_test::TempFile f("badedges", "0 1\nnot an edge\n");
  CHECK_THROWS_WITH_AS(Graph::from_edge_list_file(f.path()),
                       doctest::Contains("line 2"), std::runtime_error);
}

}  // TEST_SUITE
