#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rcp/theory.hpp"

using rcp::ConstantLedger;
using rcp::ProblemConstants;
using rcp::Schedule;
using rcp::ScheduleRegime;

namespace {

// Ring-like constants with a mildly lossy compressor.
ProblemConstants base_pc() {
  ProblemConstants pc;
  pc.L_f = 1.0;
  pc.lambda_min_pos = 0.38;
  pc.lambda_max = 4.0;
  pc.phi1 = 0.4;
  pc.r0 = 0.1;
  pc.sigma_sq = 0.0;
  pc.nu = 1.0;
  pc.r = 1.0;
  pc.n_agents = 4;
  return pc;
}

bool violates(const ConstantLedger& led, const std::string& name) {
  return std::find(led.violated.begin(), led.violated.end(), name) !=
         led.violated.end();
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("problem constants are validated") {
  ProblemConstants pc = base_pc();
  pc.phi1 = 0.0;
  CHECK_THROWS_WITH_AS(pc.validate(),
                       "ProblemConstants: phi1 must lie in (0, 1]",
                       std::invalid_argument);
  pc = base_pc();
  pc.phi1 = 1.5;
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  pc = base_pc();
  pc.L_f = -1.0;
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  pc = base_pc();
  pc.lambda_min_pos = 0.0;
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  pc = base_pc();
  pc.nu = 0.0;
  CHECK_THROWS_AS(pc.validate(), std::invalid_argument);
  CHECK_NOTHROW(base_pc().validate());
}

TEST_CASE("ledger inputs must be positive") {
  CHECK_THROWS_WITH_AS(
      rcp::ledger_theorem1(base_pc(), 0.0, 0.5, 1.0, 10.0, 0.01),
      "theory ledger requires positive beta1", std::invalid_argument);
  CHECK_THROWS_AS(rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("fixed-omega ledger reproduces pinned constants") {
  auto led = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  // c_0 = max{(9 + beta5) / (2 lambda), 1} at lambda = 0.38
  CHECK(led.at("c_0") ==
        doctest::Approx(13.157894736842105).epsilon(1e-12));
  // epsilon_4 = (3 omega - 1)/4 - 3/lambda crosses zero between 10 and 20
  CHECK(led.at("epsilon_4") ==
        doctest::Approx(-0.644736842105263).epsilon(1e-9));
  CHECK(violates(led, "epsilon_4 > 0"));
  CHECK_FALSE(led.feasible);

  auto led20 = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 20.0, 0.01);
  CHECK(led20.at("epsilon_4") ==
        doctest::Approx(6.855263157894737).epsilon(1e-9));
  CHECK_FALSE(violates(led20, "epsilon_4 > 0"));
}

TEST_CASE("every ledger entry is finite at a feasible point") {
  // Infeasible points may push derived bounds (beta_3, c_bar_5) to infinity
  // by design, so finiteness is only promised where the conditions hold.
  auto p1 = rcp::suggest_params(base_pc(), ScheduleRegime::theorem1, 4, 1000);
  auto s1 = Schedule::make(ScheduleRegime::theorem1, p1);
  auto p3 = rcp::suggest_params(base_pc(), ScheduleRegime::theorem3, 4, 1000);
  for (const auto& led :
       {rcp::ledger_theorem1(base_pc(), p1.beta1, p1.beta2, 1.0, s1.omega(0),
                             s1.eta(0)),
        rcp::ledger_theorem3(base_pc(), p3.beta0, p3.beta1, p3.beta2, p3.t1,
                             p3.ctilde, p3.h0)}) {
    REQUIRE(led.feasible);
    for (const auto& e : led.entries) {
      CAPTURE(e.symbol);
      CHECK(std::isfinite(e.value));
    }
    CHECK(led.feasible == led.violated.empty());
  }
}

TEST_CASE("ledger evaluation is pure") {
  auto a = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  auto b = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].symbol == b.entries[i].symbol);
    CHECK(a.entries[i].value == b.entries[i].value);
  }
  CHECK(a.violated == b.violated);
}

TEST_CASE("epsilon_4 grows with omega and c_0 falls with connectivity") {
  double prev = -1e300;
  for (double omega : {5.0, 10.0, 20.0, 40.0}) {
    auto led = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, omega, 0.01);
    CHECK(led.at("epsilon_4") > prev);
    prev = led.at("epsilon_4");
  }

  ProblemConstants better = base_pc();
  better.lambda_min_pos = 0.76;
  auto led_a = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  auto led_b = rcp::ledger_theorem1(better, 14.0, 0.5, 1.0, 10.0, 0.01);
  CHECK(led_b.at("c_0") < led_a.at("c_0"));
  CHECK(led_b.at("c_0") ==
        doctest::Approx(10.0 / 1.52).epsilon(1e-12));
}

TEST_CASE("violated conditions carry their own names") {
  auto led = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  const double c0 = led.at("c_0");
  auto small_b1 =
      rcp::ledger_theorem1(base_pc(), 0.5 * c0, 0.5, 1.0, 10.0, 0.01);
  CHECK(violates(small_b1, "beta_1 > c_0"));

  auto tiny_omega =
      rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 0.001, 0.01);
  CHECK(violates(tiny_omega, "omega > beta_3"));
  CHECK(violates(tiny_omega, "epsilon_4 > 0"));

  ProblemConstants heavy = base_pc();
  heavy.alpha_r = 1.2;
  auto mixed = rcp::ledger_theorem1(heavy, 14.0, 0.5, 1.0, 10.0, 0.01);
  CHECK(violates(mixed, "alpha_x * r < 1"));
}

TEST_CASE("ledger lookup helpers") {
  auto led = rcp::ledger_theorem1(base_pc(), 14.0, 0.5, 1.0, 10.0, 0.01);
  CHECK(led.has("epsilon_10_margin"));
  CHECK_FALSE(led.has("m_1"));
  CHECK_THROWS_AS(led.at("m_1"), std::out_of_range);
  const std::string report = led.report();
  CHECK(report.find("feasible  no") != std::string::npos);
  CHECK(report.find("violated  ") != std::string::npos);
  CHECK(report.find("c_0") != std::string::npos);
}

TEST_CASE("growing-omega ledger pins its own thresholds") {
  auto led = rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1e6, 0.5, 1e-7);
  // c_bar_1 = 9 / (2 lambda) + 1
  CHECK(led.at("c_bar_1") ==
        doctest::Approx(12.842105263157894).epsilon(1e-12));
  CHECK(led.at("beta_0_lo") ==
        doctest::Approx(0.5 * 1.0 * 1e-5 / 4.0).epsilon(1e-12));
  CHECK(led.at("beta_0_hi") == doctest::Approx(1e-5 / 4.0).epsilon(1e-12));

  // Shrinking ctilde widens the admissible beta0 interval from below.
  auto wide = rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1e6, 0.25, 1e-7);
  CHECK(wide.at("beta_0_lo") < led.at("beta_0_lo"));
  CHECK(wide.at("beta_0_hi") == led.at("beta_0_hi"));
}

TEST_CASE("growing-omega conditions carry their own names") {
  // beta1 below c_bar_1
  auto low_b1 = rcp::ledger_theorem3(base_pc(), 1e-6, 2.0, 1e-5, 1e6, 0.5);
  CHECK(violates(low_b1, "beta_1 > c_bar_1"));

  // t1 too small for the ramp
  auto low_t1 = rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1.0, 0.5);
  CHECK(violates(low_t1, "t_1 > c_bar_5"));

  // beta0 off both ends of the interval
  auto lo = rcp::ledger_theorem3(base_pc(), 1e-9, 26.0, 1e-5, 1e6, 0.5);
  CHECK(violates(lo, "beta_0 >= beta_0_lo"));
  auto hi = rcp::ledger_theorem3(base_pc(), 1e-2, 26.0, 1e-5, 1e6, 0.5);
  CHECK(violates(hi, "beta_0 < beta_0_hi"));

  // h0 outside (0, 1/t1); the condition is only checked when h0 is given
  auto bad_h0 = rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1e6, 0.5, 0.5);
  CHECK(violates(bad_h0, "h_0 in (0, 1/t_1)"));
  auto no_h0 = rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1e6, 0.5);
  CHECK_FALSE(violates(no_h0, "h_0 in (0, 1/t_1)"));

  ProblemConstants no_nu = base_pc();
  no_nu.nu.reset();
  CHECK_THROWS_WITH_AS(
      rcp::ledger_theorem3(no_nu, 1e-6, 26.0, 1e-5, 1e6, 0.5),
      "ledger_theorem3 requires the PL constant nu", std::invalid_argument);
  CHECK_THROWS_AS(rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 1e6, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rcp::ledger_theorem3(base_pc(), 1e-6, 26.0, 1e-5, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("suggested parameters re-validate as feasible") {
  const auto pc = base_pc();

  SUBCASE("fixed omega") {
    auto p = rcp::suggest_params(pc, ScheduleRegime::theorem1, 4, 1000);
    auto sched = Schedule::make(ScheduleRegime::theorem1, p);
    auto led = rcp::ledger_theorem1(pc, p.beta1, p.beta2, 1.0, sched.omega(0),
                                    sched.eta(0));
    CHECK(led.feasible);
  }

  SUBCASE("horizon-scaled omega") {
    // eta is pinned at sqrt(n/T) in this regime, so feasibility on these
    // constants only opens up at extreme horizons.
    const long long T = 4000000000000000LL;
    auto p = rcp::suggest_params(pc, ScheduleRegime::theorem1_speedup, 4, T);
    auto sched = Schedule::make(ScheduleRegime::theorem1_speedup, p);
    auto led = rcp::ledger_theorem1(pc, p.beta1, p.beta2, 1.0, sched.omega(0),
                                    sched.eta(0));
    CHECK(led.feasible);
  }

  SUBCASE("polynomially growing omega") {
    const long long T = 4000000000000000LL;
    auto p = rcp::suggest_params(pc, ScheduleRegime::theorem2, 4, T);
    auto sched = Schedule::make(ScheduleRegime::theorem2, p);
    auto led = rcp::ledger_theorem1(pc, p.beta1, p.beta2, 1.0, sched.omega(0),
                                    sched.eta(0));
    CHECK(led.feasible);
  }

  SUBCASE("linearly growing omega") {
    auto p = rcp::suggest_params(pc, ScheduleRegime::theorem3, 4, 1000);
    auto sched = Schedule::make(ScheduleRegime::theorem3, p);
    CHECK(sched.omega(0) == doctest::Approx(p.beta0 * p.t1).epsilon(1e-12));
    auto led = rcp::ledger_theorem3(pc, p.beta0, p.beta1, p.beta2, p.t1,
                                    p.ctilde, p.h0);
    CHECK(led.feasible);
  }
}

TEST_CASE("suggestion failures name the binding condition") {
  // At a practical horizon the pinned eta = sqrt(n/T) cannot satisfy the
  // step-size cap on these constants.
  CHECK_THROWS_WITH_AS(
      rcp::suggest_params(base_pc(), ScheduleRegime::theorem1_speedup, 4, 1000),
      doctest::Contains("binding condition:"), std::runtime_error);

  // Vanishing connectivity pushes the beta1 lower bound out of reach.
  ProblemConstants broken = base_pc();
  broken.lambda_min_pos = 1e-13;
  CHECK_THROWS_WITH_AS(
      rcp::suggest_params(broken, ScheduleRegime::theorem1, 4, 1000),
      doctest::Contains("binding condition: beta_1 > c_0"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      rcp::suggest_params(broken, ScheduleRegime::theorem3, 4, 1000),
      doctest::Contains("binding condition: beta_1 > c_bar_1"),
      std::runtime_error);

  ProblemConstants no_nu = base_pc();
  no_nu.nu.reset();
  CHECK_THROWS_AS(rcp::suggest_params(no_nu, ScheduleRegime::theorem3, 4, 1000),
                  std::invalid_argument);
}

TEST_CASE("custom regime has no ledger-backed suggestion") {
  CHECK_THROWS_AS(rcp::suggest_params(base_pc(), ScheduleRegime::custom, 4, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(rcp::suggest_params(base_pc(), ScheduleRegime::table1, 4, 100),
                  std::invalid_argument);
}

}  // TEST_SUITE
