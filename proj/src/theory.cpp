#include "rcp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounds we refuse to chase in suggest_params; a lower bound this large means
// the feasible region is out of numerical reach for any practical run.
constexpr double kSearchCap = 1e12;
// t1 only shifts the omega ramp, so huge values stay numerically sound; the
// required offset scales like 1/beta2^2 and routinely lands near 1e13.
constexpr double kT1Cap = 1e15;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("theory ledger requires positive ") +
                                what);
  }
}

void push(ConstantLedger& ledger, const char* symbol, double value) {
  ledger.entries.push_back({symbol, value});
}

void check(ConstantLedger& ledger, const char* condition, bool holds) {
  if (!holds) ledger.violated.emplace_back(condition);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void ProblemConstants::validate() const {
  if (!(L_f > 0.0)) throw std::invalid_argument("ProblemConstants: L_f must be positive");
  if (!(lambda_min_pos > 0.0)) {
    throw std::invalid_argument(
        "ProblemConstants: lambda_min_pos must be positive");
  }
  if (!(lambda_max > 0.0)) {
    throw std::invalid_argument("ProblemConstants: lambda_max must be positive");
  }
  if (!(phi1 > 0.0) || phi1 > 1.0) {
    throw std::invalid_argument("ProblemConstants: phi1 must lie in (0, 1]");
  }
  if (r0 < 0.0) throw std::invalid_argument("ProblemConstants: r0 must be nonnegative");
  if (sigma_sq < 0.0) {
    throw std::invalid_argument("ProblemConstants: sigma_sq must be nonnegative");
  }
  if (nu && !(*nu > 0.0)) {
    throw std::invalid_argument("ProblemConstants: nu must be positive when set");
  }
  if (!(r > 0.0)) throw std::invalid_argument("ProblemConstants: r must be positive");
  if (alpha_r < 0.0) {
    throw std::invalid_argument("ProblemConstants: alpha_r must be nonnegative");
  }
  if (sigma_bar < 0.0) {
    throw std::invalid_argument("ProblemConstants: sigma_bar must be nonnegative");
  }
  if (n_agents < 1) {
    throw std::invalid_argument("ProblemConstants: n_agents must be at least 1");
  }
}

bool ConstantLedger::has(const std::string& symbol) const {
  for (const auto& e : entries) {
    if (e.symbol == symbol) return true;
  }
  return false;
}

double ConstantLedger::at(const std::string& symbol) const {
  for (const auto& e : entries) {
    if (e.symbol == symbol) return e.value;
  }
  throw std::out_of_range("no ledger symbol '" + symbol + "'");
}

std::string ConstantLedger::report() const {
  std::size_t width = 0;
  for (const auto& e : entries) width = std::max(width, e.symbol.size());
  std::ostringstream out;
  for (const auto& e : entries) {
    out << e.symbol << std::string(width - e.symbol.size() + 2, ' ')
        << format_value(e.value) << "\n";
  }
  out << "feasible  " << (feasible ? "yes" : "no") << "\n";
  for (const auto& v : violated) out << "violated  " << v << "\n";
  return out.str();
}

ConstantLedger ledger_theorem1(const ProblemConstants& pc, double beta1,
                               double beta2, double beta5, double omega,
                               double eta) {
  pc.validate();
  require_positive(beta1, "beta1");
  require_positive(beta2, "beta2");
  require_positive(beta5, "beta5");
  require_positive(omega, "omega");
  require_positive(eta, "eta");

  const double lam = pc.lambda_min_pos;
  const double lam_bar = pc.lambda_max;
  const double phi1 = pc.phi1;
  const double r0 = pc.r0;
  const double Lf = pc.L_f;
  const double Lf2 = Lf * Lf;
  const double gamma = beta1 * omega;
  const double g2l2 = gamma * gamma * lam_bar * lam_bar;
  const double w2 = omega * omega;
  const double b1p = 1.0 + beta1;

  const double eps1 = gamma / 2.0 * lam - ((omega + 4.0) / 4.0 + 1.25 * Lf2);
  const double eps2 = (7.0 + 16.0 / phi1) * Lf2 + (4.0 + 8.0 / phi1) * g2l2;
  const double eps3 = 0.5 + w2 + 1.5 * g2l2;
  const double eps4 = (3.0 * omega - 1.0) / 4.0 - 3.0 / lam;
  const double eps5 = 2.0 * w2 * lam_bar + 1.0 / lam + (4.0 + 8.0 / phi1) * w2 * lam;
  const double eps6 =
      0.125 - (2.0 * b1p * b1p / (w2 * lam) + 1.0 / (w2 * lam * lam)) * Lf2;
  const double eps7 =
      (b1p / (w2 * lam) + 1.0 / (w2 * lam * lam) + 1.5) * Lf2 + Lf;
  const double eps8 = (2.0 * b1p * b1p / (eta * w2 * lam) + b1p / (w2 * lam) +
                       (1.0 + eta) / (eta * w2 * lam * lam) + 1.5) *
                          Lf2 +
                      Lf;
  const double eps9 = 11.0 + 16.0 / phi1;
  const double eps10 = phi1 / 2.0 + phi1 * phi1 / 2.0;
  const double eps11 = 0.5 * (gamma + 2.0 * omega) * lam_bar * r0 + 2.0 * omega * r0;
  const double eps12 = (8.0 + 7.0 * phi1) * g2l2 * r0 / phi1 + (1.0 + 2.0 * w2) * r0;
  const double eps13 = (beta1 * beta2 + 6.0 * beta2) * lam_bar * pc.r * pc.r +
                       (14.0 * beta1 * beta1 * beta2 * beta2 * lam_bar * lam_bar *
                            pc.r * pc.r +
                        2.0 * eta * eta + 4.0 * beta1 * beta1 * beta2 * beta2) +
                       1.0;
  const double epst1 =
      gamma / 2.0 * lam - ((9.0 * omega + 4.0) / 4.0 + 1.25 * Lf2);
  const double epst2 = (7.0 + 16.0 / phi1) * Lf2 + (4.0 + 8.0 / phi1) * g2l2 +
                       1.0 + 2.0 * w2 + 3.0 * g2l2;

  const double beta6 = (16.0 * b1p * b1p / lam + 8.0 / (lam * lam)) * Lf2;
  // Root of eps12 x^2 + eps11 x = eps10; degenerates gracefully when the
  // compressor is exact (r0 = 0 makes both coefficients vanish).
  double quad;
  if (eps12 > 0.0) {
    quad = (std::sqrt(eps11 * eps11 + 4.0 * eps10 * eps12) - eps11) /
           (2.0 * eps12);
  } else if (eps11 > 0.0) {
    quad = eps10 / eps11;
  } else {
    quad = kInf;
  }
  const double beta4 =
      std::min({epst1 / epst2, eps4 / eps5, eps6 / eps7, quad, 1.0});
  const double beta3 = std::max({(4.0 + 5.0 * Lf2) / beta5,
                                 (12.0 / lam + 1.0) / 3.0, std::sqrt(beta6),
                                 beta4 > 0.0 ? beta2 / beta4 : kInf,
                                 4.0 * beta2 * Lf});
  const double c_check1 = (gamma * lam - omega) / (2.0 * gamma * lam);
  const double c0 = std::max((9.0 + beta5) / (2.0 * lam), 1.0);
  const double c1 =
      (2.0 * b1p * b1p / (beta2 * beta3 * lam) + b1p / (beta3 * beta3 * lam) +
       1.0 / (beta2 * beta3 * lam * lam) +
       1.0 / (beta3 * beta3 * lam * lam) + 1.5) *
          Lf2 +
      Lf;
  const double c2 = eta * epst1 - eta * eta * epst2;
  const double margin = eps10 - eta * eps11 - eta * eta * eps12;

  ConstantLedger ledger;
  push(ledger, "phi1", phi1);
  push(ledger, "r0", r0);
  push(ledger, "gamma", gamma);
  push(ledger, "epsilon_1", eps1);
  push(ledger, "epsilon_2", eps2);
  push(ledger, "epsilon_3", eps3);
  push(ledger, "epsilon_4", eps4);
  push(ledger, "epsilon_5", eps5);
  push(ledger, "epsilon_6", eps6);
  push(ledger, "epsilon_7", eps7);
  push(ledger, "epsilon_8", eps8);
  push(ledger, "epsilon_9", eps9);
  push(ledger, "epsilon_10", eps10);
  push(ledger, "epsilon_11", eps11);
  push(ledger, "epsilon_12", eps12);
  push(ledger, "epsilon_13", eps13);
  push(ledger, "epsilon_tilde_1", epst1);
  push(ledger, "epsilon_tilde_2", epst2);
  push(ledger, "beta_3", beta3);
  push(ledger, "beta_4", beta4);
  push(ledger, "beta_5", beta5);
  push(ledger, "beta_6", beta6);
  push(ledger, "c_check_1", c_check1);
  push(ledger, "c_0", c0);
  push(ledger, "c_1", c1);
  push(ledger, "c_2", c2);
  push(ledger, "epsilon_10_margin", margin);

  check(ledger, "beta_1 > c_0", beta1 > c0);
  check(ledger, "omega > beta_3", omega > beta3);
  check(ledger, "eta < beta_4", eta < beta4);
  check(ledger, "epsilon_tilde_1 > 0", epst1 > 0.0);
  check(ledger, "epsilon_4 > 0", eps4 > 0.0);
  check(ledger, "epsilon_6 > 0", eps6 > 0.0);
  check(ledger, "epsilon_10_margin > 0", margin > 0.0);
  check(ledger, "alpha_x * r < 1", pc.effective_alpha_r() < 1.0);
  ledger.feasible = ledger.violated.empty();
  return ledger;
}

ConstantLedger ledger_theorem3(const ProblemConstants& pc, double beta0,
                               double beta1, double beta2, double t1,
                               double ctilde, std::optional<double> h0) {
  pc.validate();
  if (!pc.nu) {
    throw std::invalid_argument("ledger_theorem3 requires the PL constant nu");
  }
  require_positive(beta0, "beta0");
  require_positive(beta1, "beta1");
  require_positive(beta2, "beta2");
  require_positive(ctilde, "ctilde");
  if (!(ctilde < 1.0)) {
    throw std::invalid_argument("theory ledger requires ctilde in (0, 1)");
  }
  if (!(t1 >= 1.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("theory ledger requires t1 >= 1");
  }

  const double lam = pc.lambda_min_pos;
  const double lam_bar = pc.lambda_max;
  const double phi1 = pc.phi1;
  const double r0 = pc.r0;
  const double Lf = pc.L_f;
  const double Lf2 = Lf * Lf;
  const double nu = *pc.nu;
  const double rr = pc.r * pc.r;
  const double b1p = 1.0 + beta1;
  const double b1sq = beta1 * beta1;
  const double b2sq = beta2 * beta2;
  const double lb2 = lam_bar * lam_bar;

  const double omega0 = beta0 * t1;
  const double eta0 = beta2 / omega0;
  const double b0 = 1.0 / (beta0 * t1 * (t1 + 1.0));

  const double m1 = (beta1 * lam / 2.0 - 9.0 / 4.0) - 1.0;
  const double m2 = (12.0 + 16.0 / phi1) + (4.0 + 8.0 / phi1) * b1sq * lb2 +
                    1.0 + 2.0 + 3.0 * b1sq * lb2;
  const double m3 = beta1 * lam / 4.0 - 1.0;
  const double m4 = 4.0 + (3.0 * b1sq + 1.0 + beta1) * lam_bar;
  const double m5 =
      beta2 / 4.0 - b2sq * (lam_bar + 1.0 / lam + (4.0 + 8.0 / phi1) * lam);
  const double m6 =
      4.0 * eta0 * Lf2 *
          ((b0 + b0 * beta1 + b0 * b0 + b0 * b0 * beta1) / (2.0 * lam) +
           b0 / 2.0) +
      eta0 * Lf2 * b0 *
          (b1sq +
           2.0 *
               (b1p * b1p / (eta0 * omega0 * omega0) +
                b1p / (2.0 * omega0 * omega0)) /
               lam +
           1.0);
  const double m7 = phi1 / 2.0 + phi1 * phi1 / 2.0;
  const double m8 =
      (beta1 + 2.0) * lam_bar * r0 + 2.0 * r0 + beta1 / 4.0 * lam_bar * r0;
  const double m9 =
      21.0 * b1sq * lb2 * r0 / phi1 + (4.0 + 2.0 * b1p * lam_bar) * r0;
  const double m10 =
      1.5 * b2sq * lam_bar + beta2 / 4.0 + 0.5 + beta1 / 4.0 - 2.0 * beta1 * beta2;
  const double m11 =
      beta2 * Lf2 *
      (2.0 * (2.0 + 2.0 * beta1) / lam + b1sq +
       2.0 * (b1p * b1p / beta2 + b1p / 2.0) / lam + 3.0);
  const double m12 =
      (2.0 * b1p * b1p / (beta2 * beta0 * t1 * lam) +
       b1p / (beta0 * beta0 * t1 * t1 * lam) +
       1.0 / (beta2 * beta0 * t1 * lam * lam) +
       1.0 / (beta0 * beta0 * t1 * t1 * lam * lam) + 1.5) *
          Lf2 +
      Lf +
      4.0 * Lf2 / (beta0 * t1) * ((2.0 + 2.0 * beta1) / lam + 0.5) +
      Lf2 / (beta0 * t1) *
          (b1sq +
           2.0 *
               (b1p * b1p / (beta2 * beta0 * t1) +
                b1p / (2.0 * beta0 * beta0 * t1 * t1)) /
               lam +
           1.0);
  const double m13 = 11.0 + 16.0 / phi1 + 2.0;
  const double m14 = (2.0 + 2.0 * beta1) / lam + 1.0;
  const double m15 =
      beta2 * (6.0 + beta1) * lam_bar * rr + 14.0 * b1sq * b2sq * lb2 * rr +
      2.0 * b2sq / (beta0 * beta0) + 4.0 * b2sq + 1.0 +
      rr * ((2.5 * beta2 + beta1 * beta2) * lam_bar +
            ((b2sq + beta1 * b2sq) * lam_bar / 2.0 +
             0.75 * b1sq * b2sq * lb2 + b2sq / (beta0 * beta0)));
  const double m16 = (b1p / (beta0 * beta0 * t1 * t1 * lam) +
                      1.0 / (beta0 * beta0 * t1 * t1 * lam * lam) + 1.5) *
                         Lf2 +
                     Lf + m11 / (beta2 * beta0 * t1);
  const double m17 = (2.0 + 2.0 * beta1) / (b2sq * lam) + 1.0 / b2sq;
  const double m18 =
      (m11 / pc.n_agents + m12) * pc.sigma_sq + m17 * pc.sigma_bar;

  const double c_bar_4 = m1 * beta2 - m2 * b2sq;
  const double beta8 =
      std::max(0.5 + beta1, (beta1 * lam + 1.0) / (2.0 * beta1 * lam));
  const double m19 =
      std::min({c_bar_4 / eta0, m5 / (2.0 * eta0), m7 / (2.0 * eta0), nu / 4.0}) /
      beta8;

  const double c_bar_0 =
      std::max(m5 > 0.0 ? 2.0 * m10 / m5 : kInf, 16.0 * m11);
  const double c_bar_1 = 9.0 / (2.0 * lam) + 1.0;
  // Root of m9 x^2 + m8 x = m7 / 2, same degenerate cases as the fixed-omega
  // ledger when r0 = 0.
  double quad;
  if (m9 > 0.0) {
    quad = (std::sqrt(m8 * m8 + 2.0 * m7 * m9) - m8) / (2.0 * m9);
  } else if (m8 > 0.0) {
    quad = m7 / (2.0 * m8);
  } else {
    quad = kInf;
  }
  const double c_bar_2 = std::min(
      {m1 / m2, m3 / m4, quad,
       1.0 / (4.0 * (lam_bar + 1.0 / lam + (4.0 + 8.0 / phi1) * lam)),
       1.0 / ((b1p / (32.0 * lam) + 1.0 / (32.0 * lam * lam) + 3.0 / 64.0) * Lf2 +
              32.0 * Lf)});
  const double c_bar_3 =
      std::max({1.0 + 1.25 * Lf2, 4.0 / (3.0 * lam),
                4.0 * Lf * std::sqrt(4.0 * b1p / lam + 2.0 / (lam * lam)),
                4.0 * beta2 * Lf});
  const double c_bar_5 =
      std::max({c_bar_0 / beta0,
                8.0 * Lf / (nu * beta2) * ((2.0 + 2.0 * beta1) / lam + 1.0),
                c_bar_3 / beta0, 2.0});
  const double beta0_lo = ctilde * nu * beta2 / 4.0;
  const double beta0_hi = nu * beta2 / 4.0;

  ConstantLedger ledger;
  push(ledger, "phi1", phi1);
  push(ledger, "r0", r0);
  push(ledger, "nu", nu);
  push(ledger, "omega_0", omega0);
  push(ledger, "eta_0", eta0);
  push(ledger, "b_0", b0);
  push(ledger, "m_1", m1);
  push(ledger, "m_2", m2);
  push(ledger, "m_3", m3);
  push(ledger, "m_4", m4);
  push(ledger, "m_5", m5);
  push(ledger, "m_6", m6);
  push(ledger, "m_7", m7);
  push(ledger, "m_8", m8);
  push(ledger, "m_9", m9);
  push(ledger, "m_10", m10);
  push(ledger, "m_11", m11);
  push(ledger, "m_12", m12);
  push(ledger, "m_13", m13);
  push(ledger, "m_14", m14);
  push(ledger, "m_15", m15);
  push(ledger, "m_16", m16);
  push(ledger, "m_17", m17);
  push(ledger, "m_18", m18);
  push(ledger, "m_19", m19);
  push(ledger, "c_bar_0", c_bar_0);
  push(ledger, "c_bar_1", c_bar_1);
  push(ledger, "c_bar_2", c_bar_2);
  push(ledger, "c_bar_3", c_bar_3);
  push(ledger, "c_bar_4", c_bar_4);
  push(ledger, "c_bar_5", c_bar_5);
  push(ledger, "beta_8", beta8);
  push(ledger, "beta_0_lo", beta0_lo);
  push(ledger, "beta_0_hi", beta0_hi);

  check(ledger, "beta_1 > c_bar_1", beta1 > c_bar_1);
  check(ledger, "beta_2 < c_bar_2", beta2 < c_bar_2);
  check(ledger, "t_1 > c_bar_5", t1 > c_bar_5);
  check(ledger, "beta_0 >= beta_0_lo", beta0 >= beta0_lo);
  check(ledger, "beta_0 < beta_0_hi", beta0 < beta0_hi);
  if (h0) {
    check(ledger, "h_0 in (0, 1/t_1)", *h0 > 0.0 && *h0 < 1.0 / t1);
  }
  check(ledger, "alpha_x * r < 1", pc.effective_alpha_r() < 1.0);
  ledger.feasible = ledger.violated.empty();
  return ledger;
}

namespace {

// Shared failure bookkeeping: remember how often each condition blocked an
// attempt so the error message can name the one that actually binds.
class ViolationTally {
 public:
  void add(const ConstantLedger& ledger) {
    ++attempts_;
    for (const auto& v : ledger.violated) ++counts_[v];
  }

  // For conditions detected before a full candidate is even assembled.
  void count(const std::string& condition) { ++counts_[condition]; }

  [[noreturn]] void fail(const std::string& fallback) const {
    std::string binding = fallback;
    int best = -1;
    for (const auto& [name, count] : counts_) {
      if (count > best) {
        best = count;
        binding = name;
      }
    }
    throw std::runtime_error(
        "suggest_params: no feasible parameters within search budget "
        "(binding condition: " +
        binding + ")");
  }

  [[noreturn]] static void fail_immediately(const std::string& condition) {
    throw std::runtime_error(
        "suggest_params: no feasible parameters within search budget "
        "(binding condition: " +
        condition + ")");
  }

 private:
  std::map<std::string, int> counts_;
  int attempts_ = 0;
};

ScheduleParams base_params(const ProblemConstants& pc) {
  ScheduleParams p;
  p.alpha_x = pc.effective_alpha_r() / pc.r;
  p.r = pc.r;
  return p;
}

ScheduleParams suggest_fixed_omega(const ProblemConstants& pc,
                                   ScheduleRegime regime, int n, long long T) {
  const double beta5 = 1.0;
  const double c0 = std::max((9.0 + beta5) / (2.0 * pc.lambda_min_pos), 1.0);
  if (!std::isfinite(c0) || c0 > kSearchCap) {
    ViolationTally::fail_immediately("beta_1 > c_0");
  }
  const double beta1 = 1.05 * c0 + 0.05;

  ViolationTally tally;
  for (int i = 0; i <= 40; ++i) {
    const double beta2 = std::ldexp(1.0, -i);
    if (regime == ScheduleRegime::theorem1) {
      for (int j = 0; j <= 60; ++j) {
        const double omega = std::ldexp(1.0, j);
        const double eta = beta2 / omega;
        auto ledger = ledger_theorem1(pc, beta1, beta2, beta5, omega, eta);
        if (ledger.feasible) {
          ScheduleParams p = base_params(pc);
          p.beta1 = beta1;
          p.beta2 = beta2;
          p.omega = omega;
          p.h0 = 0.5;
          return p;
        }
        tally.add(ledger);
      }
    } else if (regime == ScheduleRegime::theorem1_speedup) {
      const double omega = beta2 * std::sqrt(double(T)) / std::sqrt(double(n));
      if (!(omega > 0.0)) continue;
      const double eta = beta2 / omega;
      auto ledger = ledger_theorem1(pc, beta1, beta2, beta5, omega, eta);
      if (ledger.feasible) {
        ScheduleParams p = base_params(pc);
        p.beta1 = beta1;
        p.beta2 = beta2;
        p.T = T;
        p.n = n;
        p.h0 = 0.5;
        return p;
      }
      tally.add(ledger);
    } else {  // theorem2
      const double theta = 0.5;
      const double beta2_2 = beta2 / 2.0;  // keeps beta2 strictly below 1
      const double omega = beta2_2 * std::pow(double(T) + 1.0, theta);
      const double eta = beta2_2 / omega;
      auto ledger = ledger_theorem1(pc, beta1, beta2_2, beta5, omega, eta);
      if (ledger.feasible) {
        ScheduleParams p = base_params(pc);
        p.beta1 = beta1;
        p.beta2 = beta2_2;
        p.theta = theta;
        p.T = T;
        p.h0 = 0.25;
        return p;
      }
      tally.add(ledger);
    }
  }
  tally.fail("eta < beta_4");
}

ScheduleParams suggest_growing_omega(const ProblemConstants& pc) {
  if (!pc.nu) {
    throw std::invalid_argument("suggest_params requires the PL constant nu");
  }
  const double nu = *pc.nu;
  const double ctilde = 0.5;
  const double c_bar_1 = 9.0 / (2.0 * pc.lambda_min_pos) + 1.0;
  if (!std::isfinite(c_bar_1) || c_bar_1 > kSearchCap) {
    ViolationTally::fail_immediately("beta_1 > c_bar_1");
  }
  ViolationTally tally;
  // beta1 only has the lower bound c_bar_1, but sitting right on it can leave
  // m_1 (and with it c_bar_2) negative, so scan upward on a doubling grid.
  for (double beta1 = 1.05 * c_bar_1 + 0.05; beta1 <= kSearchCap;
       beta1 *= 2.0) {
    // c_bar_2 depends only on the problem constants and beta1, so one probe
    // evaluation pins it before beta2 is chosen.
    auto probe = ledger_theorem3(pc, nu * 0.1 / 8.0, beta1, 0.1, 10.0, ctilde);
    const double c_bar_2 = probe.at("c_bar_2");
    if (!(c_bar_2 > 0.0)) {
      tally.count("beta_2 < c_bar_2");
      continue;
    }
    const double beta2 = 0.95 * std::min(c_bar_2, 1.0);
    const double beta0 = 0.6 * nu * beta2 / 4.0;

    // c_bar_5 does not depend on t1, so a second probe pins it as well.
    auto probe2 = ledger_theorem3(pc, beta0, beta1, beta2, 10.0, ctilde);
    const double c_bar_5 = probe2.at("c_bar_5");
    if (!std::isfinite(c_bar_5) || c_bar_5 > kT1Cap) {
      tally.count("t_1 > c_bar_5");
      continue;
    }
    const double t1 = std::ceil(1.05 * std::max(c_bar_5, 2.0)) + 1.0;
    const double h0 = 0.5 / t1;

    auto ledger = ledger_theorem3(pc, beta0, beta1, beta2, t1, ctilde, h0);
    if (!ledger.feasible) {
      tally.add(ledger);
      continue;
    }
    ScheduleParams p = base_params(pc);
    p.beta0 = beta0;
    p.beta1 = beta1;
    p.beta2 = beta2;
    p.t1 = t1;
    p.h0 = h0;
    p.ctilde = ctilde;
    p.nu = nu;
    return p;
  }
  tally.fail("beta_1 > c_bar_1");
}

}  // namespace

ScheduleParams suggest_params(const ProblemConstants& pc, ScheduleRegime regime,
                              int n, long long T) {
  pc.validate();
  switch (regime) {
    case ScheduleRegime::theorem1:
      return suggest_fixed_omega(pc, regime, n, T);
    case ScheduleRegime::theorem1_speedup:
    case ScheduleRegime::theorem2:
      if (n < 1) throw std::invalid_argument("suggest_params requires n >= 1");
      if (T < 1) throw std::invalid_argument("suggest_params requires T >= 1");
      return suggest_fixed_omega(pc, regime, n, T);
    case ScheduleRegime::theorem3:
      return suggest_growing_omega(pc);
    default:
      throw std::invalid_argument(
          "suggest_params only covers the theorem regimes");
  }
}

}  // namespace rcp
