#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcp/algorithms.hpp"

namespace rcp {

// Problem-level scalars feeding the feasibility ledgers. phi1 folds the
// mixing weight, the descaling factor, and the contraction factor into one
// number (phi1 = alpha_x * r * phi).
struct ProblemConstants {
  double L_f = 1.0;             // smoothness bound shared by all local losses
  double lambda_min_pos = 0.0;  // smallest positive Laplacian eigenvalue
  double lambda_max = 0.0;      // largest Laplacian eigenvalue
  double phi1 = 0.0;            // alpha_x * r * phi, must land in (0, 1]
  double r0 = 0.0;              // 2 r^2 (1 - phi) + 2 (1 - r)^2
  double sigma_sq = 0.0;        // gradient noise bound sigma^2
  std::optional<double> nu;     // PL constant when known
  double r = 1.0;               // compressor descaling factor
  // alpha_x * r, bounding the mixing step. 0 falls back to phi1, which is the
  // exact product whenever the contraction factor phi equals 1.
  double alpha_r = 0.0;
  double sigma_bar = 0.0;  // optimum heterogeneity, 2 L_f (f* - mean_i f_i*)
  int n_agents = 1;        // only enters the reported rate constants

  void validate() const;
  double effective_alpha_r() const { return alpha_r > 0.0 ? alpha_r : phi1; }
};

struct LedgerEntry {
  std::string symbol;
  double value = 0.0;
};

// Every side-condition constant evaluated at one parameter point, in
// definition order, plus the named inequalities that failed there.
struct ConstantLedger {
  std::vector<LedgerEntry> entries;
  std::vector<std::string> violated;
  bool feasible = false;  // always equals violated.empty()

  bool has(const std::string& symbol) const;
  double at(const std::string& symbol) const;  // throws on unknown symbol
  std::string report() const;                  // two-column block plus verdict
};

// Fixed-omega ledger. Conditions checked: beta_1 > c_0, omega > beta_3,
// eta < beta_4, epsilon_tilde_1 > 0, epsilon_4 > 0, epsilon_6 > 0,
// epsilon_10_margin > 0, alpha_x * r < 1.
ConstantLedger ledger_theorem1(const ProblemConstants& pc, double beta1,
                               double beta2, double beta5, double omega,
                               double eta);

// Growing-omega ledger (omega_k = beta0 (k + t1)); step-dependent symbols are
// evaluated at step 0. Conditions checked: beta_1 > c_bar_1,
// beta_2 < c_bar_2, t_1 > c_bar_5, beta_0 >= beta_0_lo, beta_0 < beta_0_hi,
// h_0 in (0, 1/t_1) when supplied, alpha_x * r < 1.
ConstantLedger ledger_theorem3(const ProblemConstants& pc, double beta0,
                               double beta1, double beta2, double t1,
                               double ctilde,
                               std::optional<double> h0 = std::nullopt);

// Coordinate search over the matching ledger's feasible region, walking
// outward from the stated lower bounds. Returns parameters the ledger
// accepts; throws std::runtime_error naming the binding condition when the
// search budget runs out.
ScheduleParams suggest_params(const ProblemConstants& pc, ScheduleRegime regime,
                              int n, long long T);

}  // namespace rcp
