#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace rcp {

struct TraceRecord {
  long long step = 0;
  double consensus_err = 0.0;
  double grad_norm_sq = 0.0;           // ||grad f(x_bar)||^2, exact gradient
  std::optional<double> opt_gap;       // f(x_bar) - f*, absent when f* unknown
  double residual = 0.0;               // running min of consensus + grad
  std::uint64_t bits_cum = 0;
  double wall_ms = 0.0;                // elapsed wall clock, not deterministic
};

// (1/n) sum_i ||x_i - x_bar||^2
double consensus_error(const std::vector<Eigen::VectorXd>& xs);

// Prefix minimum of consensus error + squared gradient norm.
double residual_update(double prev, double consensus_err, double grad_norm_sq);

// Least-squares slope of log(value) against log(step) over steps in
// [k_lo, k_hi]. Throws if fewer than 10 points fall in the window or if any
// value there is not strictly positive.
double loglog_slope(const std::vector<std::pair<double, double>>& series,
                    double k_lo, double k_hi);

}  // namespace rcp
