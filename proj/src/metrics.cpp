#include "rcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcp {

double consensus_error(const std::vector<Eigen::VectorXd>& xs) {
  if (xs.empty()) throw std::invalid_argument("no agent states");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(xs[0].size());
  for (const auto& x : xs) mean += x;
  mean /= double(xs.size());
  double s = 0.0;
  for (const auto& x : xs) s += (x - mean).squaredNorm();
  return s / double(xs.size());
}

double residual_update(double prev, double consensus_err, double grad_norm_sq) {
  return std::min(prev, consensus_err + grad_norm_sq);
}

double loglog_slope(const std::vector<std::pair<double, double>>& series,
                    double k_lo, double k_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [k, v] : series) {
    if (k < k_lo || k > k_hi) continue;
    if (!(v > 0.0))
      throw std::invalid_argument(
          "loglog_slope: nonpositive value inside the fit window");
    if (!(k > 0.0))
      throw std::invalid_argument("loglog_slope: step must be positive");
    pts.emplace_back(std::log(k), std::log(v));
  }
  if (pts.size() < 10)
    throw std::invalid_argument("loglog_slope: fewer than 10 points in window");

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("loglog_slope: degenerate window");
  return sxy / sxx;
}

}  // namespace rcp
