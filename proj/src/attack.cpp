#include "rcp/attack.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rcp {

namespace {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

Eigen::VectorXd matched_gradient(const Eigen::VectorXd& x, double u,
                                 const Eigen::VectorXd& z_hat) {
  const double s = sigmoid(-u * x.dot(z_hat));
  return -u * s * z_hat;
}

}  // namespace

Eigen::VectorXd logistic_sample_gradient(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& z, double u) {
  return matched_gradient(x, u, z);
}

Observation observe_single(const Eigen::VectorXd& z, double u,
                           const Eigen::VectorXd& x, double noise_std,
                           const CompressorSpec* compressor, RandomStream& rng) {
  if (noise_std < 0.0) {
    throw std::invalid_argument("observe_single: noise_std must be nonnegative");
  }
  Eigen::VectorXd g = logistic_sample_gradient(x, z, u);
  if (noise_std > 0.0) {
    for (int i = 0; i < g.size(); ++i) g[i] += noise_std * rng.normal();
  }
  Observation obs;
  if (compressor != nullptr) {
    CompressedMessage msg = compress(*compressor, g, rng);
    obs.value = std::move(msg.payload);
    obs.suppressed = msg.suppressed;
  } else {
    obs.value = std::move(g);
  }
  return obs;
}

Observation observe_gradient(const LogisticNonconvexProblem& problem, int agent,
                             const Eigen::VectorXd& x, double noise_std,
                             const CompressorSpec* compressor, RandomStream& rng) {
  if (agent < 0 || agent >= problem.agents()) {
    throw std::invalid_argument("observe_gradient: agent out of range");
  }
  const auto& shard = problem.samples_of(agent);
  if (shard.empty()) {
    throw std::invalid_argument("observe_gradient: agent has no samples");
  }
  if (noise_std < 0.0) {
    throw std::invalid_argument(
        "observe_gradient: noise_std must be nonnegative");
  }
  const int sample = shard.front();
  Eigen::VectorXd g =
      problem.sample_gradient(sample, x) + problem.regularizer_gradient(x);
  if (noise_std > 0.0) {
    for (int i = 0; i < g.size(); ++i) g[i] += noise_std * rng.normal();
  }
  Observation obs;
  if (compressor != nullptr) {
    CompressedMessage msg = compress(*compressor, g, rng);
    obs.value = std::move(msg.payload);
    obs.suppressed = msg.suppressed;
  } else {
    obs.value = std::move(g);
  }
  return obs;
}

double matching_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& observed,
                     double u, const Eigen::VectorXd& z_hat) {
  return (matched_gradient(x, u, z_hat) - observed).squaredNorm();
}

AttackResult dlg_attack(const Eigen::VectorXd& x, const Eigen::VectorXd& observed,
                        double u, int iters, double step, RandomStream& rng,
                        const Eigen::VectorXd* true_z) {
  if (observed.size() != x.size()) {
    throw std::invalid_argument("dlg_attack: observed and x dims differ");
  }
  if (u != 1.0 && u != -1.0) {
    throw std::invalid_argument("dlg_attack: label u must be +1 or -1");
  }
  if (iters < 1) throw std::invalid_argument("dlg_attack: iters must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("dlg_attack: step must be > 0");
  if (true_z != nullptr && true_z->size() != x.size()) {
    throw std::invalid_argument("dlg_attack: true_z dim differs");
  }

  const int d = static_cast<int>(x.size());
  Eigen::VectorXd z_hat(d);
  for (int i = 0; i < d; ++i) z_hat[i] = 0.1 * rng.normal();

  AttackResult result;
  Eigen::VectorXd best = z_hat;
  double cur_loss = matching_loss(x, observed, u, z_hat);
  double best_loss = cur_loss;
  double lr = step;

  for (int k = 0; k < iters; ++k) {
    const double s = sigmoid(-u * x.dot(z_hat));
    const Eigen::VectorXd rho = -u * s * z_hat - observed;
    const Eigen::VectorXd grad =
        2.0 * (s * (1.0 - s) * z_hat.dot(rho) * x - u * s * rho);
    if (!grad.allFinite()) {
      result.failed = true;
      break;
    }
    const Eigen::VectorXd candidate = z_hat - lr * grad;
    const double cand_loss = matching_loss(x, observed, u, candidate);
    if (!std::isfinite(cand_loss)) {
      result.failed = true;
      break;
    }
    if (cand_loss <= cur_loss) {
      z_hat = candidate;
      cur_loss = cand_loss;
      lr *= 1.1;
      if (cand_loss < best_loss) {
        best = candidate;
        best_loss = cand_loss;
      }
    } else {
      lr *= 0.5;
    }
    result.loss_curve.push_back(best_loss);
    if (true_z != nullptr) {
      result.error_curve.push_back((best - *true_z).squaredNorm());
    }
  }

  result.z_hat = best;
  result.matched_loss = best_loss;
  return result;
}

std::string attack_csv(const AttackResult& result) {
  std::ostringstream out;
  out << "iteration,error,matched_loss\n";
  char buf[64];
  for (std::size_t k = 0; k < result.loss_curve.size(); ++k) {
    out << k << ",";
    if (k < result.error_curve.size()) {
      std::snprintf(buf, sizeof(buf), "%.9g", result.error_curve[k]);
      out << buf;
    }
    out << ",";
    std::snprintf(buf, sizeof(buf), "%.9g", result.loss_curve[k]);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace rcp
