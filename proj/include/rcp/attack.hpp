#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rcp/compress.hpp"
#include "rcp/problems.hpp"
#include "rcp/rng.hpp"

namespace rcp {

// Gradient of the logistic term log(1 + exp(-u x.z)) with respect to x,
// which is what a single training sample contributes to the shared update.
Eigen::VectorXd logistic_sample_gradient(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& z, double u);

struct Observation {
  Eigen::VectorXd value;
  bool suppressed = false;  // privacy wrapper fired; value is all zeros
};

// What the wire carries for one sample's logistic gradient: the exact
// gradient, plus Gaussian noise when noise_std > 0, pushed through the
// compressor when one is supplied.
Observation observe_single(const Eigen::VectorXd& z, double u,
                           const Eigen::VectorXd& x, double noise_std,
                           const CompressorSpec* compressor, RandomStream& rng);

// Same, for the victim agent's first shard sample, including the regularizer
// term a full local gradient carries. The regularizer does not depend on the
// sample, so attackers subtract it before matching.
Observation observe_gradient(const LogisticNonconvexProblem& problem, int agent,
                             const Eigen::VectorXd& x, double noise_std,
                             const CompressorSpec* compressor, RandomStream& rng);

// Matching objective || -u sigmoid(-u x.z_hat) z_hat - observed ||^2.
double matching_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& observed,
                     double u, const Eigen::VectorXd& z_hat);

struct AttackResult {
  Eigen::VectorXd z_hat;            // best iterate found
  std::vector<double> error_curve;  // ||z_hat_k - z||^2, needs true_z
  std::vector<double> loss_curve;   // best matching loss so far, nonincreasing
  double matched_loss = 0.0;
  bool failed = false;  // non-finite intermediate, curves truncated there
};

// Gradient-matching inversion: descend on z_hat to minimize matching_loss,
// fixed step with halving on increase. observed must already exclude any
// z-independent terms. When true_z is given the per-iteration recovery error
// is recorded alongside the loss.
AttackResult dlg_attack(const Eigen::VectorXd& x, const Eigen::VectorXd& observed,
                        double u, int iters, double step, RandomStream& rng,
                        const Eigen::VectorXd* true_z = nullptr);

// One row per iteration: iteration, error (empty without true_z), matched_loss.
std::string attack_csv(const AttackResult& result);

}  // namespace rcp
