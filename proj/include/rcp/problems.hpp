#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcp/rng.hpp"

namespace rcp {

struct Dataset {
  Eigen::MatrixXd features;  // one row per sample
  std::vector<int> labels;   // +1 / -1
  int dim() const { return static_cast<int>(features.cols()); }
  int size() const { return static_cast<int>(features.rows()); }
};

// CSV loader. label_column indexes the raw columns; labels must be in
// {-1,+1} or {0,1} (the latter are mapped to -1/+1). When normalize is set,
// every feature column is min-max scaled to [0,1]; constant columns become 0.
Dataset load_csv_dataset(const std::string& path, int label_column = 0,
                         bool normalize = true, bool has_header = true);

enum class PartitionStrategy { round_robin, contiguous };

// Disjoint cover of 0..sample_count-1 over n_agents, sizes differing by at
// most one. The seed shuffles sample order first, so the same seed always
// yields the same partition.
std::vector<std::vector<int>> partition(int sample_count, int n_agents,
                                        PartitionStrategy strategy,
                                        std::uint64_t seed);

struct GradientSample {
  int agent = 0;
  Eigen::VectorXd value;
  std::vector<int> batch_indices;  // empty for full-batch / synthetic noise
};

// Common oracle surface the optimizers run against.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual int dim() const = 0;
  virtual int agents() const = 0;
  virtual double local_loss(int agent, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd local_gradient_full(int agent,
                                              const Eigen::VectorXd& x) const = 0;
  // batch == 0 means full batch (deterministic).
  virtual GradientSample local_gradient(int agent, const Eigen::VectorXd& x,
                                        int batch, RandomStream& rng) const = 0;
  virtual double smoothness() const = 0;  // gradient Lipschitz bound
  virtual std::optional<double> f_star() const { return std::nullopt; }
  virtual std::optional<double> pl_constant() const { return std::nullopt; }

  double loss(const Eigen::VectorXd& x) const;              // f = avg local
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;  // exact grad of f
};

// f_i(x) = (1/m_i) sum_j log(1 + exp(-u_ij x.z_ij))
//          + sum_s lambda * alpha * x_s^2 / (1 + alpha * x_s^2)
// The second term is a bounded nonconvex regularizer applied in full
// regardless of the minibatch.
class LogisticNonconvexProblem : public Problem {
 public:
  LogisticNonconvexProblem(Dataset data,
                           std::vector<std::vector<int>> agent_samples,
                           double lambda = 1e-3, double alpha = 1.0);

  int dim() const override { return data_.dim(); }
  int agents() const override { return static_cast<int>(agent_samples_.size()); }
  double local_loss(int agent, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd local_gradient_full(int agent,
                                      const Eigen::VectorXd& x) const override;
  GradientSample local_gradient(int agent, const Eigen::VectorXd& x, int batch,
                                RandomStream& rng) const override;
  // 0.25 * max ||z||^2 + curvature bound of the regularizer
  double smoothness() const override;
  std::optional<double> f_star() const override { return f_star_; }
  void set_f_star(double v) { f_star_ = v; }

  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  const Dataset& data() const { return data_; }
  const std::vector<int>& samples_of(int agent) const {
    return agent_samples_[agent];
  }

  Eigen::VectorXd sample_gradient(int sample, const Eigen::VectorXd& x) const;
  Eigen::VectorXd regularizer_gradient(const Eigen::VectorXd& x) const;

 private:
  Dataset data_;
  std::vector<std::vector<int>> agent_samples_;
  double lambda_;
  double alpha_;
  std::optional<double> f_star_;
};

// f_i(x) = 0.5 x'A_i x - b_i'x with A_i symmetric PSD. The average objective
// satisfies the Polyak-Lojasiewicz inequality with nu = smallest positive
// eigenvalue of Q = avg A_i; b_i is constructed inside range(A_i) so the
// minimum is attained. Stochastic gradients add white noise scaled by
// noise_std / sqrt(batch).
class PLQuadraticProblem : public Problem {
 public:
  PLQuadraticProblem(std::vector<Eigen::MatrixXd> A,
                     std::vector<Eigen::VectorXd> b, double noise_std = 0.0);

  int dim() const override { return static_cast<int>(A_[0].rows()); }
  int agents() const override { return static_cast<int>(A_.size()); }
  double local_loss(int agent, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd local_gradient_full(int agent,
                                      const Eigen::VectorXd& x) const override;
  GradientSample local_gradient(int agent, const Eigen::VectorXd& x, int batch,
                                RandomStream& rng) const override;
  double smoothness() const override { return L_f_; }
  std::optional<double> f_star() const override { return f_star_; }
  std::optional<double> pl_constant() const override { return nu_; }

  double noise_std() const { return noise_std_; }
  // E||g_tilde - grad||^2 for a given batch size
  double sigma_sq(int batch) const {
    return batch <= 0 ? 0.0 : dim() * noise_std_ * noise_std_ / batch;
  }
  // 2 L_f (f* - avg_i f_i*), the heterogeneity constant
  double sigma_bar() const { return sigma_bar_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  Eigen::VectorXd minimizer() const { return x_star_; }

 private:
  std::vector<Eigen::MatrixXd> A_;
  std::vector<Eigen::VectorXd> b_;
  double noise_std_;
  Eigen::MatrixXd Q_;
  Eigen::VectorXd p_, x_star_;
  double f_star_ = 0.0, nu_ = 0.0, L_f_ = 0.0, sigma_bar_ = 0.0;
};

// Random PL-quadratic generator. All agents share an eigenbasis; per-agent
// spectra are nonnegative rescalings that average to the global spectrum,
// which spans [scale, scale*condition] on d - rank_deficit modes. hetero in
// [0,1] controls how far agents stray from the average (0 = identical).
PLQuadraticProblem make_pl_quadratic(int n, int d, int rank_deficit,
                                     double condition, std::uint64_t seed,
                                     double noise_std = 0.0,
                                     double hetero = 0.3, double scale = 1.0);

// Max over sampled points and agents of the empirical minibatch-gradient
// variance E||g_tilde - grad f_i||^2. draws stochastic gradients per point.
double estimate_sigma(const Problem& problem, int points, int batch,
                      int draws, RandomStream& rng);

// Long centralized full-gradient descent to pin down f*. Diminishing step,
// meant to run once and be cached next to the dataset.
double compute_reference_minimum(const Problem& problem, long long steps = 1000000);

// f* cache helpers, keyed by (dataset file hash, lambda, alpha).
std::uint64_t fnv1a_file(const std::string& path);
std::optional<double> load_f_star_cache(const std::string& cache_path,
                                        std::uint64_t dataset_hash,
                                        double lambda, double alpha);
void save_f_star_cache(const std::string& cache_path, std::uint64_t dataset_hash,
                       double lambda, double alpha, double f_star,
                       long long steps);

}  // namespace rcp
