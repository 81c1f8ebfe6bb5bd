#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcp/compress.hpp"
#include "rcp/metrics.hpp"
#include "rcp/problems.hpp"
#include "rcp/rng.hpp"
#include "rcp/topology.hpp"

namespace rcp {

enum class ScheduleRegime {
  theorem1,          // constant omega, gamma = beta1*omega, eta = beta2/omega
  theorem1_speedup,  // theorem1 with omega = beta2*sqrt(T)/sqrt(n)
  theorem2,          // omega = beta2*(T+1)^theta
  theorem3,          // omega_k = beta0*(k+t1), fully diminishing step
  table1,            // constant gamma/omega, eta_k = eta0/max(k,1)^p
  custom,
};

ScheduleRegime regime_from_name(const std::string& name);
std::string regime_name(ScheduleRegime regime);

struct ScheduleParams {
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0;
  double theta = 0.5;
  double t1 = 0.0;
  double h0 = 0.0;          // 0 lets the regime pick its default
  double alpha_x = 0.0;     // 0 lets table1 fall back to 0.8
  double omega = 0.0;       // theorem1 base value
  double eta0 = 0.0, eta_exponent = 0.0, gamma = 0.0;  // table1 / custom
  double ctilde = 0.5;      // theorem3 lower-interval factor
  double nu = 0.0;          // PL constant, theorem3 only
  long long T = 0;          // horizon, speedup / theorem2 only
  int n = 0;                // agent count, speedup only
  double r = 1.0;           // compressor descale, bounds alpha_x
};

// Step-size/coupling schedule. make() validates the regime's parameter
// ranges and throws std::invalid_argument naming the violated condition.
class Schedule {
 public:
  static Schedule make(ScheduleRegime regime, const ScheduleParams& p);

  double eta(long long k) const;
  double gamma(long long k) const;
  double omega(long long k) const;
  // h_k = h0^k, floored at 1e-300 so the difference rescale never divides
  // by an exact zero. table1 with no explicit h0 uses the harmonic
  // sequence h_k = 1/max(k,1) instead.
  double h(long long k) const;
  double alpha_x() const { return alpha_x_; }
  ScheduleRegime regime() const { return regime_; }
  const ScheduleParams& params() const { return p_; }
  bool alpha_x_defaulted() const { return alpha_x_defaulted_; }
  bool h0_defaulted() const { return h0_defaulted_; }

 private:
  Schedule() = default;
  ScheduleRegime regime_ = ScheduleRegime::custom;
  ScheduleParams p_;
  double omega_base_ = 0.0;
  double alpha_x_ = 0.0;
  bool alpha_x_defaulted_ = false;
  bool h0_defaulted_ = false;
};

struct AgentState {
  Eigen::VectorXd x;    // primal iterate
  Eigen::VectorXd v;    // dual accumulator, starts at 0
  Eigen::VectorXd x_c;  // compression reference everyone agrees on, starts at 0
};

struct NetworkState {
  std::vector<AgentState> agents;
  long long step = 0;
  std::uint64_t bits_cum = 0;
  std::uint64_t master_seed = 0;
  bool replica_check = false;
  // replica_xc[i][j]: agent i's copy of neighbor j's reference point.
  // Maintained only under replica_check to emulate per-receiver decoding.
  std::vector<std::map<int, Eigen::VectorXd>> replica_xc;
};

NetworkState init_network(const Graph& graph, int dim, std::uint64_t master_seed,
                          double init_scale, bool replica_check = false);

// Largest elementwise deviation between any receiver-side replica and the
// sender's own reference point. Zero when broadcast decoding is consistent.
double max_replica_deviation(const NetworkState& net);

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(long long at)
      : std::runtime_error("iterate diverged at step " + std::to_string(at)),
        step(at) {}
  long long step;
};

// One synchronous round of the compressed primal-dual update:
//   xhat_j = x_c,j + h_k C((x_j - x_c,j)/h_k)           (broadcast)
//   x_i   -= eta_k (gamma_k sum_j L_ij xhat_j + omega_k v_i + g_i)
//   v_i   += eta_k omega_k sum_j L_ij xhat_j
//   x_c,i  = (1-alpha_x) x_c,i + alpha_x xhat_i
// All messages of the round are formed from step-k state before anyone
// moves. Gradients are drawn from per-(agent, step) streams.
void rcp_step(NetworkState& net, const Graph& graph, const Problem& problem,
              const Schedule& schedule, const CompressorSpec& compressor,
              int batch);

// Uncompressed gossip baseline x <- Wx - eta*g with W = I - L/(2*lambda_max).
void dsgd_step(NetworkState& net, const Graph& graph, const Problem& problem,
               double eta, int batch);

// Compressed-difference gossip baseline. Replicated reference points live in
// x_c; gamma_consensus weighs the gossip correction.
void choco_step(NetworkState& net, const Graph& graph, const Problem& problem,
                double eta, double gamma_consensus,
                const CompressorSpec& compressor, int batch);

enum class Algorithm { rcp_sgd, dsgd, choco_sgd };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm a);

struct RunSpec {
  const Graph* graph = nullptr;
  const Problem* problem = nullptr;
  Algorithm algorithm = Algorithm::rcp_sgd;
  Schedule schedule = Schedule::make(ScheduleRegime::custom, [] {
    ScheduleParams p;
    p.gamma = 1.0;
    p.omega = 1.0;
    p.eta0 = 0.1;
    p.h0 = 0.9;
    p.alpha_x = 0.5;
    return p;
  }());
  CompressorSpec compressor;
  double eta = 0.1;               // dsgd / choco step size
  double gamma_consensus = 0.2;   // choco gossip weight
  long long T = 0;
  int metrics_every = 10;
  int batch = 0;
  double init_scale = 0.5;
  bool replica_check = false;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  bool diverged = false;
  long long diverged_at = -1;
  double max_replica_dev = 0.0;
};

// Runs T steps, recording metrics at step 0, every metrics_every steps, and
// at the final step. Divergence truncates the trace instead of propagating.
RunResult run_single(const RunSpec& spec, std::uint64_t seed);

}  // namespace rcp
