#include "rcp/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace rcp {

namespace {

constexpr double kDivergenceLimit = 1e12;
constexpr double kHFloor = 1e-300;

void require(bool ok, const std::string& condition) {
  if (!ok) throw std::invalid_argument("schedule: " + condition);
}

void check_finite(const NetworkState& net) {
  for (const auto& a : net.agents) {
    for (int j = 0; j < a.x.size(); ++j) {
      const double xv = a.x(j), vv = a.v(j);
      if (!std::isfinite(xv) || std::abs(xv) > kDivergenceLimit ||
          !std::isfinite(vv) || std::abs(vv) > kDivergenceLimit)
        throw DivergenceError(net.step);
    }
  }
}

// sum_j L_ij y_j for all i, assembled edge by edge
std::vector<Eigen::VectorXd> laplacian_apply(const Graph& g,
                                             const std::vector<Eigen::VectorXd>& y) {
  std::vector<Eigen::VectorXd> out(y.size(),
                                   Eigen::VectorXd::Zero(y[0].size()));
  for (const auto& [key, w] : g.edges()) {
    const auto [i, j] = key;
    const Eigen::VectorXd diff = w * (y[i] - y[j]);
    out[i] += diff;
    out[j] -= diff;
  }
  return out;
}

}  // namespace

ScheduleRegime regime_from_name(const std::string& name) {
  if (name == "theorem1") return ScheduleRegime::theorem1;
  if (name == "theorem1_speedup") return ScheduleRegime::theorem1_speedup;
  if (name == "theorem2") return ScheduleRegime::theorem2;
  if (name == "theorem3") return ScheduleRegime::theorem3;
  if (name == "table1") return ScheduleRegime::table1;
  if (name == "custom") return ScheduleRegime::custom;
  throw std::invalid_argument("unknown schedule regime: " + name);
}

std::string regime_name(ScheduleRegime regime) {
  switch (regime) {
    case ScheduleRegime::theorem1: return "theorem1";
    case ScheduleRegime::theorem1_speedup: return "theorem1_speedup";
    case ScheduleRegime::theorem2: return "theorem2";
    case ScheduleRegime::theorem3: return "theorem3";
    case ScheduleRegime::table1: return "table1";
    case ScheduleRegime::custom: return "custom";
  }
  throw std::logic_error("unhandled regime");
}

Schedule Schedule::make(ScheduleRegime regime, const ScheduleParams& p) {
  Schedule s;
  s.regime_ = regime;
  s.p_ = p;
  s.alpha_x_ = p.alpha_x;

  const auto check_alpha = [&](const char* who) {
    require(s.alpha_x_ > 0.0 && s.alpha_x_ * p.r < 1.0,
            std::string(who) + " requires alpha_x in (0, 1/r)");
  };

  switch (regime) {
    case ScheduleRegime::theorem1:
      require(p.beta1 > 0.0 && p.beta2 > 0.0,
              "theorem1 requires beta1 > 0 and beta2 > 0");
      require(p.omega > 0.0, "theorem1 requires omega > 0");
      require(p.h0 > 0.0 && p.h0 < 1.0, "theorem1 requires h0 in (0,1)");
      s.omega_base_ = p.omega;
      check_alpha("theorem1");
      break;
    case ScheduleRegime::theorem1_speedup:
      require(p.beta1 > 0.0 && p.beta2 > 0.0,
              "theorem1_speedup requires beta1 > 0 and beta2 > 0");
      require(p.T >= 1 && p.n >= 1,
              "theorem1_speedup requires T >= 1 and n >= 1");
      require(p.h0 > 0.0 && p.h0 < 1.0, "theorem1_speedup requires h0 in (0,1)");
      s.omega_base_ = p.beta2 * std::sqrt(double(p.T)) / std::sqrt(double(p.n));
      check_alpha("theorem1_speedup");
      break;
    case ScheduleRegime::theorem2:
      require(p.beta1 > 0.0, "theorem2 requires beta1 > 0");
      require(p.beta2 > 0.0 && p.beta2 < 1.0, "theorem2 requires beta2 in (0,1)");
      require(p.theta > 0.0 && p.theta < 1.0, "theorem2 requires theta in (0,1)");
      require(p.T >= 1, "theorem2 requires T >= 1");
      require(p.h0 > 0.0 && p.h0 < 0.5, "theorem2 requires h0 in (0,1/2)");
      s.omega_base_ = p.beta2 * std::pow(double(p.T) + 1.0, p.theta);
      check_alpha("theorem2");
      break;
    case ScheduleRegime::theorem3:
      require(p.beta1 > 0.0 && p.beta2 > 0.0,
              "theorem3 requires beta1 > 0 and beta2 > 0");
      require(p.nu > 0.0, "theorem3 requires nu > 0");
      require(p.t1 >= 1.0, "theorem3 requires t1 >= 1");
      require(p.ctilde > 0.0 && p.ctilde < 1.0,
              "theorem3 requires ctilde in (0,1)");
      require(p.beta0 >= p.ctilde * p.nu * p.beta2 / 4.0 &&
                  p.beta0 < p.nu * p.beta2 / 4.0,
              "theorem3 requires beta0 in [ctilde*nu*beta2/4, nu*beta2/4)");
      require(p.h0 > 0.0 && p.h0 < 1.0 / p.t1,
              "theorem3 requires h0 in (0, 1/t1)");
      check_alpha("theorem3");
      break;
    case ScheduleRegime::table1:
      require(p.eta0 > 0.0, "table1 requires eta0 > 0");
      require(p.eta_exponent >= 0.0, "table1 requires eta_exponent >= 0");
      require(p.gamma > 0.0, "table1 requires gamma > 0");
      require(p.omega >= 0.0, "table1 requires omega >= 0");
      s.omega_base_ = p.omega;
      if (p.alpha_x == 0.0) {
        s.alpha_x_ = 0.8;  // rows without a listed value
        s.alpha_x_defaulted_ = true;
      }
      if (p.h0 == 0.0) {
        // These presets come with the per-step scaling 1/k and no dither
        // constant, so the default is the harmonic sequence (see h()).
        // Geometric decay is unusable on long preset runs: h0 below the
        // replica contraction rate blows up (x - x_c)/h_k and overflows the
        // integer-rounding compressors, while h0 near 1 leaves their
        // absolute quantization error undamped.
        s.h0_defaulted_ = true;
      } else {
        require(p.h0 > 0.0 && p.h0 <= 1.0, "table1 requires h0 in (0,1]");
      }
      check_alpha("table1");
      break;
    case ScheduleRegime::custom:
      require(p.eta0 > 0.0, "custom requires eta0 > 0");
      require(p.gamma >= 0.0 && p.omega >= 0.0,
              "custom requires gamma >= 0 and omega >= 0");
      require(p.h0 > 0.0 && p.h0 <= 1.0, "custom requires h0 in (0,1]");
      s.omega_base_ = p.omega;
      check_alpha("custom");
      break;
  }
  return s;
}

double Schedule::omega(long long k) const {
  if (regime_ == ScheduleRegime::theorem3) return p_.beta0 * (double(k) + p_.t1);
  return omega_base_;
}

double Schedule::gamma(long long k) const {
  switch (regime_) {
    case ScheduleRegime::table1:
    case ScheduleRegime::custom:
      return p_.gamma;
    default:
      return p_.beta1 * omega(k);
  }
}

double Schedule::eta(long long k) const {
  switch (regime_) {
    case ScheduleRegime::table1:
    case ScheduleRegime::custom: {
      const double kk = std::max<double>(1.0, double(k));
      return p_.eta_exponent == 0.0 ? p_.eta0
                                    : p_.eta0 / std::pow(kk, p_.eta_exponent);
    }
    default:
      return p_.beta2 / omega(k);
  }
}

double Schedule::h(long long k) const {
  // Defaulted table1 runs use the harmonic dither; everything else decays
  // geometrically from the supplied h0.
  if (h0_defaulted_) return 1.0 / double(std::max<long long>(k, 1));
  return std::max(std::pow(p_.h0, double(k)), kHFloor);
}

NetworkState init_network(const Graph& graph, int dim, std::uint64_t master_seed,
                          double init_scale, bool replica_check) {
  NetworkState net;
  net.master_seed = master_seed;
  net.replica_check = replica_check;
  net.agents.resize(graph.size());
  for (int i = 0; i < graph.size(); ++i) {
    auto& a = net.agents[i];
    a.x.resize(dim);
    RandomStream rng = RandomStream::derive(master_seed, i, 0, StreamPurpose::init);
    for (int j = 0; j < dim; ++j) a.x(j) = init_scale * rng.normal();
    a.v = Eigen::VectorXd::Zero(dim);
    a.x_c = Eigen::VectorXd::Zero(dim);
  }
  if (replica_check) {
    net.replica_xc.resize(graph.size());
    for (int i = 0; i < graph.size(); ++i)
      for (int j : graph.neighbors(i))
        net.replica_xc[i][j] = Eigen::VectorXd::Zero(dim);
  }
  return net;
}

double max_replica_deviation(const NetworkState& net) {
  double worst = 0.0;
  for (std::size_t i = 0; i < net.replica_xc.size(); ++i)
    for (const auto& [j, copy] : net.replica_xc[i])
      worst = std::max(
          worst, (copy - net.agents[j].x_c).lpNorm<Eigen::Infinity>());
  return worst;
}

void rcp_step(NetworkState& net, const Graph& graph, const Problem& problem,
              const Schedule& schedule, const CompressorSpec& compressor,
              int batch) {
  const int n = graph.size();
  const long long k = net.step;
  const double eta = schedule.eta(k);
  const double gamma = schedule.gamma(k);
  const double omega = schedule.omega(k);
  const double hk = schedule.h(k);
  const double ax = schedule.alpha_x();

  // Phase 1: everyone encodes against step-k state and broadcasts.
  std::vector<Eigen::VectorXd> xhat(n);
  std::vector<Eigen::VectorXd> payload(n);
  std::vector<Eigen::VectorXd> grad(n);
  for (int i = 0; i < n; ++i) {
    const auto& a = net.agents[i];
    const Eigen::VectorXd delta = a.x - a.x_c;
    RandomStream pay = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::dither);
    RandomStream sup = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::suppress);
    // exact zero skips the rescale; compressing 0 gives 0 for every kind
    const Eigen::VectorXd arg =
        delta.isZero(0.0) ? delta : Eigen::VectorXd(delta / hk);
    const CompressedMessage msg = compress(compressor, arg, pay, &sup);
    payload[i] = msg.payload;
    xhat[i] = a.x_c + hk * msg.payload;
    net.bits_cum += msg.bits;

    RandomStream grs = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::minibatch);
    grad[i] = problem.local_gradient(i, a.x, batch, grs).value;
  }

  // Phase 2: everyone applies the same broadcast round.
  const std::vector<Eigen::VectorXd> lap = laplacian_apply(graph, xhat);
  for (int i = 0; i < n; ++i) {
    auto& a = net.agents[i];
    a.x -= eta * (gamma * lap[i] + omega * a.v + grad[i]);
    a.v += eta * omega * lap[i];
    a.x_c = (1.0 - ax) * a.x_c + ax * xhat[i];
  }

  if (net.replica_check) {
    // receivers decode from their own copy of the sender's reference
    for (int i = 0; i < n; ++i) {
      for (auto& [j, copy] : net.replica_xc[i]) {
        const Eigen::VectorXd xhat_j = copy + hk * payload[j];
        copy = (1.0 - ax) * copy + ax * xhat_j;
      }
    }
  }

  ++net.step;
  check_finite(net);
}

void dsgd_step(NetworkState& net, const Graph& graph, const Problem& problem,
               double eta, int batch) {
  const int n = graph.size();
  const long long k = net.step;
  const double lam_max = graph.spectral_bounds().lambda_max;

  std::vector<Eigen::VectorXd> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = net.agents[i].x;
  const auto lap = laplacian_apply(graph, xs);

  CompressorSpec wire;  // full vectors on the wire
  wire.kind = CompressorKind::identity;
  for (int i = 0; i < n; ++i) {
    RandomStream grs = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::minibatch);
    const auto g = problem.local_gradient(i, xs[i], batch, grs).value;
    net.agents[i].x = xs[i] - lap[i] / (2.0 * lam_max) - eta * g;
    net.bits_cum += bit_cost(wire, problem.dim());
  }
  ++net.step;
  check_finite(net);
}

void choco_step(NetworkState& net, const Graph& graph, const Problem& problem,
                double eta, double gamma_consensus,
                const CompressorSpec& compressor, int batch) {
  const int n = graph.size();
  const long long k = net.step;
  const double lam_max = graph.spectral_bounds().lambda_max;

  std::vector<Eigen::VectorXd> half(n);
  for (int i = 0; i < n; ++i) {
    auto& a = net.agents[i];
    RandomStream grs = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::minibatch);
    half[i] = a.x - eta * problem.local_gradient(i, a.x, batch, grs).value;

    RandomStream pay = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::dither);
    RandomStream sup = RandomStream::derive(net.master_seed, i, k,
                                            StreamPurpose::suppress);
    const CompressedMessage msg = compress(compressor, half[i] - a.x_c, pay, &sup);
    a.x_c += msg.payload;  // every receiver applies the same update
    net.bits_cum += msg.bits;
  }

  std::vector<Eigen::VectorXd> xc(n);
  for (int i = 0; i < n; ++i) xc[i] = net.agents[i].x_c;
  const auto lap = laplacian_apply(graph, xc);
  for (int i = 0; i < n; ++i)
    net.agents[i].x = half[i] - gamma_consensus * lap[i] / (2.0 * lam_max);

  ++net.step;
  check_finite(net);
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "rcp_sgd") return Algorithm::rcp_sgd;
  if (name == "dsgd") return Algorithm::dsgd;
  if (name == "choco_sgd") return Algorithm::choco_sgd;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::rcp_sgd: return "rcp_sgd";
    case Algorithm::dsgd: return "dsgd";
    case Algorithm::choco_sgd: return "choco_sgd";
  }
  throw std::logic_error("unhandled algorithm");
}

RunResult run_single(const RunSpec& spec, std::uint64_t seed) {
  if (!spec.graph || !spec.problem)
    throw std::invalid_argument("run_single needs a graph and a problem");
  if (spec.T < 0) throw std::invalid_argument("T must be >= 0");
  if (spec.metrics_every < 1)
    throw std::invalid_argument("metrics_every must be >= 1");
  if (spec.graph->size() != spec.problem->agents())
    throw std::invalid_argument("graph size and problem agents disagree");

  const auto t0 = std::chrono::steady_clock::now();
  NetworkState net = init_network(*spec.graph, spec.problem->dim(), seed,
                                  spec.init_scale, spec.replica_check);

  RunResult result;
  double residual = std::numeric_limits<double>::infinity();

  const auto record = [&](long long step) {
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(net.agents.size());
    for (const auto& a : net.agents) xs.push_back(a.x);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.problem->dim());
    for (const auto& x : xs) mean += x;
    mean /= double(xs.size());

    TraceRecord rec;
    rec.step = step;
    rec.consensus_err = consensus_error(xs);
    rec.grad_norm_sq = spec.problem->gradient(mean).squaredNorm();
    if (const auto fs = spec.problem->f_star())
      rec.opt_gap = spec.problem->loss(mean) - *fs;
    residual = residual_update(residual, rec.consensus_err, rec.grad_norm_sq);
    rec.residual = residual;
    rec.bits_cum = net.bits_cum;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.trace.push_back(rec);
    if (spec.replica_check)
      result.max_replica_dev =
          std::max(result.max_replica_dev, max_replica_deviation(net));
  };

  record(0);
  try {
    for (long long k = 0; k < spec.T; ++k) {
      switch (spec.algorithm) {
        case Algorithm::rcp_sgd:
          rcp_step(net, *spec.graph, *spec.problem, spec.schedule,
                   spec.compressor, spec.batch);
          break;
        case Algorithm::dsgd:
          dsgd_step(net, *spec.graph, *spec.problem, spec.eta, spec.batch);
          break;
        case Algorithm::choco_sgd:
          choco_step(net, *spec.graph, *spec.problem, spec.eta,
                     spec.gamma_consensus, spec.compressor, spec.batch);
          break;
      }
      if (net.step % spec.metrics_every == 0 || net.step == spec.T)
        record(net.step);
    }
  } catch (const DivergenceError& e) {
    result.diverged = true;
    result.diverged_at = e.step;
  }
  return result;
}

}  // namespace rcp
