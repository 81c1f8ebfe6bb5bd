#include "rcp/compress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace rcp {

namespace {

constexpr double kRoundedNormLimit = 65535.0;  // 16-bit norm encoding

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Shared body of the two b-bit quantizers. norm_prefix is the value the
// receiver multiplies back in: the exact norm for the float variant, the
// stochastically rounded norm for the improved one. Coordinate codes always
// come from the exact norm, the sender knows it.
Eigen::VectorXd quantize(const Eigen::VectorXd& x, double norm,
                         double norm_prefix, int b, RandomStream& rng) {
  const int d = static_cast<int>(x.size());
  const double levels = std::ldexp(1.0, b - 1);  // 2^(b-1)
  const double xi =
      1.0 + std::min(d / (levels * levels), std::sqrt(double(d)) / levels);
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    const double code = std::floor(levels * std::abs(x(i)) / norm + rng.uniform());
    out(i) = (norm_prefix / xi) * sign(x(i)) * (code / levels);
  }
  return out;
}

Eigen::VectorXd base_compress(const CompressorSpec& spec,
                              const Eigen::VectorXd& x, RandomStream& rng) {
  const int d = static_cast<int>(x.size());
  switch (spec.kind) {
    case CompressorKind::identity:
      return x;
    case CompressorKind::zero:
      return Eigen::VectorXd::Zero(d);
    case CompressorKind::sign_norm: {
      const double m = x.lpNorm<Eigen::Infinity>();
      return (m / 2.0) * x.unaryExpr([](double v) { return sign(v); });
    }
    case CompressorKind::sign_norm_improved: {
      const double m = x.lpNorm<Eigen::Infinity>();
      const double mr = static_cast<double>(phi_round(m, rng));
      return (mr / 2.0) * x.unaryExpr([](double v) { return sign(v); });
    }
    case CompressorKind::quantizer_b: {
      const double n2 = x.norm();
      if (n2 == 0.0) return Eigen::VectorXd::Zero(d);
      return quantize(x, n2, n2, spec.bits_b, rng);
    }
    case CompressorKind::quantizer_b_improved: {
      const double n2 = x.norm();
      if (n2 == 0.0) return Eigen::VectorXd::Zero(d);
      const double nr = static_cast<double>(phi_round(n2, rng));
      return quantize(x, n2, nr, spec.bits_b, rng);
    }
  }
  throw std::logic_error("unhandled compressor kind");
}

}  // namespace

std::string kind_name(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::identity: return "identity";
    case CompressorKind::quantizer_b: return "quantizer_b";
    case CompressorKind::sign_norm: return "sign_norm";
    case CompressorKind::quantizer_b_improved: return "quantizer_b_improved";
    case CompressorKind::sign_norm_improved: return "sign_norm_improved";
    case CompressorKind::zero: return "zero";
  }
  throw std::logic_error("unhandled compressor kind");
}

CompressorKind kind_from_name(const std::string& name) {
  if (name == "identity") return CompressorKind::identity;
  if (name == "quantizer_b") return CompressorKind::quantizer_b;
  if (name == "sign_norm") return CompressorKind::sign_norm;
  if (name == "quantizer_b_improved") return CompressorKind::quantizer_b_improved;
  if (name == "sign_norm_improved") return CompressorKind::sign_norm_improved;
  if (name == "zero") return CompressorKind::zero;
  throw std::invalid_argument("unknown compressor kind: " + name);
}

void CompressorSpec::validate() const {
  if (bits_b < 1 || bits_b > 16)
    throw std::invalid_argument("compressor bits_b must be in [1,16]");
  if (privacy_q < 0.0 || privacy_q > 1.0)
    throw std::invalid_argument("compressor privacy_q must be in [0,1]");
  if (!(scale_r > 0.0))
    throw std::invalid_argument("compressor scale_r must be positive");
}

std::uint64_t phi_round(double v, RandomStream& rng) {
  if (v < 0.0 || !std::isfinite(v))
    throw std::invalid_argument("phi_round needs a finite nonnegative value");
  const double fl = std::floor(v);
  const double frac = v - fl;
  return static_cast<std::uint64_t>(fl) + (rng.uniform() < frac ? 1u : 0u);
}

std::uint64_t bit_cost(const CompressorSpec& spec, int dim) {
  if (dim < 1) throw std::invalid_argument("bit_cost needs dim >= 1");
  const std::uint64_t d = static_cast<std::uint64_t>(dim);
  std::uint64_t base = 0;
  switch (spec.kind) {
    case CompressorKind::identity: base = 32 * d; break;
    case CompressorKind::zero: base = 0; break;
    case CompressorKind::sign_norm: base = 32 + d; break;
    case CompressorKind::sign_norm_improved: base = 16 + d; break;
    case CompressorKind::quantizer_b:
      base = 32 + d * (std::uint64_t(spec.bits_b) + 1);
      break;
    case CompressorKind::quantizer_b_improved:
      base = 16 + d * (std::uint64_t(spec.bits_b) + 1);
      break;
  }
  return base + (spec.privacy_q > 0.0 ? 1 : 0);
}

CompressedMessage compress(const CompressorSpec& spec, const Eigen::VectorXd& x,
                           RandomStream& rng, RandomStream* suppress_rng) {
  spec.validate();
  CompressedMessage msg;
  if (spec.privacy_q > 0.0) {
    RandomStream& sr = suppress_rng ? *suppress_rng : rng;
    if (sr.uniform() < spec.privacy_q) {
      msg.payload = Eigen::VectorXd::Zero(x.size());
      msg.bits = 1;  // only the flag goes out
      msg.suppressed = true;
      return msg;
    }
  }
  msg.payload = base_compress(spec, x, rng);
  msg.bits = bit_cost(spec, static_cast<int>(x.size()));
  return msg;
}

std::string certificate_row(const CompressorSpec& spec, const Certificate& c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s, %.10g, %.10g, %.10g, %.10g",
                kind_name(spec.kind).c_str(), c.r, c.phi, c.sigma_c,
                c.violation_rate);
  return buf;
}

namespace {

struct SampleStat {
  double norm_sq = 0.0;
  double mean_err = 0.0;  // mean_trials ||C(x)/r - x||^2
  double slack = 0.0;     // Monte-Carlo allowance, 0 for deterministic kinds
};

std::vector<SampleStat> collect_samples(const CompressorSpec& spec, double r,
                                        int dim, double domain_radius,
                                        int samples, int trials,
                                        RandomStream& rng) {
  spec.validate();
  if (!(r > 0.0)) throw std::invalid_argument("certify needs r > 0");
  if (dim < 1 || samples < 1 || trials < 1)
    throw std::invalid_argument("certify needs dim, samples, trials >= 1");
  if (!(domain_radius > 0.0))
    throw std::invalid_argument("certify needs domain_radius > 0");
  const bool rounded_norm = spec.kind == CompressorKind::sign_norm_improved ||
                            spec.kind == CompressorKind::quantizer_b_improved;
  if (rounded_norm && domain_radius >= kRoundedNormLimit)
    throw std::invalid_argument(
        "rounded-norm kinds encode norms in 16 bits; domain_radius must stay "
        "below 65535");

  std::vector<SampleStat> stats(samples);
  Eigen::VectorXd x(dim);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < dim; ++i) x(i) = rng.normal();
    const double n = x.norm();
    if (n > 0.0) x *= (domain_radius * rng.uniform()) / n;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const CompressedMessage m = compress(spec, x, rng);
      const double e = (m.payload / r - x).squaredNorm();
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / trials;
    double var = sum_sq / trials - mean * mean;
    if (var < 0.0) var = 0.0;
    stats[s].norm_sq = x.squaredNorm();
    stats[s].mean_err = mean;
    stats[s].slack = 3.0 * std::sqrt(var / trials);
    if (stats[s].slack > 0.0) stats[s].slack += 1e-12;
  }
  return stats;
}

double strict_violation_rate(const std::vector<SampleStat>& stats, double phi,
                             double sigma_c) {
  int bad = 0;
  for (const auto& s : stats)
    if (s.mean_err > (1.0 - phi) * s.norm_sq + sigma_c) ++bad;
  return double(bad) / double(stats.size());
}

}  // namespace

Certificate certify(const CompressorSpec& spec, double r, int dim,
                    double domain_radius, int samples, int trials_per_sample,
                    RandomStream& rng) {
  const auto stats = collect_samples(spec, r, dim, domain_radius, samples,
                                     trials_per_sample, rng);

  // sigma grid: exact zero, then geometric 1e-9 .. 1e9.
  std::vector<double> sigmas{0.0};
  for (int k = 0; k <= 144; ++k) sigmas.push_back(1e-9 * std::pow(10.0, k / 8.0));

  for (double sigma : sigmas) {
    // Largest phi admissible at this floor across all samples.
    double phi_cap = 1.0;
    bool ok = true;
    for (const auto& s : stats) {
      const double allowed = sigma + s.slack;
      if (s.norm_sq == 0.0) {
        if (s.mean_err > allowed) ok = false;
        continue;
      }
      phi_cap = std::min(phi_cap, 1.0 - (s.mean_err - allowed) / s.norm_sq);
      if (phi_cap < 0.01) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    // The slack allowance keeps Monte-Carlo noise from shrinking phi, but a
    // pair sitting right on the slack boundary fails the strict recheck on a
    // few percent of samples. Walk phi down until the strict rate is small.
    for (int j = std::min(100, static_cast<int>(std::floor(phi_cap * 100.0 + 1e-9)));
         j >= 1; --j) {
      const double rate = strict_violation_rate(stats, j / 100.0, sigma);
      if (rate > 0.005) continue;
      Certificate c;
      c.r = r;
      c.phi = j / 100.0;
      c.sigma_c = sigma;
      c.violation_rate = rate;
      return c;
    }
  }

  // Nothing on the grid covers the worst sample; report it.
  const SampleStat* worst = &stats[0];
  for (const auto& s : stats)
    if (s.mean_err - s.norm_sq > worst->mean_err - worst->norm_sq) worst = &s;
  throw std::runtime_error(
      "certification failed: worst sample has ||x||^2=" +
      std::to_string(worst->norm_sq) + " and mean error " +
      std::to_string(worst->mean_err) + " beyond the sigma grid");
}

PairCheck check_certificate(const CompressorSpec& spec, double r, int dim,
                            double domain_radius, int samples,
                            int trials_per_sample, double phi, double sigma_c,
                            RandomStream& rng) {
  const auto stats = collect_samples(spec, r, dim, domain_radius, samples,
                                     trials_per_sample, rng);
  PairCheck pc;
  pc.feasible = true;
  for (const auto& s : stats)
    if (s.mean_err > (1.0 - phi) * s.norm_sq + sigma_c + s.slack)
      pc.feasible = false;
  pc.violation_rate = strict_violation_rate(stats, phi, sigma_c);
  return pc;
}

}  // namespace rcp
