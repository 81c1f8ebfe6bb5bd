#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "rcp/rng.hpp"

namespace rcp {

enum class CompressorKind {
  identity,
  quantizer_b,           // dithered b-bit quantizer, float norm prefix
  sign_norm,             // (|x|_inf / 2) * sign(x)
  quantizer_b_improved,  // b-bit quantizer with stochastically rounded norm
  sign_norm_improved,    // sign compressor with stochastically rounded norm
  zero,                  // transmits nothing useful; payload is always 0
};

std::string kind_name(CompressorKind kind);
CompressorKind kind_from_name(const std::string& name);

struct CompressorSpec {
  CompressorKind kind = CompressorKind::identity;
  int bits_b = 2;          // quantizer resolution, >= 1
  double privacy_q = 0.0;  // probability of emitting 0 instead; 0 disables
  double scale_r = 1.0;    // receiver-side descaling factor r, > 0

  void validate() const;
};

struct CompressedMessage {
  Eigen::VectorXd payload;
  std::uint64_t bits = 0;  // realized wire cost of this message
  bool suppressed = false; // privacy wrapper fired, payload forced to 0
};

// Unbiased stochastic rounding: floor(v)+1 with probability frac(v),
// floor(v) otherwise. v must be nonnegative.
std::uint64_t phi_round(double v, RandomStream& rng);

// Wire cost of an unsuppressed message, header plus payload encoding.
// Privacy-wrapped messages carry one extra flag bit; a suppressed message
// costs exactly 1 bit (the flag alone).
std::uint64_t bit_cost(const CompressorSpec& spec, int dim);

// rng drives payload randomness (dithering, norm rounding). The privacy
// wrapper's suppression draw comes from suppress_rng when given, so callers
// can keep the two decision streams apart; otherwise it shares rng.
CompressedMessage compress(const CompressorSpec& spec, const Eigen::VectorXd& x,
                           RandomStream& rng,
                           RandomStream* suppress_rng = nullptr);

// Empirical variance-style certificate: the smallest absolute floor sigma_c
// and, at that floor, the largest contraction phi on a fixed grid such that
//   mean_trials ||C(x)/r - x||^2 <= (1 - phi) ||x||^2 + sigma_c
// holds for every sampled x (up to Monte-Carlo slack on stochastic kinds).
struct Certificate {
  double r = 1.0;
  double phi = 0.0;
  double sigma_c = 0.0;
  double violation_rate = 0.0;  // strict violations at the reported pair
};

std::string certificate_row(const CompressorSpec& spec, const Certificate& c);

Certificate certify(const CompressorSpec& spec, double r, int dim,
                    double domain_radius, int samples, int trials_per_sample,
                    RandomStream& rng);

// Re-check a given (phi, sigma_c) pair on fresh samples. Used to confirm
// wrapped-compressor certificates without re-running the grid search.
struct PairCheck {
  bool feasible = false;        // holds on all samples within slack
  double violation_rate = 0.0;  // strict violations
};

PairCheck check_certificate(const CompressorSpec& spec, double r, int dim,
                            double domain_radius, int samples,
                            int trials_per_sample, double phi, double sigma_c,
                            RandomStream& rng);

}  // namespace rcp
