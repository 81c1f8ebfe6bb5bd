// Command line front end: run experiments from configs or presets, certify
// compressors, evaluate feasibility ledgers, mount the gradient-inversion
// attack, and pin reference minima for datasets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcp/attack.hpp"
#include "rcp/compress.hpp"
#include "rcp/harness.hpp"
#include "rcp/problems.hpp"
#include "rcp/rng.hpp"
#include "rcp/theory.hpp"

namespace {

rcp::CompressorSpec spec_from(const std::string& kind, int bits, double q,
                              double r) {
  rcp::CompressorSpec spec;
  spec.kind = rcp::kind_from_name(kind);
  spec.bits_b = bits;
  spec.privacy_q = q;
  spec.scale_r = r;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation lab for compressed private decentralized SGD"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  std::string run_config, run_preset, run_out, run_seeds;
  bool run_dry = false;
  auto* run = app.add_subcommand(
      "run", "execute a config file or preset; writes per-seed traces, an "
             "aggregate CSV, and a resolved-parameter header");
  run->add_option("config", run_config, "path to a key = value config file");
  run->add_option("--preset", run_preset, "built-in preset name");
  run->add_option("--seeds", run_seeds, "comma-separated seed override");
  run->add_option("--out", run_out, "output directory override");
  run->add_flag("--dry", run_dry, "print the resolved config and exit");

  auto* presets = app.add_subcommand("presets", "list built-in preset names");

  // ---- certify --------------------------------------------------------------
  std::string cert_kind = "quantizer_b";
  int cert_bits = 2, cert_dim = 10, cert_samples = 1000, cert_trials = 200;
  double cert_q = 0.0, cert_r = 1.0, cert_radius = 10.0;
  std::uint64_t cert_seed = 1;
  auto* cert = app.add_subcommand(
      "certify", "estimate the contraction certificate (r, phi, sigma_c) of a "
                 "compressor by sampled trials");
  cert->add_option("--kind", cert_kind, "compressor kind");
  cert->add_option("--bits", cert_bits, "quantizer resolution");
  cert->add_option("--q", cert_q, "suppression probability");
  cert->add_option("--r", cert_r, "descaling factor");
  cert->add_option("--dim", cert_dim, "vector dimension");
  cert->add_option("--radius", cert_radius, "sampling domain radius");
  cert->add_option("--samples", cert_samples, "sampled inputs");
  cert->add_option("--trials", cert_trials, "trials per input");
  cert->add_option("--seed", cert_seed, "rng seed");

  // ---- ledger ---------------------------------------------------------------
  std::string led_regime = "theorem1";
  double led_Lf = 1.0, led_lmin = 0.0, led_lmax = 0.0, led_phi1 = 0.0;
  double led_r0 = 0.0, led_sigma2 = 0.0, led_r = 1.0, led_alpha_r = 0.0;
  double led_sigma_bar = 0.0, led_nu = 0.0;
  int led_n = 1;
  long long led_T = 1000;
  double led_beta0 = 0.0, led_beta1 = 0.0, led_beta2 = 0.0, led_beta5 = 1.0;
  double led_omega = 0.0, led_eta = 0.0, led_t1 = 0.0, led_ctilde = 0.5;
  double led_h0 = 0.0;
  bool led_suggest = false;
  auto* led = app.add_subcommand(
      "ledger", "evaluate the side-condition constants for a parameter point, "
                "or search for a feasible one with --suggest");
  led->add_option("--regime", led_regime,
                  "theorem1 | theorem1_speedup | theorem2 | theorem3");
  led->add_option("--Lf", led_Lf, "smoothness bound");
  led->add_option("--lmin", led_lmin, "smallest positive Laplacian eigenvalue")
      ->required();
  led->add_option("--lmax", led_lmax, "largest Laplacian eigenvalue")
      ->required();
  led->add_option("--phi1", led_phi1, "alpha_x * r * phi")->required();
  led->add_option("--r0", led_r0, "compressor variance constant");
  led->add_option("--sigma2", led_sigma2, "gradient noise bound");
  led->add_option("--nu", led_nu, "PL constant (theorem3)");
  led->add_option("--r", led_r, "descaling factor");
  led->add_option("--alpha-r", led_alpha_r, "alpha_x * r (defaults to phi1)");
  led->add_option("--sigma-bar", led_sigma_bar, "optimum heterogeneity");
  led->add_option("--agents", led_n, "agent count");
  led->add_option("--T", led_T, "horizon for the suggested schedules");
  led->add_option("--beta0", led_beta0, "omega growth rate (theorem3)");
  led->add_option("--beta1", led_beta1, "gamma/omega coupling");
  led->add_option("--beta2", led_beta2, "eta*omega product");
  led->add_option("--beta5", led_beta5, "free positive constant");
  led->add_option("--omega", led_omega, "dual step weight");
  led->add_option("--eta", led_eta, "primal step size");
  led->add_option("--t1", led_t1, "omega schedule offset (theorem3)");
  led->add_option("--ctilde", led_ctilde, "beta0 lower-interval factor");
  led->add_option("--h0", led_h0, "compression mixing base (theorem3)");
  led->add_flag("--suggest", led_suggest,
                "search for feasible parameters instead of checking a point");

  // ---- attack ---------------------------------------------------------------
  int atk_d = 10, atk_iters = 3000;
  double atk_noise = 0.0, atk_step = 0.1, atk_radius = 3.0, atk_u = 1.0;
  std::uint64_t atk_seed = 1;
  std::string atk_kind, atk_out;
  int atk_bits = 2;
  double atk_q = 0.0, atk_r = 1.0;
  auto* atk = app.add_subcommand(
      "attack", "gradient-inversion attack on one observed logistic gradient; "
                "reports how well the sample is recovered");
  atk->add_option("--d", atk_d, "sample dimension");
  atk->add_option("--seed", atk_seed, "rng seed");
  atk->add_option("--noise", atk_noise,
                  "std of Gaussian noise added to every observed coordinate");
  atk->add_option("--iters", atk_iters, "descent iterations");
  atk->add_option("--step", atk_step,
                  "initial step size; adapts x1.1 on accept, x0.5 on reject");
  atk->add_option("--radius", atk_radius, "norm cap for the hidden sample");
  atk->add_option("--u", atk_u, "label, +1 or -1");
  atk->add_option("--kind", atk_kind, "compressor on the wire (none if empty)");
  atk->add_option("--bits", atk_bits, "compressor resolution");
  atk->add_option("--q", atk_q, "compressor suppression probability");
  atk->add_option("--r", atk_r, "compressor descaling factor");
  atk->add_option("--out", atk_out, "write the per-iteration curve CSV here");

  // ---- fstar ----------------------------------------------------------------
  std::string fs_csv = "data/breast_cancer.csv", fs_cache;
  int fs_label = 0;
  bool fs_no_normalize = false;
  double fs_lambda = 1e-3, fs_alpha = 1.0;
  long long fs_steps = 1000000;
  auto* fs = app.add_subcommand(
      "fstar", "long full-gradient descent to pin the dataset's reference "
               "minimum, cached for later runs");
  fs->add_option("--csv", fs_csv, "dataset path");
  fs->add_option("--label-column", fs_label, "label column index");
  fs->add_flag("--no-normalize", fs_no_normalize, "skip min-max scaling");
  fs->add_option("--lambda", fs_lambda, "regularizer weight");
  fs->add_option("--alpha", fs_alpha, "regularizer shape");
  fs->add_option("--steps", fs_steps, "descent steps");
  fs->add_option("--cache", fs_cache, "cache file (default <csv>.fstar)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rcp::RunConfig cfg;
      if (!run_config.empty() && !run_preset.empty())
        throw std::invalid_argument("pass a config file or --preset, not both");
      if (!run_config.empty())
        cfg = rcp::parse_config_file(run_config);
      else if (!run_preset.empty())
        cfg = rcp::preset(run_preset);
      else
        throw std::invalid_argument("need a config file or --preset");
      if (!run_seeds.empty()) {
        rcp::RunConfig patch = cfg;
        // reuse the config parser so the override gets the same validation
        cfg = rcp::parse_config_text(rcp::serialize_config(patch) +
                                     "seeds = " + run_seeds + "\n");
      }
      if (!run_out.empty()) cfg.out_dir = run_out;
      if (run_dry) {
        std::cout << rcp::serialize_config(cfg);
        return 0;
      }
      const rcp::ExecutionOutputs outs = rcp::execute(cfg);
      for (const auto& p : outs.trace_paths) std::cout << p << "\n";
      std::cout << outs.aggregate_path << "\n" << outs.header_path << "\n";
      if (!outs.diverged_seeds.empty()) {
        std::cout << "diverged seeds:";
        for (auto s : outs.diverged_seeds) std::cout << ' ' << s;
        std::cout << "\n";
      }
      return 0;
    }

    if (presets->parsed()) {
      for (const auto& name : rcp::preset_names()) std::cout << name << "\n";
      return 0;
    }

    if (cert->parsed()) {
      const rcp::CompressorSpec spec =
          spec_from(cert_kind, cert_bits, cert_q, cert_r);
      rcp::RandomStream rng = rcp::RandomStream::derive(
          cert_seed, 0, 0, rcp::StreamPurpose::certify);
      const rcp::Certificate c = rcp::certify(
          spec, cert_r, cert_dim, cert_radius, cert_samples, cert_trials, rng);
      std::cout << "kind, r, phi, sigma_c, violation_rate\n"
                << rcp::certificate_row(spec, c) << "\n";
      return 0;
    }

    if (led->parsed()) {
      rcp::ProblemConstants pc;
      pc.L_f = led_Lf;
      pc.lambda_min_pos = led_lmin;
      pc.lambda_max = led_lmax;
      pc.phi1 = led_phi1;
      pc.r0 = led_r0;
      pc.sigma_sq = led_sigma2;
      if (led_nu > 0) pc.nu = led_nu;
      pc.r = led_r;
      pc.alpha_r = led_alpha_r;
      pc.sigma_bar = led_sigma_bar;
      pc.n_agents = led_n;
      const rcp::ScheduleRegime regime = rcp::regime_from_name(led_regime);
      rcp::ConstantLedger ledger;
      if (led_suggest) {
        const rcp::ScheduleParams p =
            rcp::suggest_params(pc, regime, led_n, led_T);
        const rcp::Schedule sched = rcp::Schedule::make(regime, p);
        std::cout << "beta0 = " << p.beta0 << "\nbeta1 = " << p.beta1
                  << "\nbeta2 = " << p.beta2 << "\nomega = " << sched.omega(0)
                  << "\neta = " << sched.eta(0) << "\nt1 = " << p.t1
                  << "\nh0 = " << p.h0 << "\nalpha_x = " << sched.alpha_x()
                  << "\n";
        if (regime == rcp::ScheduleRegime::theorem3)
          ledger = rcp::ledger_theorem3(pc, p.beta0, p.beta1, p.beta2, p.t1,
                                        p.ctilde, p.h0);
        else
          ledger = rcp::ledger_theorem1(pc, p.beta1, p.beta2, 1.0,
                                        sched.omega(0), sched.eta(0));
      } else if (regime == rcp::ScheduleRegime::theorem3) {
        std::optional<double> h0;
        if (led_h0 > 0) h0 = led_h0;
        ledger = rcp::ledger_theorem3(pc, led_beta0, led_beta1, led_beta2,
                                      led_t1, led_ctilde, h0);
      } else {
        double omega = led_omega;
        if (regime == rcp::ScheduleRegime::theorem1_speedup)
          omega = led_beta2 * std::sqrt(static_cast<double>(led_T)) /
                  std::sqrt(static_cast<double>(led_n));
        else if (regime == rcp::ScheduleRegime::theorem2)
          omega = led_beta2 * std::pow(static_cast<double>(led_T + 1), 0.5);
        const double eta = led_eta > 0 ? led_eta : led_beta2 / omega;
        ledger = rcp::ledger_theorem1(pc, led_beta1, led_beta2, led_beta5,
                                      omega, eta);
      }
      std::cout << ledger.report();
      return ledger.feasible ? 0 : 2;
    }

    if (atk->parsed()) {
      if (atk_u != 1.0 && atk_u != -1.0)
        throw std::invalid_argument("--u must be +1 or -1");
      rcp::RandomStream zrng =
          rcp::RandomStream::derive(atk_seed, 0, 0, rcp::StreamPurpose::attack);
      Eigen::VectorXd z(atk_d), x(atk_d);
      for (int i = 0; i < atk_d; ++i) z[i] = zrng.normal();
      if (z.norm() > atk_radius) z *= atk_radius / z.norm();
      for (int i = 0; i < atk_d; ++i) x[i] = 0.5 * zrng.normal();

      rcp::CompressorSpec spec;
      const bool compressed = !atk_kind.empty() && atk_kind != "none";
      if (compressed) spec = spec_from(atk_kind, atk_bits, atk_q, atk_r);
      rcp::RandomStream orng =
          rcp::RandomStream::derive(atk_seed, 0, 1, rcp::StreamPurpose::noise);
      const rcp::Observation obs = rcp::observe_single(
          z, atk_u, x, atk_noise, compressed ? &spec : nullptr, orng);
      if (obs.suppressed)
        std::cout << "observation suppressed by the privacy wrapper\n";

      rcp::RandomStream arng =
          rcp::RandomStream::derive(atk_seed, 0, 2, rcp::StreamPurpose::attack);
      const rcp::AttackResult res = rcp::dlg_attack(
          x, obs.value, atk_u, atk_iters, atk_step, arng, &z);
      std::printf("recovery_error = %.9g\nmatched_loss = %.9g\n",
                  res.error_curve.empty() ? std::nan("")
                                          : res.error_curve.back(),
                  res.matched_loss);
      if (res.failed) std::cout << "attack diverged (non-finite iterate)\n";
      if (!atk_out.empty()) {
        std::ofstream f(atk_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + atk_out);
        // Pin down what the knobs meant for this curve; the matching
        // objective itself is described in the library docs.
        f << "# gradient inversion, fixed-step descent on the matching loss\n"
          << "# step adapts x1.1 on accepted moves, x0.5 on rejected ones\n"
          << "# iters = " << atk_iters << ", initial step = " << atk_step
          << "\n"
          << "# noise_std = " << atk_noise
          << " (std of additive Gaussian noise per observed coordinate)\n"
          << "# compressor = " << (compressed ? atk_kind : "none")
          << ", q = " << atk_q << ", u = " << atk_u << ", d = " << atk_d
          << ", seed = " << atk_seed << "\n"
          << rcp::attack_csv(res);
      }
      return 0;
    }

    if (fs->parsed()) {
      rcp::Dataset data =
          rcp::load_csv_dataset(fs_csv, fs_label, !fs_no_normalize);
      auto shards = rcp::partition(data.size(), 1,
                                   rcp::PartitionStrategy::round_robin, 0);
      rcp::LogisticNonconvexProblem problem(std::move(data), std::move(shards),
                                            fs_lambda, fs_alpha);
      const double f_star = rcp::compute_reference_minimum(problem, fs_steps);
      const std::uint64_t hash = rcp::fnv1a_file(fs_csv);
      const std::string cache =
          fs_cache.empty() ? fs_csv + ".fstar" : fs_cache;
      rcp::save_f_star_cache(cache, hash, fs_lambda, fs_alpha, f_star,
                             fs_steps);
      std::printf("f_star = %.17g\ncache = %s\n", f_star, cache.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
