// Config parsing, presets, and the run driver that turns one RunConfig into
// trace/aggregate/header files on disk.

#include "rcp/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rcp/rng.hpp"
#include "rcp/theory.hpp"

namespace rcp {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& msg) {
  throw std::invalid_argument("config key \"" + key + "\": " + msg);
}

long long parse_int(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE)
    bad_key(key, "expected integer, got \"" + value + "\"");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  if (value.empty() || value[0] == '-')
    bad_key(key, "expected unsigned integer, got \"" + value + "\"");
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || errno == ERANGE)
    bad_key(key, "expected unsigned integer, got \"" + value + "\"");
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    bad_key(key, "expected number, got \"" + value + "\"");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_key(key, "expected true/false, got \"" + value + "\"");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key,
                                           const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_key(key, "empty entry in seed list");
    seeds.push_back(parse_u64(key, item));
  }
  if (seeds.empty()) bad_key(key, "needs at least one seed");
  return seeds;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '-';
    if (!ok) return false;
  }
  return true;
}

// Range checks shared by parse_config and execute (configs can also be built
// in code). Every message names the offending key.
void validate_config(const RunConfig& cfg) {
  if (!valid_name(cfg.name))
    bad_key("name", "must match [A-Za-z0-9_-]+, got \"" + cfg.name + "\"");
  if (cfg.T < 0) bad_key("T", "must be >= 0");
  if (cfg.seeds.empty()) bad_key("seeds", "needs at least one seed");
  if (cfg.metrics_every < 1) bad_key("metrics_every", "must be >= 1");
  if (cfg.batch < 0) bad_key("batch", "must be >= 0");
  if (!(cfg.init_scale > 0)) bad_key("init_scale", "must be > 0");
  if (!(cfg.eta > 0)) bad_key("eta", "must be > 0");
  if (!(cfg.gamma_consensus > 0)) bad_key("gamma_consensus", "must be > 0");

  if (cfg.graph_kind != "ring" && cfg.graph_kind != "torus" &&
      cfg.graph_kind != "complete" && cfg.graph_kind != "file")
    bad_key("graph.kind", "unknown kind \"" + cfg.graph_kind + "\"");
  if (cfg.graph_kind == "ring" || cfg.graph_kind == "complete") {
    if (cfg.graph_n < 2) bad_key("graph.n", "must be >= 2");
  }
  if (cfg.graph_kind == "torus") {
    if (cfg.graph_rows < 2) bad_key("graph.rows", "must be >= 2");
    if (cfg.graph_cols < 2) bad_key("graph.cols", "must be >= 2");
  }
  if (cfg.graph_kind == "file" && cfg.graph_path.empty())
    bad_key("graph.path", "required when graph.kind = file");

  if (cfg.problem_kind != "logistic" && cfg.problem_kind != "quadratic")
    bad_key("problem.kind", "unknown kind \"" + cfg.problem_kind + "\"");
  if (cfg.problem_kind == "logistic" && cfg.problem_csv.empty())
    bad_key("problem.csv", "required when problem.kind = logistic");
  if (cfg.label_column < 0) bad_key("problem.label_column", "must be >= 0");
  if (cfg.lambda < 0) bad_key("problem.lambda", "must be >= 0");
  if (!(cfg.alpha > 0)) bad_key("problem.alpha", "must be > 0");
  if (cfg.partition != "round_robin" && cfg.partition != "contiguous")
    bad_key("problem.partition", "must be round_robin or contiguous");
  if (cfg.quad_d < 1) bad_key("problem.d", "must be >= 1");
  if (cfg.quad_rank_deficit < 0 || cfg.quad_rank_deficit >= cfg.quad_d)
    bad_key("problem.rank_deficit", "must lie in [0, problem.d)");
  if (!(cfg.quad_condition >= 1)) bad_key("problem.condition", "must be >= 1");
  if (cfg.quad_noise_std < 0) bad_key("problem.noise_std", "must be >= 0");
  if (cfg.quad_hetero < 0) bad_key("problem.hetero", "must be >= 0");
  if (!(cfg.quad_scale > 0)) bad_key("problem.scale", "must be > 0");

  if (cfg.compressor.bits_b < 1 || cfg.compressor.bits_b > 16)
    bad_key("compressor.bits", "must lie in [1, 16]");
  if (cfg.compressor.privacy_q < 0 || cfg.compressor.privacy_q > 1)
    bad_key("compressor.q", "must lie in [0, 1]");
  if (!(cfg.compressor.scale_r > 0)) bad_key("compressor.r", "must be > 0");

  try {
    regime_from_name(cfg.regime);
  } catch (const std::exception&) {
    bad_key("schedule.regime", "unknown regime \"" + cfg.regime + "\"");
  }
}

// One dotted key into one struct field. Later duplicates overwrite earlier
// ones, so presets can be partially overridden.
void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "name") {
    cfg.name = value;
  } else if (key == "algorithm") {
    cfg.algorithm = algorithm_from_name(value);
  } else if (key == "T") {
    cfg.T = parse_int(key, value);
  } else if (key == "seeds") {
    cfg.seeds = parse_seed_list(key, value);
  } else if (key == "metrics_every") {
    cfg.metrics_every = static_cast<int>(parse_int(key, value));
  } else if (key == "batch") {
    cfg.batch = static_cast<int>(parse_int(key, value));
  } else if (key == "init_scale") {
    cfg.init_scale = parse_double(key, value);
  } else if (key == "replica_check") {
    cfg.replica_check = parse_bool(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "gamma_consensus") {
    cfg.gamma_consensus = parse_double(key, value);
  } else if (key == "graph.kind") {
    cfg.graph_kind = value;
  } else if (key == "graph.n") {
    cfg.graph_n = static_cast<int>(parse_int(key, value));
  } else if (key == "graph.rows") {
    cfg.graph_rows = static_cast<int>(parse_int(key, value));
  } else if (key == "graph.cols") {
    cfg.graph_cols = static_cast<int>(parse_int(key, value));
  } else if (key == "graph.path") {
    cfg.graph_path = value;
  } else if (key == "problem.kind") {
    cfg.problem_kind = value;
  } else if (key == "problem.csv") {
    cfg.problem_csv = value;
  } else if (key == "problem.label_column") {
    cfg.label_column = static_cast<int>(parse_int(key, value));
  } else if (key == "problem.normalize") {
    cfg.normalize = parse_bool(key, value);
  } else if (key == "problem.lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "problem.alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "problem.partition") {
    cfg.partition = value;
  } else if (key == "problem.partition_seed") {
    cfg.partition_seed = parse_u64(key, value);
  } else if (key == "problem.f_star") {
    cfg.f_star_override = parse_double(key, value);
  } else if (key == "problem.f_star_cache") {
    cfg.f_star_cache = value;
  } else if (key == "problem.d") {
    cfg.quad_d = static_cast<int>(parse_int(key, value));
  } else if (key == "problem.rank_deficit") {
    cfg.quad_rank_deficit = static_cast<int>(parse_int(key, value));
  } else if (key == "problem.condition") {
    cfg.quad_condition = parse_double(key, value);
  } else if (key == "problem.seed") {
    cfg.quad_seed = parse_u64(key, value);
  } else if (key == "problem.noise_std") {
    cfg.quad_noise_std = parse_double(key, value);
  } else if (key == "problem.hetero") {
    cfg.quad_hetero = parse_double(key, value);
  } else if (key == "problem.scale") {
    cfg.quad_scale = parse_double(key, value);
  } else if (key == "compressor.kind") {
    cfg.compressor.kind = kind_from_name(value);
  } else if (key == "compressor.bits") {
    cfg.compressor.bits_b = static_cast<int>(parse_int(key, value));
  } else if (key == "compressor.q") {
    cfg.compressor.privacy_q = parse_double(key, value);
  } else if (key == "compressor.r") {
    cfg.compressor.scale_r = parse_double(key, value);
  } else if (key == "schedule.regime") {
    cfg.regime = value;
  } else if (key == "schedule.beta0") {
    cfg.sched.beta0 = parse_double(key, value);
  } else if (key == "schedule.beta1") {
    cfg.sched.beta1 = parse_double(key, value);
  } else if (key == "schedule.beta2") {
    cfg.sched.beta2 = parse_double(key, value);
  } else if (key == "schedule.theta") {
    cfg.sched.theta = parse_double(key, value);
  } else if (key == "schedule.t1") {
    cfg.sched.t1 = parse_double(key, value);
  } else if (key == "schedule.h0") {
    cfg.sched.h0 = parse_double(key, value);
  } else if (key == "schedule.alpha_x") {
    cfg.sched.alpha_x = parse_double(key, value);
  } else if (key == "schedule.omega") {
    cfg.sched.omega = parse_double(key, value);
  } else if (key == "schedule.eta0") {
    cfg.sched.eta0 = parse_double(key, value);
  } else if (key == "schedule.eta_exponent") {
    cfg.sched.eta_exponent = parse_double(key, value);
  } else if (key == "schedule.gamma") {
    cfg.sched.gamma = parse_double(key, value);
  } else if (key == "schedule.ctilde") {
    cfg.sched.ctilde = parse_double(key, value);
  } else if (key == "schedule.nu") {
    cfg.sched.nu = parse_double(key, value);
  } else {
    throw std::invalid_argument("unknown config key \"" + key + "\"");
  }
}

// Shared skeleton for the rcp presets; they differ only in compressor,
// consensus gain, and whether alpha_x is pinned or left to its default.
RunConfig rcp_preset(const std::string& name, CompressorKind kind, double q,
                     double gamma, double alpha_x) {
  RunConfig cfg;
  cfg.name = name;
  cfg.algorithm = Algorithm::rcp_sgd;
  cfg.compressor.kind = kind;
  cfg.compressor.bits_b = 2;
  cfg.compressor.privacy_q = q;
  cfg.regime = "table1";
  ScheduleParams p;
  p.gamma = gamma;
  p.omega = 0.5;
  p.eta0 = 0.08;
  p.eta_exponent = 0.01;
  p.alpha_x = alpha_x;
  cfg.sched = p;
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << text;
  if (!f) throw std::runtime_error("short write to " + path.string());
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / xs.size());
  return s;
}

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// The feasibility block of the run header: certificate, problem constants,
// and whichever ledger matches the schedule regime. Anything that fails
// (zero compressor, missing PL constant) degrades to a one-line notice.
std::string ledger_block(const RunConfig& cfg, const Graph& graph,
                         const BuiltProblem& built, const Schedule& schedule) {
  std::string out = "# feasibility ledger\n";
  try {
    RandomStream crng =
        RandomStream::derive(cfg.seeds[0], 0, 0, StreamPurpose::certify);
    const Certificate cert =
        certify(cfg.compressor, cfg.compressor.scale_r, built.problem->dim(),
                10.0, 120, 60, crng);
    out += "certificate = " + certificate_row(cfg.compressor, cert) + "\n";

    ProblemConstants pc;
    pc.L_f = built.problem->smoothness();
    const SpectralBounds sb = graph.spectral_bounds();
    pc.lambda_min_pos = sb.lambda_min_pos;
    pc.lambda_max = sb.lambda_max;
    const double r = cfg.compressor.scale_r;
    const double ax = schedule.alpha_x();
    pc.phi1 = ax * r * cert.phi;
    pc.r0 = 2.0 * r * r * (1.0 - cert.phi) + 2.0 * (1.0 - r) * (1.0 - r);
    pc.alpha_r = ax * r;
    pc.r = r;
    pc.n_agents = graph.size();
    if (auto nu = built.problem->pl_constant()) pc.nu = *nu;
    if (cfg.batch > 0) {
      RandomStream srng =
          RandomStream::derive(cfg.seeds[0], 0, 0, StreamPurpose::minibatch);
      pc.sigma_sq = estimate_sigma(*built.problem, 3, cfg.batch, 30, srng);
    }
    if (auto* quad =
            dynamic_cast<const PLQuadraticProblem*>(built.problem.get()))
      pc.sigma_bar = quad->sigma_bar();

    const ScheduleParams& p = schedule.params();
    ConstantLedger ledger;
    if (schedule.regime() == ScheduleRegime::theorem3) {
      std::optional<double> h0;
      if (p.h0 > 0) h0 = p.h0;
      ledger = ledger_theorem3(pc, p.beta0, p.beta1, p.beta2, p.t1, p.ctilde,
                               h0);
    } else {
      out += "beta_5 = 1\n";
      ledger = ledger_theorem1(pc, p.beta1, p.beta2, 1.0, schedule.omega(0),
                               schedule.eta(0));
    }
    out += ledger.report();
  } catch (const std::exception& e) {
    out += std::string("ledger unavailable: ") + e.what() + "\n";
  }
  return out;
}

std::string header_text(const RunConfig& cfg, const Graph& graph,
                        const BuiltProblem& built, const Schedule& schedule,
                        const std::vector<std::uint64_t>& diverged) {
  std::string out = "version = 0.1.0\n# resolved configuration\n";
  out += serialize_config(cfg);
  out += "# resolved constants\n";
  out += "agents = " + std::to_string(graph.size()) + "\n";
  const SpectralBounds sb = graph.spectral_bounds();
  out += "lambda_min_pos = " + fmt(sb.lambda_min_pos) + "\n";
  out += "lambda_max = " + fmt(sb.lambda_max) + "\n";
  out += "L_f = " + fmt(built.problem->smoothness()) + "\n";
  if (cfg.problem_kind == "logistic") {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(built.dataset_hash));
    out += std::string("dataset_hash = ") + buf + "\n";
  }
  if (auto fs = built.problem->f_star())
    out += "f_star = " + fmt(*fs) + "\n";
  else
    out += "f_star = unknown\n";
  if (cfg.algorithm == Algorithm::rcp_sgd) {
    out += std::string("alpha_x_defaulted = ") +
           (schedule.alpha_x_defaulted() ? "true" : "false") + "\n";
    out += std::string("h0_defaulted = ") +
           (schedule.h0_defaulted() ? "true" : "false") + "\n";
  }
  if (cfg.compressor.privacy_q > 0) {
    out += "dp_epsilon = 0\n";
    out += "dp_delta = " + fmt(1.0 - cfg.compressor.privacy_q) + "\n";
  }
  if (diverged.empty()) {
    out += "diverged_seeds = none\n";
  } else {
    out += "diverged_seeds = ";
    for (std::size_t i = 0; i < diverged.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(diverged[i]);
    }
    out += "\n";
  }

  const ScheduleRegime regime = schedule.regime();
  const bool theorem_regime = regime == ScheduleRegime::theorem1 ||
                              regime == ScheduleRegime::theorem1_speedup ||
                              regime == ScheduleRegime::theorem2 ||
                              regime == ScheduleRegime::theorem3;
  if (cfg.algorithm == Algorithm::rcp_sgd && theorem_regime)
    out += ledger_block(cfg, graph, built, schedule);
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  // A text that is just one bare token is a preset reference, not key=value
  // lines. valid_name admits no '=', '#', or whitespace, so there is no
  // overlap with the line grammar.
  const std::string whole = trim(text);
  if (valid_name(whole)) return preset(whole);

  RunConfig cfg;
  bool first_key = true;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line missing '=': \"" + s + "\"");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "preset") {
      if (!first_key)
        bad_key("preset", "must be the first key when present");
      cfg = preset(value);
      first_key = false;
      continue;
    }
    first_key = false;
    apply_key(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  line("name", cfg.name);
  line("algorithm", algorithm_name(cfg.algorithm));
  line("T", std::to_string(cfg.T));
  std::string seeds;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(cfg.seeds[i]);
  }
  line("seeds", seeds);
  line("metrics_every", std::to_string(cfg.metrics_every));
  line("batch", std::to_string(cfg.batch));
  line("init_scale", fmt(cfg.init_scale));
  line("replica_check", cfg.replica_check ? "true" : "false");
  line("out", cfg.out_dir);
  line("eta", fmt(cfg.eta));
  line("gamma_consensus", fmt(cfg.gamma_consensus));
  line("graph.kind", cfg.graph_kind);
  line("graph.n", std::to_string(cfg.graph_n));
  line("graph.rows", std::to_string(cfg.graph_rows));
  line("graph.cols", std::to_string(cfg.graph_cols));
  line("graph.path", cfg.graph_path);
  line("problem.kind", cfg.problem_kind);
  line("problem.csv", cfg.problem_csv);
  line("problem.label_column", std::to_string(cfg.label_column));
  line("problem.normalize", cfg.normalize ? "true" : "false");
  line("problem.lambda", fmt(cfg.lambda));
  line("problem.alpha", fmt(cfg.alpha));
  line("problem.partition", cfg.partition);
  line("problem.partition_seed", std::to_string(cfg.partition_seed));
  if (cfg.f_star_override) line("problem.f_star", fmt(*cfg.f_star_override));
  line("problem.f_star_cache", cfg.f_star_cache);
  line("problem.d", std::to_string(cfg.quad_d));
  line("problem.rank_deficit", std::to_string(cfg.quad_rank_deficit));
  line("problem.condition", fmt(cfg.quad_condition));
  line("problem.seed", std::to_string(cfg.quad_seed));
  line("problem.noise_std", fmt(cfg.quad_noise_std));
  line("problem.hetero", fmt(cfg.quad_hetero));
  line("problem.scale", fmt(cfg.quad_scale));
  line("compressor.kind", kind_name(cfg.compressor.kind));
  line("compressor.bits", std::to_string(cfg.compressor.bits_b));
  line("compressor.q", fmt(cfg.compressor.privacy_q));
  line("compressor.r", fmt(cfg.compressor.scale_r));
  line("schedule.regime", cfg.regime);
  line("schedule.beta0", fmt(cfg.sched.beta0));
  line("schedule.beta1", fmt(cfg.sched.beta1));
  line("schedule.beta2", fmt(cfg.sched.beta2));
  line("schedule.theta", fmt(cfg.sched.theta));
  line("schedule.t1", fmt(cfg.sched.t1));
  line("schedule.h0", fmt(cfg.sched.h0));
  line("schedule.alpha_x", fmt(cfg.sched.alpha_x));
  line("schedule.omega", fmt(cfg.sched.omega));
  line("schedule.eta0", fmt(cfg.sched.eta0));
  line("schedule.eta_exponent", fmt(cfg.sched.eta_exponent));
  line("schedule.gamma", fmt(cfg.sched.gamma));
  line("schedule.ctilde", fmt(cfg.sched.ctilde));
  line("schedule.nu", fmt(cfg.sched.nu));
  return out;
}

std::vector<std::string> preset_names() {
  return {"dsgd",      "choco-sgd", "rcp-sgd-1", "rcp-sgd-2",
          "rcp-sgd-3", "rcp-sgd-4", "rcp-sgd-5", "unrcp-sgd"};
}

RunConfig preset(const std::string& name) {
  if (name == "dsgd") {
    RunConfig cfg;
    cfg.name = name;
    cfg.algorithm = Algorithm::dsgd;
    cfg.eta = 0.1;
    cfg.compressor.kind = CompressorKind::identity;
    return cfg;
  }
  if (name == "choco-sgd") {
    RunConfig cfg;
    cfg.name = name;
    cfg.algorithm = Algorithm::choco_sgd;
    cfg.eta = 0.1;
    cfg.gamma_consensus = 0.2;
    cfg.compressor.kind = CompressorKind::quantizer_b;
    cfg.compressor.bits_b = 2;
    return cfg;
  }
  // alpha_x = 0 leaves the resolution to the schedule default, and the run
  // header flags that it was defaulted.
  if (name == "rcp-sgd-1")
    return rcp_preset(name, CompressorKind::quantizer_b, 0.0, 5.0, 0.0);
  if (name == "rcp-sgd-2")
    return rcp_preset(name, CompressorKind::quantizer_b_improved, 0.0, 2.0,
                      0.8);
  if (name == "rcp-sgd-3")
    return rcp_preset(name, CompressorKind::sign_norm, 0.0, 2.0, 0.8);
  if (name == "rcp-sgd-4")
    return rcp_preset(name, CompressorKind::sign_norm_improved, 0.0, 2.0, 0.8);
  if (name == "rcp-sgd-5")
    return rcp_preset(name, CompressorKind::quantizer_b_improved, 0.2, 2.0,
                      0.8);
  if (name == "unrcp-sgd")
    return rcp_preset(name, CompressorKind::identity, 0.0, 2.0, 0.8);
  throw std::invalid_argument("unknown preset \"" + name + "\"");
}

Graph build_graph(const RunConfig& cfg) {
  if (cfg.graph_kind == "ring") return Graph::ring(cfg.graph_n);
  if (cfg.graph_kind == "torus")
    return Graph::torus(cfg.graph_rows, cfg.graph_cols);
  if (cfg.graph_kind == "complete") return Graph::complete(cfg.graph_n);
  if (cfg.graph_kind == "file")
    return Graph::from_edge_list_file(cfg.graph_path);
  bad_key("graph.kind", "unknown kind \"" + cfg.graph_kind + "\"");
}

BuiltProblem build_problem(const RunConfig& cfg, int n_agents) {
  BuiltProblem out;
  if (cfg.problem_kind == "logistic") {
    Dataset data =
        load_csv_dataset(cfg.problem_csv, cfg.label_column, cfg.normalize);
    const PartitionStrategy strategy = cfg.partition == "contiguous"
                                           ? PartitionStrategy::contiguous
                                           : PartitionStrategy::round_robin;
    auto shards =
        partition(data.size(), n_agents, strategy, cfg.partition_seed);
    out.dataset_hash = fnv1a_file(cfg.problem_csv);
    auto prob = std::make_unique<LogisticNonconvexProblem>(
        std::move(data), std::move(shards), cfg.lambda, cfg.alpha);
    if (cfg.f_star_override) {
      prob->set_f_star(*cfg.f_star_override);
    } else if (!cfg.f_star_cache.empty()) {
      if (auto cached = load_f_star_cache(cfg.f_star_cache, out.dataset_hash,
                                          cfg.lambda, cfg.alpha))
        prob->set_f_star(*cached);
    }
    out.problem = std::move(prob);
    return out;
  }
  if (cfg.problem_kind == "quadratic") {
    // The quadratic carries its own exact minimum; an override would be
    // silently ignored, so reject it instead.
    if (cfg.f_star_override)
      bad_key("problem.f_star", "only applies to problem.kind = logistic");
    out.problem = std::make_unique<PLQuadraticProblem>(make_pl_quadratic(
        n_agents, cfg.quad_d, cfg.quad_rank_deficit, cfg.quad_condition,
        cfg.quad_seed, cfg.quad_noise_std, cfg.quad_hetero, cfg.quad_scale));
    return out;
  }
  bad_key("problem.kind", "unknown kind \"" + cfg.problem_kind + "\"");
}

Schedule build_schedule(const RunConfig& cfg, int n_agents,
                        const Problem* problem) {
  ScheduleParams p = cfg.sched;
  p.T = cfg.T;
  p.n = n_agents;
  p.r = cfg.compressor.scale_r;
  const ScheduleRegime regime = regime_from_name(cfg.regime);
  if (regime == ScheduleRegime::theorem3 && p.nu <= 0 && problem) {
    if (auto nu = problem->pl_constant()) p.nu = *nu;
  }
  return Schedule::make(regime, p);
}

std::string default_out_dir() {
  const char* env = std::getenv("RCP_OUT_DIR");
  if (env && *env) return env;
  return "out";
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "step,consensus_err,grad_norm_sq,opt_gap,residual,bits_cum,wall_ms\n";
  char buf[224];
  for (const TraceRecord& rec : trace) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,", rec.step,
                  rec.consensus_err, rec.grad_norm_sq);
    out += buf;
    if (rec.opt_gap) {
      std::snprintf(buf, sizeof buf, "%.9g", *rec.opt_gap);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.9g,%llu,%.3f\n", rec.residual,
                  static_cast<unsigned long long>(rec.bits_cum), rec.wall_ms);
    out += buf;
  }
  return out;
}

std::string aggregate_csv(const std::vector<RunResult>& results) {
  std::string out =
      "step,consensus_err_mean,consensus_err_std,grad_norm_sq_mean,"
      "grad_norm_sq_std,opt_gap_mean,opt_gap_std,residual_mean,residual_std,"
      "bits_cum_mean,bits_cum_std,wall_ms_mean,wall_ms_std,count\n";
  std::size_t rows = 0;
  for (const RunResult& r : results) rows = std::max(rows, r.trace.size());
  for (std::size_t i = 0; i < rows; ++i) {
    long long step = 0;
    bool have_step = false;
    std::vector<double> ce, gn, gap, res, bits, wall;
    for (const RunResult& r : results) {
      if (r.trace.size() <= i) continue;  // diverged seeds stop contributing
      const TraceRecord& rec = r.trace[i];
      if (!have_step) {
        step = rec.step;
        have_step = true;
      }
      ce.push_back(rec.consensus_err);
      gn.push_back(rec.grad_norm_sq);
      if (rec.opt_gap) gap.push_back(*rec.opt_gap);
      res.push_back(rec.residual);
      bits.push_back(static_cast<double>(rec.bits_cum));
      wall.push_back(rec.wall_ms);
    }
    const Stats sce = stats_of(ce), sgn = stats_of(gn), sgap = stats_of(gap),
                sres = stats_of(res), sbits = stats_of(bits),
                swall = stats_of(wall);
    out += std::to_string(step) + ',' + g9(sce.mean) + ',' + g9(sce.std) +
           ',' + g9(sgn.mean) + ',' + g9(sgn.std) + ',';
    if (sgap.count > 0) out += g9(sgap.mean) + ',' + g9(sgap.std);
    else out += ",";
    out += ',' + g9(sres.mean) + ',' + g9(sres.std) + ',' + g9(sbits.mean) +
           ',' + g9(sbits.std) + ',' + g9(swall.mean) + ',' + g9(swall.std) +
           ',' + std::to_string(sce.count) + "\n";
  }
  return out;
}

ExecutionOutputs execute(const RunConfig& cfg) {
  validate_config(cfg);
  const Graph graph = build_graph(cfg);
  const BuiltProblem built = build_problem(cfg, graph.size());
  const Schedule schedule = build_schedule(cfg, graph.size(),
                                           built.problem.get());

  RunSpec spec;
  spec.graph = &graph;
  spec.problem = built.problem.get();
  spec.algorithm = cfg.algorithm;
  spec.schedule = schedule;
  spec.compressor = cfg.compressor;
  spec.eta = cfg.eta;
  spec.gamma_consensus = cfg.gamma_consensus;
  spec.T = cfg.T;
  spec.metrics_every = cfg.metrics_every;
  spec.batch = cfg.batch;
  spec.init_scale = cfg.init_scale;
  spec.replica_check = cfg.replica_check;

  // Seeds are independent runs over shared read-only state, so they go wide.
  ExecutionOutputs outs;
  outs.results.resize(cfg.seeds.size());
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                               cfg.seeds.size()));
  for (std::size_t base = 0; base < cfg.seeds.size(); base += workers) {
    const std::size_t end = std::min(cfg.seeds.size(), base + workers);
    std::vector<std::future<RunResult>> futures;
    for (std::size_t i = base; i < end; ++i)
      futures.push_back(std::async(
          std::launch::async,
          [&spec](std::uint64_t s) { return run_single(spec, s); },
          cfg.seeds[i]));
    for (std::size_t i = base; i < end; ++i)
      outs.results[i] = futures[i - base].get();
  }

  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    if (outs.results[i].diverged) outs.diverged_seeds.push_back(cfg.seeds[i]);

  const std::filesystem::path dir(cfg.out_dir.empty() ? default_out_dir()
                                                      : cfg.out_dir);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const std::filesystem::path p =
        dir / (cfg.name + "-seed" + std::to_string(cfg.seeds[i]) + ".csv");
    write_file(p, trace_csv(outs.results[i].trace));
    outs.trace_paths.push_back(p.string());
  }
  const std::filesystem::path agg = dir / (cfg.name + "-aggregate.csv");
  write_file(agg, aggregate_csv(outs.results));
  outs.aggregate_path = agg.string();
  const std::filesystem::path hdr = dir / (cfg.name + "-header.txt");
  write_file(hdr,
             header_text(cfg, graph, built, schedule, outs.diverged_seeds));
  outs.header_path = hdr.string();
  return outs;
}

}  // namespace rcp
