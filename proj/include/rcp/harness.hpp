#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcp/algorithms.hpp"
#include "rcp/compress.hpp"
#include "rcp/metrics.hpp"
#include "rcp/problems.hpp"
#include "rcp/topology.hpp"

namespace rcp {

// Flat experiment description. Every field maps to one dotted key in the
// `key = value` config format; parse_config and serialize_config round-trip.
struct RunConfig {
  std::string name = "run";  // file prefix, [A-Za-z0-9_-]+
  Algorithm algorithm = Algorithm::rcp_sgd;
  long long T = 500;
  std::vector<std::uint64_t> seeds = {1};
  int metrics_every = 10;
  int batch = 0;  // 0 runs full local gradients
  double init_scale = 0.5;
  bool replica_check = false;
  std::string out_dir;  // empty falls back to $RCP_OUT_DIR, then "out"
  double eta = 0.1;              // dsgd / choco step size
  double gamma_consensus = 0.2;  // choco gossip weight

  std::string graph_kind = "ring";  // ring | torus | complete | file
  int graph_n = 10;
  int graph_rows = 3;
  int graph_cols = 3;
  std::string graph_path;

  std::string problem_kind = "logistic";  // logistic | quadratic
  std::string problem_csv = "data/breast_cancer.csv";
  int label_column = 0;
  bool normalize = true;
  double lambda = 1e-3;
  double alpha = 1.0;
  std::string partition = "round_robin";  // or contiguous
  std::uint64_t partition_seed = 42;
  std::optional<double> f_star_override;
  std::string f_star_cache;  // empty disables the lookup
  int quad_d = 10;
  int quad_rank_deficit = 0;
  double quad_condition = 10.0;
  std::uint64_t quad_seed = 1;
  double quad_noise_std = 0.0;
  double quad_hetero = 0.3;
  double quad_scale = 1.0;

  CompressorSpec compressor;

  std::string regime = "custom";
  ScheduleParams sched = [] {
    ScheduleParams p;
    p.gamma = 1.0;
    p.omega = 1.0;
    p.eta0 = 0.1;
    p.h0 = 0.9;
    p.alpha_x = 0.5;
    return p;
  }();
};

// Parses `key = value` lines; '#' starts a comment line, unknown keys are
// rejected, and every range violation names the offending key. A text that is
// just a preset name resolves to that preset; a `preset = <name>` first line
// loads the preset and lets later keys override it.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::string serialize_config(const RunConfig& cfg);

// Built-in parameterizations for the standard comparison runs.
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

Graph build_graph(const RunConfig& cfg);

struct BuiltProblem {
  std::unique_ptr<Problem> problem;
  std::uint64_t dataset_hash = 0;  // FNV-1a of the csv file, 0 for synthetic
};

BuiltProblem build_problem(const RunConfig& cfg, int n_agents);

// Resolves schedule-level fields that mirror run-level ones (T, n, r) and the
// theorem3 PL constant before validation.
Schedule build_schedule(const RunConfig& cfg, int n_agents,
                        const Problem* problem);

std::string default_out_dir();

std::string trace_csv(const std::vector<TraceRecord>& trace);

// Mean/std per recorded step across seeds. Divergent seeds contribute until
// their truncation point; the count column says how many seeds reached a step.
std::string aggregate_csv(const std::vector<RunResult>& results);

struct ExecutionOutputs {
  std::vector<std::string> trace_paths;  // one per seed, seed order
  std::string aggregate_path;
  std::string header_path;
  std::vector<std::uint64_t> diverged_seeds;
  std::vector<RunResult> results;
};

// Runs every seed (in parallel), writes one trace CSV per seed plus the
// aggregate CSV and the resolved-parameter header file.
ExecutionOutputs execute(const RunConfig& cfg);

}  // namespace rcp
