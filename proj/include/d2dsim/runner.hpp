#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "d2dsim/dcc.hpp"
#include "d2dsim/engine.hpp"
#include "d2dsim/oracle.hpp"

namespace d2dsim {

// Experiment front end: config documents, parameter sweeps, CSV output.
// All schema errors carry the offending key in the exception message.

struct SweepSpec {
  std::string param;  // dotted path, '*' matches every array element
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string model;  // "dars" | "dcc"
  SimConfig sim;      // dars family
  int reps = 1;
  DccRunConfig dcc;   // dcc family
  std::optional<SweepSpec> sweep;
  nlohmann::json resolved;  // full document with every default explicit
};

nlohmann::json load_config_file(const std::string& path);

// "a.b.2.c=value" — value parsed as JSON when possible, string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Dotted-path assignment used by sweeps; '*' fans out over arrays.
void set_json_path(nlohmann::json& doc, const std::string& path,
                   const nlohmann::json& value);

// Schema check + default fill. Unknown keys are rejected.
nlohmann::json resolve_config(const nlohmann::json& raw);

ExperimentConfig parse_config(const nlohmann::json& resolved);

std::string config_digest_hex(const nlohmann::json& resolved);

struct ResultRow {
  std::string config_digest;
  std::string policy;
  std::string sweep_param;  // "-" when not sweeping
  double sweep_value = 0.0;
  bool has_sweep = false;
  int rep = 0;
  double total_goodput = 0.0;
  double avg_backlog = 0.0;
  double utility = 0.0;
  std::uint64_t losses = 0;
  std::vector<double> per_flow;  // goodput per flow / admitted per device
  std::uint64_t trace_digest = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // sorted by (sweep index, rep)
  std::vector<std::string> per_flow_headers;
};

// Runs the experiment: every sweep value (or just the base config) times
// `reps` replications. Deterministic row content regardless of `parallel`.
ExperimentResult execute_experiment(const ExperimentConfig& config,
                                    bool parallel = false);

std::string rows_to_csv(const ExperimentResult& result);

// Combined digest over per-replication trace digests; order-independent
// by construction (indexed fold).
std::uint64_t combined_digest(const std::vector<std::uint64_t>& digests);

// CLI entry points; return process exit codes and print results/errors.
struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;  // empty: $D2DSIM_OUT or "."
  bool trace = false;
  bool parallel = false;
  // sweep command:
  std::string sweep_param;
  std::vector<double> sweep_values;
  // oracle command:
  std::string oracle_what;  // "static" | "region" | "sets"
  std::vector<double> oracle_rates;
};

int cmd_run(const CliOptions& opts);
int cmd_sweep(const CliOptions& opts);
int cmd_oracle(const CliOptions& opts);

}  // namespace d2dsim
