#include <CLI11.hpp>

#include "d2dsim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"d2dsim: slotted-time simulator for device-aware routing and "
               "scheduling in multi-hop D2D networks"};
  app.require_subcommand(1);

  d2dsim::CliOptions opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "experiment config file")
        ->required();
    cmd->add_option("--override", opts.overrides,
                    "key.path=value override (repeatable)");
    cmd->add_option("--out", opts.out_dir,
                    "output directory (default: $D2DSIM_OUT or .)");
  };

  CLI::App* run = app.add_subcommand("run", "single experiment run");
  add_common(run);
  run->add_flag("--trace", opts.trace, "write per-slot trace files");
  run->add_flag("--parallel", opts.parallel, "run replications in parallel");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(sweep);
  sweep->add_option("--param", opts.sweep_param,
                    "swept config path (overrides config sweep section)");
  sweep->add_option("--values", opts.sweep_values, "swept values");
  sweep->add_flag("--parallel", opts.parallel, "run replications in parallel");

  CLI::App* oracle = app.add_subcommand("oracle", "small-instance ground truth");
  add_common(oracle);
  oracle->add_option("what", opts.oracle_what, "static | region | sets")
      ->required();
  oracle->add_option("--rates", opts.oracle_rates,
                     "rate vector for region membership");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return d2dsim::cmd_run(opts);
  if (sweep->parsed()) return d2dsim::cmd_sweep(opts);
  return d2dsim::cmd_oracle(opts);
}
