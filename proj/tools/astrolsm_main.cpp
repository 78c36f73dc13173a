#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "astrolsm.h"

namespace {

struct StageArgs {
  std::string config_path;
  std::string input;  // dataset dir, records csv or analysis dir depending on stage
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

void add_common(CLI::App* cmd, StageArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file (defaults used if omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  args.seed_opt = cmd->add_option("--seed", args.seed, "override the global seed");
  args.jobs_opt = cmd->add_option("--jobs", args.jobs, "worker threads (0 = all cores)")
                      ->envname("ASTROLSM_JOBS");
}

// Loads the config (or defaults), applies flag overrides. Returns NULL and
// prints the reason on failure.
alsm_config* make_config(const StageArgs& args, int& status) {
  alsm_config* cfg = nullptr;
  if (args.config_path.empty()) {
    cfg = alsm_config_default();
    if (!cfg) {
      std::fprintf(stderr, "error: out of memory\n");
      status = ALSM_ERR_INTERNAL;
      return nullptr;
    }
  } else {
    const alsm_status s = alsm_config_load(args.config_path.c_str(), &cfg);
    if (s != ALSM_OK) {
      std::fprintf(stderr, "error: %s\n", alsm_last_error());
      status = s;
      return nullptr;
    }
  }
  if (args.seed_opt && args.seed_opt->count() > 0) alsm_config_set_seed(cfg, args.seed);
  if (args.jobs_opt && args.jobs_opt->count() > 0) alsm_config_set_jobs(cfg, args.jobs);
  status = ALSM_OK;
  return cfg;
}

int report(alsm_status s) {
  if (s != ALSM_OK) std::fprintf(stderr, "error: %s\n", alsm_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquid state machine with astrocyte units: data generation, training, "
               "parameter sweep, statistics and figures"};
  app.set_version_flag("--version", alsm_version());
  app.require_subcommand(1);

  StageArgs gen_args, train_args, sweep_args, analyze_args, plot_args;

  CLI::App* gen = app.add_subcommand("generate", "generate a chaotic-attractor window dataset");
  add_common(gen, gen_args);

  CLI::App* train = app.add_subcommand("train", "train one readout on an existing dataset");
  add_common(train, train_args);
  train->add_option("--dataset", train_args.input, "dataset directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run the full size/proportion/seed grid");
  add_common(sweep, sweep_args);
  sweep->add_option("--dataset", sweep_args.input, "dataset directory")->required();

  CLI::App* analyze = app.add_subcommand("analyze", "slope, regression, sparse-fit and density "
                                                    "statistics over sweep records");
  add_common(analyze, analyze_args);
  analyze->add_option("--records", analyze_args.input, "records.csv from a sweep")->required();

  CLI::App* plot = app.add_subcommand("plot", "render SVG figures from an analysis directory");
  add_common(plot, plot_args);
  plot->add_option("--analysis", plot_args.input, "analysis output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ALSM_ERR_CONFIG;  // bad usage is a config error
  }

  StageArgs* args = nullptr;
  if (gen->parsed()) args = &gen_args;
  else if (train->parsed()) args = &train_args;
  else if (sweep->parsed()) args = &sweep_args;
  else if (analyze->parsed()) args = &analyze_args;
  else args = &plot_args;

  int status = ALSM_OK;
  alsm_config* cfg = make_config(*args, status);
  if (!cfg) return status;

  alsm_status s = ALSM_OK;
  if (gen->parsed())
    s = alsm_run_generate(cfg, args->out_dir.c_str());
  else if (train->parsed())
    s = alsm_run_train(cfg, args->input.c_str(), args->out_dir.c_str());
  else if (sweep->parsed())
    s = alsm_run_sweep(cfg, args->input.c_str(), args->out_dir.c_str());
  else if (analyze->parsed())
    s = alsm_run_analyze(cfg, args->input.c_str(), args->out_dir.c_str());
  else
    s = alsm_run_plot(cfg, args->input.c_str(), args->out_dir.c_str());

  alsm_config_free(cfg);
  return report(s);
}
