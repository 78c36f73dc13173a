#pragma once

#include <string>

#include "config.hpp"

namespace alsm {

// Stage entry points behind the CLI subcommands. Each writes its artifacts
// plus the fully-resolved config into the output directory; failures surface
// as the exception types the C layer maps to exit codes.

void cmd_generate(const PipelineConfig& cfg, const std::string& out_dir);

// The reservoir spec a single-run training stage uses: config's reservoir
// section with the build seed derived from the global seed.
ReservoirSpec resolved_reservoir_spec(const PipelineConfig& cfg);

// Trains one readout on the configured reservoir; persists loss CSVs, the
// reservoir weights and the final checkpoint. Throws DivergenceError after
// persisting a partial history when training blows up.
void cmd_train(const PipelineConfig& cfg, const std::string& dataset_dir,
               const std::string& out_dir);

void cmd_sweep(const PipelineConfig& cfg, const std::string& dataset_dir,
               const std::string& out_dir);

// Slope/plateau regressions, sparse factor selection and the density map for
// an existing records.csv. Validates record counts before writing anything.
void cmd_analyze(const PipelineConfig& cfg, const std::string& records_path,
                 const std::string& out_dir);

void cmd_plot(const PipelineConfig& cfg, const std::string& analysis_dir,
              const std::string& out_dir);

}  // namespace alsm
