#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "records.hpp"

namespace alsm {

// Astrocyte count for proportion index n in 1..10: the factor (3/4 + n/4)
// spans 1.0x to 3.25x the neuron count. Half-to-even rounding keeps the
// result an integer without a systematic up or down bias.
int astrocyte_count(int n_neurons, int proportion_index);

struct SweepCell {
  int n_neurons = 0;
  int proportion_index = 0;
  int seed_index = 0;
};

// Full grid, sorted by (n_neurons, proportion_index, seed_index). Result
// order of the sweep follows this enumeration regardless of which worker
// finishes first.
std::vector<SweepCell> enumerate_cells(const SweepSettings& settings);

// Runs every cell against one shared dataset: build reservoir, train the
// readout, reduce the loss history to slope and plateau statistics. Each
// run's loss CSVs land in <out_dir>/<cell dir>/. A diverged run produces a
// flagged record with NaN statistics instead of failing the sweep.
std::vector<RunRecord> run_sweep(const PipelineConfig& cfg, const Dataset& dataset,
                                 const std::string& out_dir);

}  // namespace alsm
