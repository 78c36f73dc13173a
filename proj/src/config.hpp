#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lorenz.hpp"
#include "mlp.hpp"
#include "reservoir.hpp"

namespace alsm {

struct TrainingSettings {
  int epochs = 500;
  int batch_size = 32;
  int hidden1 = 256;
  int hidden2 = 256;
  AdamConfig adam;
};

struct SweepSettings {
  std::vector<int> neuron_counts{10, 50, 200, 300, 400};
  std::vector<int> proportion_indices{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int seeds_per_cell = 2;
};

struct AnalysisSettings {
  int lambda_grid_size = 60;
  int kde_ratio_points = 201;
  int kde_slope_points = 201;
  int plateau_window = 5;
};

// One JSON document configures every stage; a single global seed feeds all
// derived random streams. Unknown keys anywhere in the document are an error
// so a typo cannot silently fall back to a default.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = all hardware threads
  std::string dataset_dir = "data";
  DatasetConfig lorenz;
  ReservoirSpec reservoir;
  TrainingSettings training;
  SweepSettings sweep;
  AnalysisSettings analysis;
};

void validate(const PipelineConfig& cfg);

PipelineConfig default_config();
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text, const std::string& origin);

// Serializes the fully-resolved config (all defaults filled in) plus the
// program version; every output directory gets one.
std::string resolved_config_json(const PipelineConfig& cfg);
void write_resolved_config(const std::string& dir, const PipelineConfig& cfg);

}  // namespace alsm
