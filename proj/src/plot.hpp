#pragma once

#include <string>
#include <vector>

#include "analysis.hpp"
#include "records.hpp"

namespace alsm {

// Self-contained SVG figures; no external assets or scripts, one <svg> root
// per file so the output is valid standalone XML.

// Scatter of training learning-rate slope against total unit count, marker
// size encoding the A/N ratio. Diverged or non-finite records are skipped.
void plot_slope_vs_size(const std::string& path, const std::vector<RunRecord>& records);

// Actual vs. fitted panels for the two reconstruction targets.
void plot_lasso_reconstruction(const std::string& path, const LassoResult& train_fit,
                               const LassoResult& val_fit);

// Density heat map over (ratio, slope) with a vertical reference line at
// ratio 2.0 (id "ref-ratio-2") and a marker on the reported mode.
void plot_kde_heatmap(const std::string& path, const KdeResult& kde);

}  // namespace alsm
