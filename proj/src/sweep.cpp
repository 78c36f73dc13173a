#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "analysis.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "reservoir.hpp"
#include "rng.hpp"
#include "trainer.hpp"

namespace alsm {

int astrocyte_count(int n_neurons, int proportion_index) {
  if (proportion_index < 1 || proportion_index > 10)
    throw ConfigError("proportion index must be in 1..10");
  if (n_neurons < 1) throw ConfigError("neuron count must be positive");
  const double raw = (0.75 + 0.25 * proportion_index) * n_neurons;
  // round half to even
  const double floor_v = std::floor(raw);
  const double frac = raw - floor_v;
  double rounded;
  if (frac > 0.5)
    rounded = floor_v + 1.0;
  else if (frac < 0.5)
    rounded = floor_v;
  else
    rounded = (std::fmod(floor_v, 2.0) == 0.0) ? floor_v : floor_v + 1.0;
  return std::max(1, static_cast<int>(rounded));
}

std::vector<SweepCell> enumerate_cells(const SweepSettings& settings) {
  std::vector<int> counts = settings.neuron_counts;
  std::vector<int> indices = settings.proportion_indices;
  std::sort(counts.begin(), counts.end());
  std::sort(indices.begin(), indices.end());

  std::vector<SweepCell> cells;
  cells.reserve(counts.size() * indices.size() *
                static_cast<std::size_t>(settings.seeds_per_cell));
  for (const int n_neurons : counts)
    for (const int prop : indices)
      for (int s = 0; s < settings.seeds_per_cell; ++s)
        cells.push_back(SweepCell{n_neurons, prop, s});
  return cells;
}

namespace {

std::string cell_dir_name(const SweepCell& cell) {
  return "N" + std::to_string(cell.n_neurons) + "_n" + std::to_string(cell.proportion_index) +
         "_s" + std::to_string(cell.seed_index);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<RunRecord> run_sweep(const PipelineConfig& cfg, const Dataset& dataset,
                                 const std::string& out_dir) {
  // Slope needs 10 epochs, the plateau rule needs 20; refuse configs where
  // every record would come out all-NaN.
  if (cfg.training.epochs < 20)
    throw ConfigError("sweep needs training.epochs >= 20 for slope and plateau statistics");

  const std::vector<SweepCell> cells = enumerate_cells(cfg.sweep);
  std::vector<RunRecord> records(cells.size());
  ensure_dir(out_dir);

  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    const SweepCell& cell = cells[i];
    const int n_astro = astrocyte_count(cell.n_neurons, cell.proportion_index);
    const std::uint64_t cell_seed =
        mix_seed(mix_seed(mix_seed(mix_seed(cfg.seed, 0xce11), cell.n_neurons),
                          cell.proportion_index),
                 cell.seed_index);

    RunRecord rec;
    rec.n_neurons = cell.n_neurons;
    rec.n_astrocytes = n_astro;
    rec.proportion_index = cell.proportion_index;
    rec.seed_index = cell.seed_index;
    rec.ratio = static_cast<double>(n_astro) / cell.n_neurons;
    rec.loss_dir = cell_dir_name(cell);

    ReservoirSpec spec = cfg.reservoir;
    spec.n_neurons = cell.n_neurons;
    spec.n_astrocytes = n_astro;
    spec.seed = mix_seed(cell_seed, 0x5eed);

    TrainOptions opts;
    opts.epochs = cfg.training.epochs;
    opts.batch_size = cfg.training.batch_size;
    opts.hidden1 = cfg.training.hidden1;
    opts.hidden2 = cfg.training.hidden2;
    opts.adam = cfg.training.adam;
    opts.seed = mix_seed(cell_seed, 0x7a11);
    opts.jobs = 1;  // the pool is already saturated across cells

    LossHistory history;
    bool diverged = false;
    try {
      const ReservoirWeights weights = build(spec);
      TrainResult trained = train(weights, spec, dataset, opts);
      history = std::move(trained.history);
      diverged = history.diverged;
    } catch (const DivergenceError&) {
      diverged = true;
    }

    const std::string run_dir = out_dir + "/" + rec.loss_dir;
    ensure_dir(run_dir);
    write_batch_losses_csv(run_dir + "/batch_losses.csv", history);
    write_epoch_losses_csv(run_dir + "/epoch_losses.csv", history);

    if (diverged) {
      rec.diverged = true;
      rec.train_slope = rec.val_slope = kNaN;
      rec.train_plateau = rec.val_plateau = kNaN;
    } else {
      rec.train_slope = learning_rate(history.epoch_train);
      rec.val_slope = learning_rate(history.epoch_val);
      const PlateauResult pt = plateau_loss(history.epoch_train, cfg.analysis.plateau_window);
      rec.train_plateau = pt.mean;
      rec.train_plateau_epoch = pt.start_epoch;
      rec.train_plateau_fallback = pt.fallback;
      const PlateauResult pv = plateau_loss(history.epoch_val, cfg.analysis.plateau_window);
      rec.val_plateau = pv.mean;
      rec.val_plateau_epoch = pv.start_epoch;
      rec.val_plateau_fallback = pv.fallback;
    }
    records[i] = std::move(rec);
  });

  return records;
}

}  // namespace alsm
