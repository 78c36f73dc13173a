#pragma once

#include <cstdint>
#include <vector>

#include "lorenz.hpp"
#include "mlp.hpp"
#include "reservoir.hpp"

namespace alsm {

struct TrainOptions {
  int epochs = 500;
  int batch_size = 32;
  int hidden1 = 256;
  int hidden2 = 256;
  AdamConfig adam;
  std::uint64_t seed = 0;
  int jobs = 1;  // worker threads for the per-window feature precompute
};

struct LossHistory {
  std::vector<double> batch_losses;  // one entry per optimizer step, in order
  std::vector<int> batch_epochs;     // epoch index of each batch loss
  std::vector<double> epoch_train;   // mean of that epoch's batch losses
  std::vector<double> epoch_val;     // MSE over the whole validation split (NaN if empty)
  bool diverged = false;
};

struct TrainResult {
  MlpParams params;
  LossHistory history;
};

// Computes reservoir features for every window input (normalized with the
// dataset statistics). Pure per window; parallel across windows.
std::vector<Eigen::VectorXd> precompute_features(const ReservoirWeights& weights,
                                                 const ReservoirSpec& spec,
                                                 const std::vector<WindowPair>& windows,
                                                 const NormStats& norm, int jobs);

// Trains the readout with Adam on MSE against normalized targets. Reservoir
// weights are read-only; features are computed once per window up front.
// Batches are formed from a fresh seeded shuffle each epoch; a trailing
// partial batch is kept and its loss averaged over its actual size. On a
// non-finite loss the run stops and the history is flagged diverged.
TrainResult train(const ReservoirWeights& weights, const ReservoirSpec& spec,
                  const Dataset& dataset, const TrainOptions& opts);

}  // namespace alsm
