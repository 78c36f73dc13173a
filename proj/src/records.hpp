#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alsm {

// One sweep cell: a reservoir build + readout training at a given network
// size, astrocyte proportion and seed, reduced to the summary statistics the
// analysis stage consumes.
struct RunRecord {
  int n_neurons = 0;
  int n_astrocytes = 0;
  int proportion_index = 0;  // n in A = round-half-even((3/4 + n/4) * N)
  int seed_index = 0;
  double ratio = 0.0;  // n_astrocytes / n_neurons, exact
  double train_slope = 0.0;
  double val_slope = 0.0;
  double train_plateau = 0.0;
  int train_plateau_epoch = 0;
  bool train_plateau_fallback = false;
  double val_plateau = 0.0;
  int val_plateau_epoch = 0;
  bool val_plateau_fallback = false;
  bool diverged = false;
  std::string loss_dir;  // directory holding this run's loss CSVs, relative to records.csv
};

// CSV round trip. Doubles are written with %.17g so a read-back record is
// bit-identical; NaNs (diverged runs) survive the trip as "nan".
void write_records_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(const std::string& path);

}  // namespace alsm
