#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz.hpp"
#include "mlp.hpp"
#include "reservoir.hpp"
#include "trainer.hpp"

namespace alsm {

// Shortest exact decimal for a double is overkill to hand-roll; %.17g is
// enough to round-trip and keeps every writer in the project consistent.
std::string fmt_g17(double v);

// strtod with a full-consumption check ("nan"/"inf" accepted).
double parse_double(const std::string& text);

void ensure_dir(const std::string& dir);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Flat little-endian float64 blobs. Byte order is normalized on foreign-endian
// hosts so files are portable.
void write_f64_blob(const std::string& path, const std::vector<double>& values);
std::vector<double> read_f64_blob(const std::string& path);

// Dataset persistence: manifest.json (counts, shapes, normalization,
// trajectory parameters, seed) + windows.f64 with every window concatenated
// in split order, each 50x3 block row-major.
void save_dataset(const std::string& dir, const Dataset& dataset);
Dataset load_dataset(const std::string& dir);

// Reservoir weight cache. Files are keyed by seed and a hash of the
// structural fields so a stale blob can never be mistaken for the requested
// build.
std::string reservoir_cache_path(const std::string& dir, const ReservoirSpec& spec);
void save_reservoir_weights(const std::string& dir, const ReservoirSpec& spec,
                            const ReservoirWeights& weights);
std::optional<ReservoirWeights> try_load_reservoir_weights(const std::string& dir,
                                                           const ReservoirSpec& spec);

// Readout checkpoint: <prefix>.json (shape) + <prefix>.f64 (w1,w2,w3 row-major,
// then b1,b2,b3).
void save_mlp(const std::string& prefix, const MlpParams& params);
MlpParams load_mlp(const std::string& prefix);

// Loss history CSVs: per-batch (epoch,batch_index,train_loss) and per-epoch
// (epoch,train_loss,val_loss).
void write_batch_losses_csv(const std::string& path, const LossHistory& history);
void write_epoch_losses_csv(const std::string& path, const LossHistory& history);
std::pair<std::vector<double>, std::vector<double>> read_epoch_losses_csv(
    const std::string& path);

}  // namespace alsm
