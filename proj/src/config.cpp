#include "config.hpp"

#include <set>

#include "json.hpp"

#include "errors.hpp"
#include "io.hpp"
#include "version.hpp"

namespace alsm {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void parse_lorenz(const json& j, DatasetConfig& cfg) {
  require_object(j, "lorenz");
  reject_unknown_keys(j,
                      {"dt", "transient_steps", "n_trajectories", "windows_per_trajectory",
                       "train_fraction", "val_fraction"},
                      "lorenz");
  read_field(j, "dt", cfg.dt, "lorenz");
  read_field(j, "transient_steps", cfg.transient_steps, "lorenz");
  read_field(j, "n_trajectories", cfg.n_trajectories, "lorenz");
  read_field(j, "windows_per_trajectory", cfg.windows_per_trajectory, "lorenz");
  read_field(j, "train_fraction", cfg.fractions.train, "lorenz");
  read_field(j, "val_fraction", cfg.fractions.val, "lorenz");
  cfg.fractions.test = 1.0 - cfg.fractions.train - cfg.fractions.val;
}

void parse_unit(const json& j, const std::string& where, double& beta, double* alpha,
                double& u_thr) {
  require_object(j, where);
  std::set<std::string> allowed{"beta", "u_thr"};
  if (alpha) allowed.insert("alpha");
  reject_unknown_keys(j, allowed, where);
  read_field(j, "beta", beta, where);
  if (alpha) read_field(j, "alpha", *alpha, where);
  read_field(j, "u_thr", u_thr, where);
}

void parse_reservoir(const json& j, ReservoirSpec& spec) {
  require_object(j, "reservoir");
  reject_unknown_keys(j,
                      {"n_neurons", "n_astrocytes", "presentations", "weight_scale",
                       "self_connections", "neuron", "astrocyte"},
                      "reservoir");
  read_field(j, "n_neurons", spec.n_neurons, "reservoir");
  read_field(j, "n_astrocytes", spec.n_astrocytes, "reservoir");
  read_field(j, "presentations", spec.presentations, "reservoir");
  read_field(j, "weight_scale", spec.weight_scale, "reservoir");
  read_field(j, "self_connections", spec.self_connections, "reservoir");
  if (j.contains("neuron"))
    parse_unit(j.at("neuron"), "reservoir.neuron", spec.neuron.beta, nullptr, spec.neuron.u_thr);
  if (j.contains("astrocyte"))
    parse_unit(j.at("astrocyte"), "reservoir.astrocyte", spec.astrocyte.beta,
               &spec.astrocyte.alpha, spec.astrocyte.u_thr);
}

void parse_training(const json& j, TrainingSettings& t) {
  require_object(j, "training");
  reject_unknown_keys(
      j, {"epochs", "batch_size", "hidden1", "hidden2", "lr", "beta1", "beta2", "epsilon"},
      "training");
  read_field(j, "epochs", t.epochs, "training");
  read_field(j, "batch_size", t.batch_size, "training");
  read_field(j, "hidden1", t.hidden1, "training");
  read_field(j, "hidden2", t.hidden2, "training");
  read_field(j, "lr", t.adam.lr, "training");
  read_field(j, "beta1", t.adam.beta1, "training");
  read_field(j, "beta2", t.adam.beta2, "training");
  read_field(j, "epsilon", t.adam.epsilon, "training");
}

void parse_sweep(const json& j, SweepSettings& s) {
  require_object(j, "sweep");
  reject_unknown_keys(j, {"neuron_counts", "proportion_indices", "seeds_per_cell"}, "sweep");
  read_field(j, "neuron_counts", s.neuron_counts, "sweep");
  read_field(j, "proportion_indices", s.proportion_indices, "sweep");
  read_field(j, "seeds_per_cell", s.seeds_per_cell, "sweep");
}

void parse_analysis(const json& j, AnalysisSettings& a) {
  require_object(j, "analysis");
  reject_unknown_keys(
      j, {"lambda_grid_size", "kde_ratio_points", "kde_slope_points", "plateau_window"},
      "analysis");
  read_field(j, "lambda_grid_size", a.lambda_grid_size, "analysis");
  read_field(j, "kde_ratio_points", a.kde_ratio_points, "analysis");
  read_field(j, "kde_slope_points", a.kde_slope_points, "analysis");
  read_field(j, "plateau_window", a.plateau_window, "analysis");
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  if (cfg.lorenz.dt <= 0.0) throw ConfigError("lorenz.dt must be positive");
  if (cfg.lorenz.transient_steps < 0) throw ConfigError("lorenz.transient_steps must be >= 0");
  if (cfg.lorenz.n_trajectories < 1) throw ConfigError("lorenz.n_trajectories must be >= 1");
  if (cfg.lorenz.windows_per_trajectory < 1)
    throw ConfigError("lorenz.windows_per_trajectory must be >= 1");
  const auto& f = cfg.lorenz.fractions;
  if (f.train < 0.0 || f.val < 0.0 || f.train + f.val > 1.0)
    throw ConfigError("lorenz split fractions must be non-negative and sum to at most 1");
  validate(cfg.reservoir);
  if (cfg.training.epochs < 1) throw ConfigError("training.epochs must be >= 1");
  if (cfg.training.batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (cfg.training.hidden1 < 1 || cfg.training.hidden2 < 1)
    throw ConfigError("training hidden sizes must be >= 1");
  if (cfg.training.adam.lr < 0.0) throw ConfigError("training.lr must be >= 0");
  for (const int n : cfg.sweep.neuron_counts)
    if (n < 2) throw ConfigError("sweep.neuron_counts entries must be >= 2");
  for (const int n : cfg.sweep.proportion_indices)
    if (n < 1 || n > 10) throw ConfigError("sweep.proportion_indices entries must be in 1..10");
  if (cfg.sweep.seeds_per_cell < 1) throw ConfigError("sweep.seeds_per_cell must be >= 1");
  if (cfg.analysis.lambda_grid_size < 1)
    throw ConfigError("analysis.lambda_grid_size must be >= 1");
  if (cfg.analysis.kde_ratio_points < 2 || cfg.analysis.kde_slope_points < 2)
    throw ConfigError("analysis KDE grid needs at least 2 points per axis");
  if (cfg.analysis.plateau_window < 1) throw ConfigError("analysis.plateau_window must be >= 1");
}

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config(const std::string& json_text, const std::string& origin) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(origin + ": invalid JSON");
  require_object(j, origin);
  // "version" is accepted so a resolved config written by a run directory can
  // be fed straight back in; its value is provenance only.
  reject_unknown_keys(j,
                      {"version", "seed", "jobs", "dataset_dir", "lorenz", "reservoir", "training",
                       "sweep", "analysis"},
                      origin);

  PipelineConfig cfg;
  read_field(j, "seed", cfg.seed, origin);
  read_field(j, "jobs", cfg.jobs, origin);
  read_field(j, "dataset_dir", cfg.dataset_dir, origin);
  if (j.contains("lorenz")) parse_lorenz(j.at("lorenz"), cfg.lorenz);
  if (j.contains("reservoir")) parse_reservoir(j.at("reservoir"), cfg.reservoir);
  if (j.contains("training")) parse_training(j.at("training"), cfg.training);
  if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg.sweep);
  if (j.contains("analysis")) parse_analysis(j.at("analysis"), cfg.analysis);
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

std::string resolved_config_json(const PipelineConfig& cfg) {
  json j;
  j["version"] = ALSM_VERSION_STRING;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["dataset_dir"] = cfg.dataset_dir;
  j["lorenz"] = {{"dt", cfg.lorenz.dt},
                 {"transient_steps", cfg.lorenz.transient_steps},
                 {"n_trajectories", cfg.lorenz.n_trajectories},
                 {"windows_per_trajectory", cfg.lorenz.windows_per_trajectory},
                 {"train_fraction", cfg.lorenz.fractions.train},
                 {"val_fraction", cfg.lorenz.fractions.val}};
  j["reservoir"] = {{"n_neurons", cfg.reservoir.n_neurons},
                    {"n_astrocytes", cfg.reservoir.n_astrocytes},
                    {"presentations", cfg.reservoir.presentations},
                    {"weight_scale", cfg.reservoir.weight_scale},
                    {"self_connections", cfg.reservoir.self_connections},
                    {"neuron",
                     {{"beta", cfg.reservoir.neuron.beta}, {"u_thr", cfg.reservoir.neuron.u_thr}}},
                    {"astrocyte",
                     {{"beta", cfg.reservoir.astrocyte.beta},
                      {"alpha", cfg.reservoir.astrocyte.alpha},
                      {"u_thr", cfg.reservoir.astrocyte.u_thr}}}};
  j["training"] = {{"epochs", cfg.training.epochs},
                   {"batch_size", cfg.training.batch_size},
                   {"hidden1", cfg.training.hidden1},
                   {"hidden2", cfg.training.hidden2},
                   {"lr", cfg.training.adam.lr},
                   {"beta1", cfg.training.adam.beta1},
                   {"beta2", cfg.training.adam.beta2},
                   {"epsilon", cfg.training.adam.epsilon}};
  j["sweep"] = {{"neuron_counts", cfg.sweep.neuron_counts},
                {"proportion_indices", cfg.sweep.proportion_indices},
                {"seeds_per_cell", cfg.sweep.seeds_per_cell}};
  j["analysis"] = {{"lambda_grid_size", cfg.analysis.lambda_grid_size},
                   {"kde_ratio_points", cfg.analysis.kde_ratio_points},
                   {"kde_slope_points", cfg.analysis.kde_slope_points},
                   {"plateau_window", cfg.analysis.plateau_window}};
  return j.dump(2) + "\n";
}

void write_resolved_config(const std::string& dir, const PipelineConfig& cfg) {
  ensure_dir(dir);
  write_text_file(dir + "/config.resolved.json", resolved_config_json(cfg));
}

}  // namespace alsm
