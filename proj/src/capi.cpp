#include "astrolsm.h"

#include <new>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "reservoir.hpp"
#include "version.hpp"

struct alsm_config {
  alsm::PipelineConfig cfg;
};

struct alsm_dataset {
  alsm::Dataset data;
};

struct alsm_reservoir {
  alsm::ReservoirSpec spec;
  alsm::ReservoirWeights weights;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
alsm_status guarded(Fn&& fn) {
  try {
    fn();
    return ALSM_OK;
  } catch (const alsm::ConfigError& e) {
    g_last_error = e.what();
    return ALSM_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return ALSM_ERR_CONFIG;
  } catch (const alsm::IoError& e) {
    g_last_error = e.what();
    return ALSM_ERR_IO;
  } catch (const alsm::DivergenceError& e) {
    g_last_error = e.what();
    return ALSM_ERR_DIVERGED;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ALSM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ALSM_ERR_INTERNAL;
  }
}

alsm_status require(bool ok, const char* message) {
  if (ok) return ALSM_OK;
  g_last_error = message;
  return ALSM_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* alsm_version(void) { return ALSM_VERSION_STRING; }

const char* alsm_last_error(void) { return g_last_error.c_str(); }

alsm_config* alsm_config_default(void) { return new (std::nothrow) alsm_config{}; }

alsm_status alsm_config_load(const char* path, alsm_config** out) {
  if (alsm_status s = require(path && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] { *out = new alsm_config{alsm::load_config(path)}; });
}

alsm_status alsm_config_parse(const char* json_text, alsm_config** out) {
  if (alsm_status s = require(json_text && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] { *out = new alsm_config{alsm::parse_config(json_text, "config")}; });
}

void alsm_config_set_seed(alsm_config* cfg, uint64_t seed) {
  if (cfg) cfg->cfg.seed = seed;
}

void alsm_config_set_jobs(alsm_config* cfg, int jobs) {
  if (cfg) cfg->cfg.jobs = jobs;
}

void alsm_config_free(alsm_config* cfg) { delete cfg; }

alsm_status alsm_run_generate(const alsm_config* cfg, const char* out_dir) {
  if (alsm_status s = require(cfg && out_dir, "NULL argument")) return s;
  return guarded([&] { alsm::cmd_generate(cfg->cfg, out_dir); });
}

alsm_status alsm_run_train(const alsm_config* cfg, const char* dataset_dir,
                           const char* out_dir) {
  if (alsm_status s = require(cfg && dataset_dir && out_dir, "NULL argument")) return s;
  return guarded([&] { alsm::cmd_train(cfg->cfg, dataset_dir, out_dir); });
}

alsm_status alsm_run_sweep(const alsm_config* cfg, const char* dataset_dir,
                           const char* out_dir) {
  if (alsm_status s = require(cfg && dataset_dir && out_dir, "NULL argument")) return s;
  return guarded([&] { alsm::cmd_sweep(cfg->cfg, dataset_dir, out_dir); });
}

alsm_status alsm_run_analyze(const alsm_config* cfg, const char* records_csv,
                             const char* out_dir) {
  if (alsm_status s = require(cfg && records_csv && out_dir, "NULL argument")) return s;
  return guarded([&] { alsm::cmd_analyze(cfg->cfg, records_csv, out_dir); });
}

alsm_status alsm_run_plot(const alsm_config* cfg, const char* analysis_dir,
                          const char* out_dir) {
  if (alsm_status s = require(cfg && analysis_dir && out_dir, "NULL argument")) return s;
  return guarded([&] { alsm::cmd_plot(cfg->cfg, analysis_dir, out_dir); });
}

alsm_status alsm_dataset_open(const char* dir, alsm_dataset** out) {
  if (alsm_status s = require(dir && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] { *out = new alsm_dataset{alsm::load_dataset(dir)}; });
}

void alsm_dataset_close(alsm_dataset* dataset) { delete dataset; }

alsm_status alsm_dataset_counts(const alsm_dataset* dataset, size_t* train, size_t* val,
                                size_t* test) {
  if (alsm_status s = require(dataset != nullptr, "NULL dataset")) return s;
  if (train) *train = dataset->data.train.size();
  if (val) *val = dataset->data.val.size();
  if (test) *test = dataset->data.test.size();
  return ALSM_OK;
}

alsm_status alsm_reservoir_create(const alsm_config* cfg, alsm_reservoir** out) {
  if (alsm_status s = require(cfg && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    const alsm::ReservoirSpec spec = alsm::resolved_reservoir_spec(cfg->cfg);
    *out = new alsm_reservoir{spec, alsm::build(spec)};
  });
}

void alsm_reservoir_destroy(alsm_reservoir* reservoir) { delete reservoir; }

int alsm_reservoir_feature_dim(const alsm_reservoir* reservoir) {
  return reservoir ? reservoir->spec.n_neurons : -1;
}

alsm_status alsm_reservoir_features(const alsm_reservoir* reservoir, const double* window,
                                    size_t window_len, double* features, size_t features_len) {
  if (alsm_status s = require(reservoir && window && features, "NULL argument")) return s;
  if (alsm_status s = require(window_len == static_cast<size_t>(alsm::kInputDim),
                              "window must hold 50x3 doubles"))
    return s;
  if (alsm_status s = require(
          features_len == static_cast<size_t>(reservoir->spec.n_neurons),
          "features buffer must match the feature dimension"))
    return s;
  return guarded([&] {
    Eigen::MatrixXd w(alsm::kHalfWindow, alsm::kStateDim);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = window[static_cast<size_t>(r * w.cols() + c)];
    const alsm::ReservoirActivity activity = alsm::run(reservoir->weights, reservoir->spec, w);
    for (Eigen::Index i = 0; i < activity.features.size(); ++i)
      features[static_cast<size_t>(i)] = activity.features[i];
  });
}

}  // extern "C"
