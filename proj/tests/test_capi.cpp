#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "astrolsm.h"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("alsm_capi_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string sub(const char* name) const { return (path / name).string(); }
};

// Small but complete pipeline: 2 trajectories x 3 windows, tiny reservoir,
// 12 sweep cells so the analysis stage has enough usable records.
const char* kPipelineJson = R"({
  "seed": 5,
  "jobs": 2,
  "lorenz": {"n_trajectories": 2, "windows_per_trajectory": 3},
  "reservoir": {"n_neurons": 6, "n_astrocytes": 8, "presentations": 10, "weight_scale": 1.5},
  "training": {"epochs": 20, "batch_size": 4, "hidden1": 10, "hidden2": 10},
  "sweep": {"neuron_counts": [4, 6], "proportion_indices": [1, 5, 9], "seeds_per_cell": 2}
})";

struct ConfigHandle {
  alsm_config* ptr = nullptr;
  explicit ConfigHandle(const char* json_text) { REQUIRE(alsm_config_parse(json_text, &ptr) == ALSM_OK); }
  ~ConfigHandle() { alsm_config_free(ptr); }
};

}  // namespace

TEST_CASE("version and status codes are stable") {
  CHECK(std::string(alsm_version()) == "0.1.0");
  CHECK(ALSM_OK == 0);
  CHECK(ALSM_ERR_CONFIG == 2);
  CHECK(ALSM_ERR_IO == 3);
  CHECK(ALSM_ERR_DIVERGED == 4);
  CHECK(ALSM_ERR_INTERNAL == 5);
}

TEST_CASE("config handles follow the create/parse/free lifecycle") {
  alsm_config* defaults = alsm_config_default();
  REQUIRE(defaults != nullptr);
  alsm_config_set_seed(defaults, 99);
  alsm_config_set_jobs(defaults, 1);
  alsm_config_free(defaults);

  alsm_config* parsed = nullptr;
  CHECK(alsm_config_parse("{}", &parsed) == ALSM_OK);
  REQUIRE(parsed != nullptr);
  alsm_config_free(parsed);

  // every destructor-style call accepts NULL
  alsm_config_free(nullptr);
  alsm_dataset_close(nullptr);
  alsm_reservoir_destroy(nullptr);
  alsm_config_set_seed(nullptr, 1);
  alsm_config_set_jobs(nullptr, 1);
}

TEST_CASE("bad configuration input reports ALSM_ERR_CONFIG with a message") {
  alsm_config* out = nullptr;

  CHECK(alsm_config_parse("{\"bogus\": 1}", &out) == ALSM_ERR_CONFIG);
  CHECK(out == nullptr);
  CHECK(std::string(alsm_last_error()).find("bogus") != std::string::npos);

  CHECK(alsm_config_parse("not json at all", &out) == ALSM_ERR_CONFIG);
  CHECK(out == nullptr);
  CHECK(!std::string(alsm_last_error()).empty());

  CHECK(alsm_config_parse("{\"training\": {\"epochs\": 0}}", &out) == ALSM_ERR_CONFIG);
  CHECK(out == nullptr);

  CHECK(alsm_config_parse(nullptr, &out) == ALSM_ERR_CONFIG);
  CHECK(alsm_config_parse("{}", nullptr) == ALSM_ERR_CONFIG);
}

TEST_CASE("missing files report ALSM_ERR_IO") {
  alsm_config* cfg = nullptr;
  CHECK(alsm_config_load("/nonexistent/alsm/config.json", &cfg) == ALSM_ERR_IO);
  CHECK(cfg == nullptr);
  CHECK(!std::string(alsm_last_error()).empty());

  ConfigHandle handle(kPipelineJson);
  TempDir dir;
  CHECK(alsm_run_train(handle.ptr, dir.sub("no_dataset_here").c_str(), dir.sub("run").c_str()) ==
        ALSM_ERR_IO);

  alsm_dataset* dataset = nullptr;
  CHECK(alsm_dataset_open(dir.sub("still_nothing").c_str(), &dataset) == ALSM_ERR_IO);
  CHECK(dataset == nullptr);
}

TEST_CASE("NULL arguments are rejected up front") {
  ConfigHandle handle(kPipelineJson);
  CHECK(alsm_run_generate(nullptr, "x") == ALSM_ERR_CONFIG);
  CHECK(alsm_run_generate(handle.ptr, nullptr) == ALSM_ERR_CONFIG);
  CHECK(alsm_run_train(handle.ptr, nullptr, "x") == ALSM_ERR_CONFIG);
  CHECK(alsm_run_sweep(handle.ptr, "x", nullptr) == ALSM_ERR_CONFIG);
  CHECK(alsm_run_analyze(nullptr, "x", "y") == ALSM_ERR_CONFIG);
  CHECK(alsm_run_plot(nullptr, "x", "y") == ALSM_ERR_CONFIG);

  alsm_dataset* dataset = nullptr;
  CHECK(alsm_dataset_open(nullptr, &dataset) == ALSM_ERR_CONFIG);
  CHECK(alsm_dataset_counts(nullptr, nullptr, nullptr, nullptr) == ALSM_ERR_CONFIG);

  alsm_reservoir* reservoir = nullptr;
  CHECK(alsm_reservoir_create(nullptr, &reservoir) == ALSM_ERR_CONFIG);
  CHECK(alsm_reservoir_feature_dim(nullptr) == -1);
}

TEST_CASE("the whole pipeline runs through the C interface") {
  ConfigHandle handle(kPipelineJson);
  TempDir dir;
  const std::string data_dir = dir.sub("data");
  const std::string run_dir = dir.sub("run");
  const std::string sweep_dir = dir.sub("sweep");
  const std::string analysis_dir = dir.sub("analysis");
  const std::string plot_dir = dir.sub("plots");

  REQUIRE(alsm_run_generate(handle.ptr, data_dir.c_str()) == ALSM_OK);
  CHECK(fs::exists(data_dir + "/manifest.json"));
  CHECK(fs::exists(data_dir + "/config.resolved.json"));

  alsm_dataset* dataset = nullptr;
  REQUIRE(alsm_dataset_open(data_dir.c_str(), &dataset) == ALSM_OK);
  size_t n_train = 0, n_val = 0, n_test = 0;
  REQUIRE(alsm_dataset_counts(dataset, &n_train, &n_val, &n_test) == ALSM_OK);
  CHECK(n_train == 5);  // 6 windows split 0.8/0.1/0.1
  CHECK(n_val == 1);
  CHECK(n_test == 0);
  alsm_dataset_close(dataset);

  REQUIRE(alsm_run_train(handle.ptr, data_dir.c_str(), run_dir.c_str()) == ALSM_OK);
  CHECK(fs::exists(run_dir + "/epoch_losses.csv"));
  CHECK(fs::exists(run_dir + "/batch_losses.csv"));
  CHECK(fs::exists(run_dir + "/mlp.json"));
  CHECK(fs::exists(run_dir + "/mlp.f64"));

  REQUIRE(alsm_run_sweep(handle.ptr, data_dir.c_str(), sweep_dir.c_str()) == ALSM_OK);
  CHECK(fs::exists(sweep_dir + "/records.csv"));
  CHECK(fs::exists(sweep_dir + "/N4_n1_s0/epoch_losses.csv"));
  CHECK(fs::exists(sweep_dir + "/N6_n9_s1/epoch_losses.csv"));

  REQUIRE(alsm_run_analyze(handle.ptr, (sweep_dir + "/records.csv").c_str(),
                           analysis_dir.c_str()) == ALSM_OK);
  CHECK(fs::exists(analysis_dir + "/summary.json"));
  CHECK(fs::exists(analysis_dir + "/ols_summary.csv"));
  CHECK(fs::exists(analysis_dir + "/lasso_summary.csv"));
  CHECK(fs::exists(analysis_dir + "/kde_train_slope.csv"));
  CHECK(fs::exists(analysis_dir + "/scatter.csv"));

  REQUIRE(alsm_run_plot(handle.ptr, analysis_dir.c_str(), plot_dir.c_str()) == ALSM_OK);
  CHECK(fs::exists(plot_dir + "/fig_slope_vs_size.svg"));
  CHECK(fs::exists(plot_dir + "/fig_lasso_reconstruction.svg"));
  CHECK(fs::exists(plot_dir + "/fig_kde_ratio.svg"));
}

TEST_CASE("training that blows up reports ALSM_ERR_DIVERGED") {
  ConfigHandle handle(R"({
    "seed": 5,
    "lorenz": {"n_trajectories": 1, "windows_per_trajectory": 3},
    "reservoir": {"n_neurons": 4, "n_astrocytes": 4, "presentations": 10,
                  "weight_scale": 1e308},
    "training": {"epochs": 5, "batch_size": 4, "hidden1": 8, "hidden2": 8}
  })");
  TempDir dir;
  const std::string data_dir = dir.sub("data");
  REQUIRE(alsm_run_generate(handle.ptr, data_dir.c_str()) == ALSM_OK);
  CHECK(alsm_run_train(handle.ptr, data_dir.c_str(), dir.sub("run").c_str()) ==
        ALSM_ERR_DIVERGED);
  CHECK(!std::string(alsm_last_error()).empty());
}

TEST_CASE("direct reservoir access computes spike-rate features") {
  ConfigHandle handle(kPipelineJson);
  alsm_reservoir* reservoir = nullptr;
  REQUIRE(alsm_reservoir_create(handle.ptr, &reservoir) == ALSM_OK);
  REQUIRE(reservoir != nullptr);
  REQUIRE(alsm_reservoir_feature_dim(reservoir) == 6);

  std::vector<double> window(150);
  for (std::size_t i = 0; i < window.size(); ++i)
    window[i] = std::sin(0.1 * static_cast<double>(i));

  std::vector<double> features(6, -1.0);
  REQUIRE(alsm_reservoir_features(reservoir, window.data(), window.size(), features.data(),
                                  features.size()) == ALSM_OK);
  bool any_spike = false;
  for (const double f : features) {
    CHECK(std::isfinite(f));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    // spike count over 10 presentations, so a multiple of 0.1
    CHECK(std::abs(f * 10.0 - std::round(f * 10.0)) < 1e-9);
    if (f > 0.0) any_spike = true;
  }
  CHECK(any_spike);

  std::vector<double> again(6, -2.0);
  REQUIRE(alsm_reservoir_features(reservoir, window.data(), window.size(), again.data(),
                                  again.size()) == ALSM_OK);
  CHECK(std::memcmp(features.data(), again.data(), features.size() * sizeof(double)) == 0);

  CHECK(alsm_reservoir_features(reservoir, window.data(), 149, features.data(),
                                features.size()) == ALSM_ERR_CONFIG);
  CHECK(alsm_reservoir_features(reservoir, window.data(), window.size(), features.data(), 5) ==
        ALSM_ERR_CONFIG);
  CHECK(alsm_reservoir_features(nullptr, window.data(), window.size(), features.data(),
                                features.size()) == ALSM_ERR_CONFIG);
  CHECK(alsm_reservoir_features(reservoir, nullptr, window.size(), features.data(),
                                features.size()) == ALSM_ERR_CONFIG);

  alsm_reservoir_destroy(reservoir);
}
