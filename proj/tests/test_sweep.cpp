#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "config.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "lorenz.hpp"
#include "sweep.hpp"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("alsm_sweep_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

bool same_bits(double a, double b) {
  std::uint64_t ua = 0, ub = 0;
  std::memcpy(&ua, &a, sizeof a);
  std::memcpy(&ub, &b, sizeof b);
  return ua == ub;
}

// Exact integer oracle: (3/4 + n/4) * N = N * (3 + n) / 4, rounded half to
// even. Works entirely in integers so it cannot share rounding behavior with
// the implementation under test.
int count_by_integer_arithmetic(int n_neurons, int proportion_index) {
  const int num = n_neurons * (3 + proportion_index);
  const int q = num / 4;
  const int rem = num % 4;
  int rounded;
  if (rem == 0 || rem == 1)
    rounded = q;
  else if (rem == 3)
    rounded = q + 1;
  else  // exact tie at .5
    rounded = (q % 2 == 0) ? q : q + 1;
  return rounded < 1 ? 1 : rounded;
}

alsm::Dataset sweep_dataset() {
  alsm::DatasetConfig dc;
  dc.n_trajectories = 2;
  dc.windows_per_trajectory = 3;
  dc.seed = 77;
  return alsm::build_dataset(dc);
}

alsm::PipelineConfig sweep_config(std::uint64_t seed) {
  alsm::PipelineConfig cfg;
  cfg.seed = seed;
  cfg.jobs = 2;
  cfg.reservoir.presentations = 10;
  cfg.reservoir.weight_scale = 1.5;
  cfg.training.epochs = 20;
  cfg.training.batch_size = 4;
  cfg.training.hidden1 = 12;
  cfg.training.hidden2 = 12;
  cfg.sweep.neuron_counts = {4, 6};
  cfg.sweep.proportion_indices = {1, 5};
  cfg.sweep.seeds_per_cell = 2;
  return cfg;
}

}  // namespace

TEST_CASE("astrocyte counts at the grid corners") {
  CHECK(alsm::astrocyte_count(400, 1) == 400);   // factor 1.0
  CHECK(alsm::astrocyte_count(200, 5) == 400);   // factor 2.0
  CHECK(alsm::astrocyte_count(10, 10) == 32);    // 32.5 ties to even
  CHECK(alsm::astrocyte_count(10, 1) == 10);
  CHECK(alsm::astrocyte_count(50, 5) == 100);
  CHECK(alsm::astrocyte_count(300, 10) == 975);  // factor 3.25
}

TEST_CASE("astrocyte count ties round half to even") {
  CHECK(alsm::astrocyte_count(2, 2) == 2);  // 2.5 -> 2
  CHECK(alsm::astrocyte_count(6, 2) == 8);  // 7.5 -> 8
  CHECK(alsm::astrocyte_count(2, 6) == 4);  // 4.5 -> 4
  CHECK(alsm::astrocyte_count(6, 6) == 14); // 13.5 -> 14
}

TEST_CASE("astrocyte count matches an integer-arithmetic oracle") {
  // The factor is always a multiple of 0.25 and N <= 400, so the product is
  // exact in binary and ties are true ties.
  for (int n_neurons = 1; n_neurons <= 400; ++n_neurons)
    for (int idx = 1; idx <= 10; ++idx)
      REQUIRE(alsm::astrocyte_count(n_neurons, idx) ==
              count_by_integer_arithmetic(n_neurons, idx));
}

TEST_CASE("astrocyte count rejects out-of-range arguments") {
  CHECK_THROWS_AS(alsm::astrocyte_count(10, 0), alsm::ConfigError);
  CHECK_THROWS_AS(alsm::astrocyte_count(10, 11), alsm::ConfigError);
  CHECK_THROWS_AS(alsm::astrocyte_count(10, -3), alsm::ConfigError);
  CHECK_THROWS_AS(alsm::astrocyte_count(0, 5), alsm::ConfigError);
  CHECK_THROWS_AS(alsm::astrocyte_count(-10, 5), alsm::ConfigError);
}

TEST_CASE("cell enumeration covers the default grid in lexicographic order") {
  const alsm::SweepSettings defaults;
  const std::vector<alsm::SweepCell> cells = alsm::enumerate_cells(defaults);
  REQUIRE(cells.size() == 5 * 10 * 2);

  CHECK(cells.front().n_neurons == 10);
  CHECK(cells.front().proportion_index == 1);
  CHECK(cells.front().seed_index == 0);
  CHECK(cells.back().n_neurons == 400);
  CHECK(cells.back().proportion_index == 10);
  CHECK(cells.back().seed_index == 1);

  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto key = [](const alsm::SweepCell& c) {
      return std::make_tuple(c.n_neurons, c.proportion_index, c.seed_index);
    };
    REQUIRE(key(cells[i - 1]) < key(cells[i]));
  }
}

TEST_CASE("cell enumeration sorts unsorted inputs without mutating them") {
  alsm::SweepSettings settings;
  settings.neuron_counts = {50, 10};
  settings.proportion_indices = {5, 1};
  settings.seeds_per_cell = 1;

  const std::vector<alsm::SweepCell> cells = alsm::enumerate_cells(settings);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].n_neurons == 10);
  CHECK(cells[0].proportion_index == 1);
  CHECK(cells[1].n_neurons == 10);
  CHECK(cells[1].proportion_index == 5);
  CHECK(cells[2].n_neurons == 50);
  CHECK(cells[2].proportion_index == 1);
  CHECK(cells[3].n_neurons == 50);
  CHECK(cells[3].proportion_index == 5);

  CHECK(settings.neuron_counts == std::vector<int>{50, 10});
  CHECK(settings.proportion_indices == std::vector<int>{5, 1});
}

TEST_CASE("a small sweep produces one complete record per cell") {
  const alsm::Dataset dataset = sweep_dataset();
  const alsm::PipelineConfig cfg = sweep_config(991);
  TempDir dir;

  const std::vector<alsm::RunRecord> records = alsm::run_sweep(cfg, dataset, dir.str());
  const std::vector<alsm::SweepCell> cells = alsm::enumerate_cells(cfg.sweep);
  REQUIRE(records.size() == cells.size());
  REQUIRE(records.size() == 8);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const alsm::RunRecord& rec = records[i];
    CHECK(rec.n_neurons == cells[i].n_neurons);
    CHECK(rec.proportion_index == cells[i].proportion_index);
    CHECK(rec.seed_index == cells[i].seed_index);
    CHECK(rec.n_astrocytes ==
          alsm::astrocyte_count(cells[i].n_neurons, cells[i].proportion_index));
    CHECK(rec.ratio == static_cast<double>(rec.n_astrocytes) / rec.n_neurons);
    CHECK(rec.ratio >= 1.0);
    CHECK(rec.ratio <= 3.25);

    const std::string expected_dir = "N" + std::to_string(rec.n_neurons) + "_n" +
                                     std::to_string(rec.proportion_index) + "_s" +
                                     std::to_string(rec.seed_index);
    CHECK(rec.loss_dir == expected_dir);
    CHECK(fs::exists(dir.path / expected_dir / "epoch_losses.csv"));
    CHECK(fs::exists(dir.path / expected_dir / "batch_losses.csv"));

    CHECK_FALSE(rec.diverged);
    CHECK(std::isfinite(rec.train_slope));
    CHECK(std::isfinite(rec.val_slope));
    CHECK(std::isfinite(rec.train_plateau));
    CHECK(rec.train_plateau >= 0.0);
    CHECK(rec.train_plateau_epoch >= 0);
    CHECK(rec.train_plateau_epoch < cfg.training.epochs);
  }
}

TEST_CASE("sweep results do not depend on worker count and reruns are bit-identical") {
  const alsm::Dataset dataset = sweep_dataset();
  alsm::PipelineConfig cfg = sweep_config(991);

  TempDir dir_a;
  cfg.jobs = 2;
  const std::vector<alsm::RunRecord> a = alsm::run_sweep(cfg, dataset, dir_a.str());

  TempDir dir_b;
  cfg.jobs = 1;
  const std::vector<alsm::RunRecord> b = alsm::run_sweep(cfg, dataset, dir_b.str());

  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].n_neurons == b[i].n_neurons);
    CHECK(a[i].n_astrocytes == b[i].n_astrocytes);
    CHECK(a[i].proportion_index == b[i].proportion_index);
    CHECK(a[i].seed_index == b[i].seed_index);
    CHECK(same_bits(a[i].ratio, b[i].ratio));
    CHECK(same_bits(a[i].train_slope, b[i].train_slope));
    CHECK(same_bits(a[i].val_slope, b[i].val_slope));
    CHECK(same_bits(a[i].train_plateau, b[i].train_plateau));
    CHECK(same_bits(a[i].val_plateau, b[i].val_plateau));
    CHECK(a[i].train_plateau_epoch == b[i].train_plateau_epoch);
    CHECK(a[i].val_plateau_epoch == b[i].val_plateau_epoch);
    CHECK(a[i].diverged == b[i].diverged);
    CHECK(a[i].loss_dir == b[i].loss_dir);
  }
}

TEST_CASE("the master seed changes sweep outcomes") {
  const alsm::Dataset dataset = sweep_dataset();
  TempDir dir_a;
  TempDir dir_b;
  const std::vector<alsm::RunRecord> a =
      alsm::run_sweep(sweep_config(991), dataset, dir_a.str());
  const std::vector<alsm::RunRecord> b =
      alsm::run_sweep(sweep_config(992), dataset, dir_b.str());

  REQUIRE(a.size() == b.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i].train_slope, b[i].train_slope)) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("a run that blows up is recorded as diverged, not fatal") {
  const alsm::Dataset dataset = sweep_dataset();
  alsm::PipelineConfig cfg = sweep_config(991);
  cfg.sweep.neuron_counts = {4};
  cfg.sweep.proportion_indices = {1};
  cfg.sweep.seeds_per_cell = 1;
  cfg.reservoir.weight_scale = 1e308;  // guarantees non-finite membrane potentials
  TempDir dir;

  const std::vector<alsm::RunRecord> records = alsm::run_sweep(cfg, dataset, dir.str());
  REQUIRE(records.size() == 1);
  CHECK(records[0].diverged);
  CHECK(std::isnan(records[0].train_slope));
  CHECK(std::isnan(records[0].val_slope));
  CHECK(std::isnan(records[0].train_plateau));
  CHECK(std::isnan(records[0].val_plateau));
  CHECK(records[0].ratio == 1.0);
  CHECK(records[0].loss_dir == "N4_n1_s0");
  CHECK(fs::exists(dir.path / "N4_n1_s0" / "epoch_losses.csv"));
}

TEST_CASE("sweeps refuse epoch counts too short for the summary statistics") {
  const alsm::Dataset dataset = sweep_dataset();
  alsm::PipelineConfig cfg = sweep_config(991);
  cfg.training.epochs = 19;
  TempDir dir;
  CHECK_THROWS_AS(alsm::run_sweep(cfg, dataset, dir.str()), alsm::ConfigError);
}
