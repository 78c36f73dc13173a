#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace alsm {

// A prediction window is 100 consecutive trajectory samples: the first 50 are
// the model input, the last 50 the prediction target.
inline constexpr int kWindowLen = 100;
inline constexpr int kHalfWindow = 50;
inline constexpr int kStateDim = 3;

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double delta = 2.667;
  double dt = 0.01;
  std::int64_t n_steps = 0;
  std::int64_t transient_steps = 1000;
  double x0 = 1.0;
  double y0 = 1.0;
  double z0 = 1.0;
};

// Throws ConfigError unless dt > 0, n_steps >= 1, transient_steps >= 0.
void validate(const LorenzParams& p);

using Vec3 = Eigen::Vector3d;
// One trajectory sample per row: columns x, y, z.
using Trajectory = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Base parameters plus explicit offsets. The randomized draw below feeds
// offsets u_sigma, u_rho ~ U(-5, 5) and u_delta ~ U(-0.5, 0.5) through this.
LorenzParams params_from_offsets(double u_sigma, double u_rho, double u_delta);

// Randomized system parameters and initial state, deterministic per seed.
// Initial state uniform in [-10, 10]^3; dt and transient keep their defaults.
LorenzParams randomize_params(std::uint64_t seed);

Vec3 lorenz_derivative(const Vec3& s, const LorenzParams& p);

// Single forward-Euler update s + dt * f(s). Throws DivergenceError when the
// result is non-finite.
Vec3 euler_step(const Vec3& s, const LorenzParams& p);

// Integrates from (x0, y0, z0), drops the first transient_steps samples and
// returns the next n_steps.
Trajectory generate_trajectory(const LorenzParams& p);

struct WindowPair {
  Eigen::MatrixXd input;   // kHalfWindow x 3
  Eigen::MatrixXd target;  // kHalfWindow x 3
};

// Per-dimension z-scoring statistics, computed from training inputs only.
struct NormStats {
  Vec3 mean = Vec3::Zero();
  Vec3 stddev = Vec3::Ones();
};

Eigen::MatrixXd normalize(const Eigen::MatrixXd& rows, const NormStats& stats);
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& rows, const NormStats& stats);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct Dataset {
  std::vector<WindowPair> train;
  std::vector<WindowPair> val;
  std::vector<WindowPair> test;
  NormStats norm;
  std::vector<LorenzParams> trajectory_params;  // provenance, echoed in the manifest
  std::uint64_t seed = 0;
};

// Cuts every trajectory into floor(len/100) non-overlapping windows, shuffles
// the pooled windows deterministically and splits them by fraction. Windows
// never span a trajectory boundary. Normalization statistics come from the
// train inputs.
Dataset make_dataset(const std::vector<Trajectory>& trajectories, const SplitFractions& fractions,
                     std::uint64_t seed);

// Single-trajectory convenience over make_dataset.
Dataset make_windows(const Trajectory& trajectory, const SplitFractions& fractions,
                     std::uint64_t seed);

struct DatasetConfig {
  double dt = 0.01;
  std::int64_t transient_steps = 1000;
  int n_trajectories = 20;
  int windows_per_trajectory = 500;
  SplitFractions fractions;
  std::uint64_t seed = 0;
};

// Generates n_trajectories randomized trajectories and pools their windows.
Dataset build_dataset(const DatasetConfig& cfg);

}  // namespace alsm
