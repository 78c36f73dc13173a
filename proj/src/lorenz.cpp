#include "lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

namespace alsm {

void validate(const LorenzParams& p) {
  if (!(p.dt > 0.0)) throw ConfigError("lorenz: dt must be > 0");
  if (p.n_steps < 1) throw ConfigError("lorenz: n_steps must be >= 1");
  if (p.transient_steps < 0) throw ConfigError("lorenz: transient_steps must be >= 0");
  if (!std::isfinite(p.sigma) || !std::isfinite(p.rho) || !std::isfinite(p.delta))
    throw ConfigError("lorenz: parameters must be finite");
}

LorenzParams params_from_offsets(double u_sigma, double u_rho, double u_delta) {
  LorenzParams p;
  p.sigma = 10.0 + u_sigma;
  p.rho = 28.0 + u_rho;
  p.delta = 2.667 + u_delta;
  return p;
}

LorenzParams randomize_params(std::uint64_t seed) {
  Rng rng(seed);
  const double u_sigma = rng.uniform(-5.0, 5.0);
  const double u_rho = rng.uniform(-5.0, 5.0);
  const double u_delta = rng.uniform(-0.5, 0.5);
  LorenzParams p = params_from_offsets(u_sigma, u_rho, u_delta);
  p.x0 = rng.uniform(-10.0, 10.0);
  p.y0 = rng.uniform(-10.0, 10.0);
  p.z0 = rng.uniform(-10.0, 10.0);
  return p;
}

Vec3 lorenz_derivative(const Vec3& s, const LorenzParams& p) {
  const double x = s[0], y = s[1], z = s[2];
  Vec3 d;
  d[0] = p.sigma * (y - x);
  d[1] = x * (p.rho - z) - y;
  d[2] = x * y - p.delta * z;
  return d;
}

Vec3 euler_step(const Vec3& s, const LorenzParams& p) {
  const Vec3 d = lorenz_derivative(s, p);
  Vec3 next;
  next[0] = s[0] + p.dt * d[0];
  next[1] = s[1] + p.dt * d[1];
  next[2] = s[2] + p.dt * d[2];
  if (!next.allFinite()) throw DivergenceError("lorenz: non-finite state during integration");
  return next;
}

Trajectory generate_trajectory(const LorenzParams& p) {
  validate(p);
  Vec3 s(p.x0, p.y0, p.z0);
  if (!s.allFinite()) throw DivergenceError("lorenz: non-finite initial state");
  for (std::int64_t t = 0; t < p.transient_steps; ++t) s = euler_step(s, p);
  Trajectory out(p.n_steps, 3);
  for (std::int64_t t = 0; t < p.n_steps; ++t) {
    s = euler_step(s, p);
    out.row(t) = s.transpose();
  }
  return out;
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& rows, const NormStats& stats) {
  Eigen::MatrixXd out = rows;
  for (int c = 0; c < out.cols(); ++c)
    out.col(c) = (out.col(c).array() - stats.mean[c]) / stats.stddev[c];
  return out;
}

Eigen::MatrixXd denormalize(const Eigen::MatrixXd& rows, const NormStats& stats) {
  Eigen::MatrixXd out = rows;
  for (int c = 0; c < out.cols(); ++c)
    out.col(c) = out.col(c).array() * stats.stddev[c] + stats.mean[c];
  return out;
}

namespace {

void validate_fractions(const SplitFractions& f) {
  if (!(f.train > 0.0) || !(f.val > 0.0) || !(f.test > 0.0))
    throw ConfigError("dataset: split fractions must be positive");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
    throw ConfigError("dataset: split fractions must sum to 1");
}

NormStats train_input_stats(const std::vector<WindowPair>& train) {
  NormStats stats;
  if (train.empty()) return stats;
  Vec3 sum = Vec3::Zero();
  Vec3 sumsq = Vec3::Zero();
  std::int64_t n = 0;
  for (const auto& w : train) {
    for (int c = 0; c < 3; ++c) {
      sum[c] += w.input.col(c).sum();
      sumsq[c] += w.input.col(c).squaredNorm();
    }
    n += w.input.rows();
  }
  for (int c = 0; c < 3; ++c) {
    stats.mean[c] = sum[c] / static_cast<double>(n);
    const double var = sumsq[c] / static_cast<double>(n) - stats.mean[c] * stats.mean[c];
    stats.stddev[c] = std::sqrt(std::max(var, 0.0));
    if (!(stats.stddev[c] > 0.0))
      throw ConfigError("dataset: zero-variance train dimension, cannot normalize");
  }
  return stats;
}

}  // namespace

Dataset make_dataset(const std::vector<Trajectory>& trajectories, const SplitFractions& fractions,
                     std::uint64_t seed) {
  validate_fractions(fractions);

  std::vector<WindowPair> windows;
  for (const auto& traj : trajectories) {
    const std::int64_t n_windows = traj.rows() / kWindowLen;
    if (traj.rows() < kWindowLen)
      throw ConfigError("dataset: trajectory shorter than one window (100 steps)");
    for (std::int64_t k = 0; k < n_windows; ++k) {
      WindowPair w;
      w.input = traj.block(k * kWindowLen, 0, kHalfWindow, 3);
      w.target = traj.block(k * kWindowLen + kHalfWindow, 0, kHalfWindow, 3);
      if (!w.input.allFinite() || !w.target.allFinite())
        throw DivergenceError("dataset: non-finite window sample");
      windows.push_back(std::move(w));
    }
  }

  // Seeded Fisher-Yates shuffle over the pooled windows.
  Rng rng(mix_seed(seed, 0x580ffe1u));
  for (std::size_t i = windows.size(); i > 1; --i) {
    const std::size_t j = rng.bounded(i);
    std::swap(windows[i - 1], windows[j]);
  }

  const std::int64_t n = static_cast<std::int64_t>(windows.size());
  std::int64_t n_train = std::llround(fractions.train * static_cast<double>(n));
  std::int64_t n_val = std::llround(fractions.val * static_cast<double>(n));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);
  const std::int64_t n_test = n - n_train - n_val;

  Dataset ds;
  ds.seed = seed;
  ds.train.assign(windows.begin(), windows.begin() + n_train);
  ds.val.assign(windows.begin() + n_train, windows.begin() + n_train + n_val);
  ds.test.assign(windows.begin() + n_train + n_val, windows.begin() + n_train + n_val + n_test);
  ds.norm = train_input_stats(ds.train);
  return ds;
}

Dataset make_windows(const Trajectory& trajectory, const SplitFractions& fractions,
                     std::uint64_t seed) {
  return make_dataset({trajectory}, fractions, seed);
}

Dataset build_dataset(const DatasetConfig& cfg) {
  if (cfg.n_trajectories < 1) throw ConfigError("dataset: n_trajectories must be >= 1");
  if (cfg.windows_per_trajectory < 1)
    throw ConfigError("dataset: windows_per_trajectory must be >= 1");

  std::vector<Trajectory> trajectories;
  std::vector<LorenzParams> all_params;
  trajectories.reserve(cfg.n_trajectories);
  for (int i = 0; i < cfg.n_trajectories; ++i) {
    LorenzParams p = randomize_params(mix_seed(cfg.seed, 0x7a0000 + static_cast<std::uint64_t>(i)));
    p.dt = cfg.dt;
    p.transient_steps = cfg.transient_steps;
    p.n_steps = static_cast<std::int64_t>(cfg.windows_per_trajectory) * kWindowLen;
    trajectories.push_back(generate_trajectory(p));
    all_params.push_back(p);
  }
  Dataset ds = make_dataset(trajectories, cfg.fractions, cfg.seed);
  ds.trajectory_params = std::move(all_params);
  return ds;
}

}  // namespace alsm
