#include "reservoir.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "errors.hpp"
#include "lorenz.hpp"
#include "rng.hpp"

namespace alsm {

void validate(const ReservoirSpec& spec) {
  if (spec.n_neurons < 2) throw ConfigError("reservoir: n_neurons must be >= 2");
  if (spec.n_astrocytes < 2) throw ConfigError("reservoir: n_astrocytes must be >= 2");
  if (spec.presentations < 1) throw ConfigError("reservoir: presentations must be >= 1");
  if (!(spec.weight_scale > 0.0)) throw ConfigError("reservoir: weight_scale must be > 0");
  validate(spec.neuron);
  validate(spec.astrocyte);
}

SubnetSizes subnet_sizes(int n_neurons, int n_astrocytes) {
  SubnetSizes s;
  s.n1 = (n_neurons + 1) / 2;
  s.n2 = n_neurons / 2;
  s.a1 = (n_astrocytes + 1) / 2;
  s.a2 = n_astrocytes / 2;
  return s;
}

std::vector<WeightBlockRef> weight_blocks(const ReservoirWeights& w) {
  return {
      {"w_in", &w.w_in},       {"w_n1_n1", &w.w_n1_n1}, {"w_n1_n2", &w.w_n1_n2},
      {"w_n1_a1", &w.w_n1_a1}, {"w_n2_n1", &w.w_n2_n1}, {"w_n2_n2", &w.w_n2_n2},
      {"w_n2_a2", &w.w_n2_a2}, {"w_a1_n2", &w.w_a1_n2}, {"w_a1_a1", &w.w_a1_a1},
      {"w_a2_n1", &w.w_a2_n1}, {"w_a2_a2", &w.w_a2_a2},
  };
}

std::vector<MutableWeightBlockRef> mutable_weight_blocks(ReservoirWeights& w) {
  return {
      {"w_in", &w.w_in},       {"w_n1_n1", &w.w_n1_n1}, {"w_n1_n2", &w.w_n1_n2},
      {"w_n1_a1", &w.w_n1_a1}, {"w_n2_n1", &w.w_n2_n1}, {"w_n2_n2", &w.w_n2_n2},
      {"w_n2_a2", &w.w_n2_a2}, {"w_a1_n2", &w.w_a1_n2}, {"w_a1_a1", &w.w_a1_a1},
      {"w_a2_n1", &w.w_a2_n1}, {"w_a2_a2", &w.w_a2_a2},
  };
}

namespace {

Eigen::MatrixXd draw_block(Rng& rng, int rows, int cols, double weight_scale, bool zero_diag) {
  const double stddev = weight_scale / std::sqrt(static_cast<double>(cols));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian(0.0, stddev);
  if (zero_diag)
    for (int i = 0; i < std::min(rows, cols); ++i) m(i, i) = 0.0;
  return m;
}

}  // namespace

ReservoirWeights build(const ReservoirSpec& spec) {
  validate(spec);
  const SubnetSizes s = subnet_sizes(spec.n_neurons, spec.n_astrocytes);

  // One sequential stream, blocks drawn in the weight_blocks() order.
  Rng rng(mix_seed(spec.seed, 0xb10c5u));
  const double ws = spec.weight_scale;
  const bool keep_self = spec.self_connections;

  ReservoirWeights w;
  w.sizes = s;
  w.w_in = draw_block(rng, s.n1, kInputDim, ws, false);
  w.w_n1_n1 = draw_block(rng, s.n1, s.n1, ws, !keep_self);
  w.w_n1_n2 = draw_block(rng, s.n2, s.n1, ws, false);
  w.w_n1_a1 = draw_block(rng, s.a1, s.n1, ws, false);
  w.w_n2_n1 = draw_block(rng, s.n1, s.n2, ws, false);
  w.w_n2_n2 = draw_block(rng, s.n2, s.n2, ws, !keep_self);
  w.w_n2_a2 = draw_block(rng, s.a2, s.n2, ws, false);
  w.w_a1_n2 = draw_block(rng, s.n2, s.a1, ws, false);
  w.w_a1_a1 = draw_block(rng, s.a1, s.a1, ws, !keep_self);
  w.w_a2_n1 = draw_block(rng, s.n1, s.a2, ws, false);
  w.w_a2_a2 = draw_block(rng, s.a2, s.a2, ws, !keep_self);
  return w;
}

ReservoirActivity run(const ReservoirWeights& w, const ReservoirSpec& spec,
                      const Eigen::MatrixXd& window) {
  if (window.rows() != kHalfWindow || window.cols() != 3)
    throw std::invalid_argument("reservoir: window must be 50x3");
  if (!window.allFinite()) throw std::invalid_argument("reservoir: window must be finite");
  if (spec.presentations < 1) throw ConfigError("reservoir: presentations must be >= 1");

  // Flatten row-major: [x0, y0, z0, x1, y1, z1, ...].
  Eigen::VectorXd x(kInputDim);
  for (int r = 0; r < window.rows(); ++r)
    for (int c = 0; c < 3; ++c) x[r * 3 + c] = window(r, c);

  const SubnetSizes s = w.sizes;
  UnitState n1 = UnitState::neurons(s.n1);
  UnitState n2 = UnitState::neurons(s.n2);
  UnitState a1 = UnitState::astrocytes(s.a1);
  UnitState a2 = UnitState::astrocytes(s.a2);

  const Eigen::VectorXd external = w.w_in * x;  // fed to n1 on every step

  Eigen::VectorXd counts_n1 = Eigen::VectorXd::Zero(s.n1);
  Eigen::VectorXd counts_n2 = Eigen::VectorXd::Zero(s.n2);

  for (int t = 0; t < spec.presentations; ++t) {
    // All currents are computed from the previous step's outputs before any
    // subnetwork advances (synchronous update, one-step delay everywhere).
    const Eigen::VectorXd cur_n1 = external + w.w_n1_n1 * n1.spikes + w.w_n2_n1 * n2.spikes +
                                   w.w_a2_n1 * a2.spikes;
    const Eigen::VectorXd cur_n2 =
        w.w_n1_n2 * n1.spikes + w.w_n2_n2 * n2.spikes + w.w_a1_n2 * a1.spikes;
    const Eigen::VectorXd cur_a1 = w.w_n1_a1 * n1.spikes + w.w_a1_a1 * a1.spikes;
    const Eigen::VectorXd cur_a2 = w.w_n2_a2 * n2.spikes + w.w_a2_a2 * a2.spikes;

    neuron_step(n1, cur_n1, spec.neuron);
    neuron_step(n2, cur_n2, spec.neuron);
    astrocyte_step(a1, cur_a1, spec.astrocyte);
    astrocyte_step(a2, cur_a2, spec.astrocyte);

    if (!n1.u.allFinite() || !n2.u.allFinite() || !a1.u.allFinite() || !a2.u.allFinite())
      throw DivergenceError("reservoir: non-finite membrane potential (weight_scale too large?)");

    counts_n1 += n1.spikes;
    counts_n2 += n2.spikes;
  }

  ReservoirActivity act;
  act.features.resize(s.n1 + s.n2);
  act.features << counts_n1 / static_cast<double>(spec.presentations),
      counts_n2 / static_cast<double>(spec.presentations);
  return act;
}

std::uint64_t spec_hash(const ReservoirSpec& spec) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
  auto mixd = [&](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  };
  mix(static_cast<std::uint64_t>(spec.n_neurons));
  mix(static_cast<std::uint64_t>(spec.n_astrocytes));
  mix(static_cast<std::uint64_t>(spec.presentations));
  mixd(spec.weight_scale);
  mix(spec.self_connections ? 1 : 0);
  mix(spec.seed);
  mixd(spec.neuron.beta);
  mixd(spec.neuron.u_thr);
  mixd(spec.astrocyte.beta);
  mixd(spec.astrocyte.alpha);
  mixd(spec.astrocyte.u_thr);
  return h;
}

}  // namespace alsm
