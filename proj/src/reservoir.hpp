#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "units.hpp"

namespace alsm {

// Four-subnetwork reservoir. Neurons split into subnets n1/n2, astrocytes into
// a1/a2. Each neuron subnet drives the other neuron subnet, itself, and one
// astrocyte subnet; each astrocyte subnet drives itself and the opposite
// neuron subnet (tripartite wiring). The external input window enters n1 only.
// All weights are drawn once at build time and never trained.

inline constexpr int kInputDim = 150;  // 50 samples x 3 dimensions, flattened row-major

struct ReservoirSpec {
  int n_neurons = 50;     // total neuron count N, split ceil/floor across n1/n2
  int n_astrocytes = 100; // total astrocyte count A, split ceil/floor across a1/a2
  int presentations = 30; // steps the window is presented for
  double weight_scale = 1.0;
  bool self_connections = true;
  std::uint64_t seed = 0;
  NeuronConfig neuron;
  AstrocyteConfig astrocyte;
};

void validate(const ReservoirSpec& spec);

struct SubnetSizes {
  int n1 = 0, n2 = 0, a1 = 0, a2 = 0;
};

SubnetSizes subnet_sizes(int n_neurons, int n_astrocytes);

// The 11 fixed weight blocks. Block w_x_y maps source x's spike vector to
// target y's input current and is stored as (|y| x |x|).
struct ReservoirWeights {
  SubnetSizes sizes;
  Eigen::MatrixXd w_in;     // input -> n1, (n1 x kInputDim)
  Eigen::MatrixXd w_n1_n1;  // recurrent
  Eigen::MatrixXd w_n1_n2;  // neuron cross
  Eigen::MatrixXd w_n1_a1;  // neuron -> astrocyte
  Eigen::MatrixXd w_n2_n1;
  Eigen::MatrixXd w_n2_n2;
  Eigen::MatrixXd w_n2_a2;
  Eigen::MatrixXd w_a1_n2;  // astrocyte -> neuron
  Eigen::MatrixXd w_a1_a1;
  Eigen::MatrixXd w_a2_n1;
  Eigen::MatrixXd w_a2_a2;
};

struct WeightBlockRef {
  std::string name;
  const Eigen::MatrixXd* matrix;
};

struct MutableWeightBlockRef {
  std::string name;
  Eigen::MatrixXd* matrix;
};

// Enumerates all weight blocks in a fixed order (the serialization order).
std::vector<WeightBlockRef> weight_blocks(const ReservoirWeights& w);
std::vector<MutableWeightBlockRef> mutable_weight_blocks(ReservoirWeights& w);

// Draws every block i.i.d. Gaussian(0, weight_scale / sqrt(fan_in)) with
// fan_in = source size of the block; deterministic per spec.seed. When
// self_connections is false the recurrent blocks get zero diagonals.
ReservoirWeights build(const ReservoirSpec& spec);

// Spike counts of both neuron subnets over the presentation steps, divided by
// the step count: a length-N vector with entries in [0, 1].
struct ReservoirActivity {
  Eigen::VectorXd features;
};

// Presents one normalized 50x3 window for spec.presentations steps and
// accumulates neuron spike counts. State starts at zero; every connection
// carries a one-step delay (all inputs are read from the previous step's
// spikes), so windows are independent of each other.
// Throws DivergenceError when any membrane potential becomes non-finite.
ReservoirActivity run(const ReservoirWeights& weights, const ReservoirSpec& spec,
                      const Eigen::MatrixXd& window);

// Stable hash of the spec's structural fields; used to key serialized weights.
std::uint64_t spec_hash(const ReservoirSpec& spec);

}  // namespace alsm
