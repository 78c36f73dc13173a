#pragma once

#include <Eigen/Dense>

namespace alsm {

// Per-unit spiking dynamics.
//
// Neurons are first-order leaky integrate-and-fire units:
//   U[t+1] = beta * U[t] + I[t+1] - R * U_thr
// with R = 1 when the pre-reset potential exceeds U_thr (reset by
// subtraction, applied within the same step).
//
// Astrocytes are second-order LIF units with the reset removed:
//   I_syn[t+1] = alpha * I_syn[t] + I_in[t+1]
//   U[t+1]     = beta * U[t] + I_syn[t+1]
// The unit emits 1 on every step its potential stays above U_thr and only
// stops once the potential has decayed below threshold on its own. Default
// decay constants give the astrocyte an impulse response roughly an order of
// magnitude longer than the neuron's.

struct NeuronConfig {
  double beta = 0.9;   // membrane decay, (0, 1]
  double u_thr = 1.0;  // spike threshold, > 0
};

struct AstrocyteConfig {
  double beta = 0.99;   // membrane decay, (0, 1]
  double alpha = 0.95;  // synaptic current decay, (0, 1)
  double u_thr = 1.0;
};

void validate(const NeuronConfig& cfg);
void validate(const AstrocyteConfig& cfg);

// State of one subnetwork. `i_syn` stays empty for neuron populations.
// `spikes` holds the last step's binary outputs as 0/1 doubles so it can feed
// weight matrices directly.
struct UnitState {
  Eigen::VectorXd u;
  Eigen::VectorXd i_syn;
  Eigen::VectorXd spikes;

  static UnitState neurons(Eigen::Index n);
  static UnitState astrocytes(Eigen::Index n);
};

// Advances a neuron population one step under input current `input`.
// Thresholding is strict (>) on the pre-reset potential.
void neuron_step(UnitState& state, const Eigen::VectorXd& input, const NeuronConfig& cfg);

// Advances an astrocyte population one step under input current `input`.
// No reset: `spikes` is 1 wherever u stays above threshold.
void astrocyte_step(UnitState& state, const Eigen::VectorXd& input, const AstrocyteConfig& cfg);

}  // namespace alsm
