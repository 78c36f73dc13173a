#include "units.hpp"

#include <stdexcept>

#include "errors.hpp"

namespace alsm {

void validate(const NeuronConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw ConfigError("neuron: beta must be in (0, 1]");
  if (!(cfg.u_thr > 0.0)) throw ConfigError("neuron: u_thr must be > 0");
}

void validate(const AstrocyteConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) throw ConfigError("astrocyte: beta must be in (0, 1]");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("astrocyte: alpha must be in (0, 1)");
  if (!(cfg.u_thr > 0.0)) throw ConfigError("astrocyte: u_thr must be > 0");
}

UnitState UnitState::neurons(Eigen::Index n) {
  UnitState s;
  s.u = Eigen::VectorXd::Zero(n);
  s.spikes = Eigen::VectorXd::Zero(n);
  return s;
}

UnitState UnitState::astrocytes(Eigen::Index n) {
  UnitState s;
  s.u = Eigen::VectorXd::Zero(n);
  s.i_syn = Eigen::VectorXd::Zero(n);
  s.spikes = Eigen::VectorXd::Zero(n);
  return s;
}

void neuron_step(UnitState& state, const Eigen::VectorXd& input, const NeuronConfig& cfg) {
  if (input.size() != state.u.size())
    throw std::invalid_argument("neuron_step: input length does not match population size");
  for (Eigen::Index i = 0; i < state.u.size(); ++i) {
    const double u_pre = cfg.beta * state.u[i] + input[i];
    const double spike = u_pre > cfg.u_thr ? 1.0 : 0.0;
    state.u[i] = u_pre - spike * cfg.u_thr;
    state.spikes[i] = spike;
  }
}

void astrocyte_step(UnitState& state, const Eigen::VectorXd& input, const AstrocyteConfig& cfg) {
  if (input.size() != state.u.size())
    throw std::invalid_argument("astrocyte_step: input length does not match population size");
  for (Eigen::Index i = 0; i < state.u.size(); ++i) {
    const double i_syn = cfg.alpha * state.i_syn[i] + input[i];
    const double u = cfg.beta * state.u[i] + i_syn;
    state.i_syn[i] = i_syn;
    state.u[i] = u;
    state.spikes[i] = u > cfg.u_thr ? 1.0 : 0.0;
  }
}

}  // namespace alsm
