#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace alsm {

// Three-layer perceptron readout: two rectified hidden layers, linear output.
// Batched entry points treat each column as one sample.

struct MlpShape {
  int input = 0;
  int hidden1 = 256;
  int hidden2 = 256;
  int output = 150;
};

struct MlpParams {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  MlpShape shape() const;
};

// He-scaled Gaussian weights, zero biases; deterministic per seed.
MlpParams init_mlp(const MlpShape& shape, std::uint64_t seed);

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& features);
Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& features);

// Mean of squared differences over every element; shapes must match.
double mse_loss(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target);

struct MlpGrads {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
};

// Analytic gradients of the batch-mean MSE loss; returns the loss value.
double mlp_backward_batch(const MlpParams& p, const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& targets, MlpGrads& grads);

// Single-sample convenience over the batch path.
double mlp_backward(const MlpParams& p, const Eigen::VectorXd& features,
                    const Eigen::VectorXd& target, MlpGrads& grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  MlpGrads m;  // first moments, shapes mirror the parameters
  MlpGrads v;  // second moments
  long step = 0;
  AdamConfig cfg;
};

AdamState init_adam(const MlpParams& params, const AdamConfig& cfg);

// Standard bias-corrected Adam update, applied in place.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state);

}  // namespace alsm
