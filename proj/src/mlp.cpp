#include "mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace alsm {

MlpShape MlpParams::shape() const {
  MlpShape s;
  s.input = static_cast<int>(w1.cols());
  s.hidden1 = static_cast<int>(w1.rows());
  s.hidden2 = static_cast<int>(w2.rows());
  s.output = static_cast<int>(w3.rows());
  return s;
}

namespace {

Eigen::MatrixXd he_matrix(Rng& rng, int rows, int cols) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(cols));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian(0.0, stddev);
  return m;
}

void check_forward_shapes(const MlpParams& p, const Eigen::MatrixXd& features) {
  if (features.rows() != p.w1.cols())
    throw std::invalid_argument("mlp: feature length does not match first layer");
}

}  // namespace

MlpParams init_mlp(const MlpShape& shape, std::uint64_t seed) {
  if (shape.input < 1 || shape.hidden1 < 1 || shape.hidden2 < 1 || shape.output < 1)
    throw std::invalid_argument("mlp: all layer sizes must be >= 1");
  Rng rng(mix_seed(seed, 0x371bu));
  MlpParams p;
  p.w1 = he_matrix(rng, shape.hidden1, shape.input);
  p.w2 = he_matrix(rng, shape.hidden2, shape.hidden1);
  p.w3 = he_matrix(rng, shape.output, shape.hidden2);
  p.b1 = Eigen::VectorXd::Zero(shape.hidden1);
  p.b2 = Eigen::VectorXd::Zero(shape.hidden2);
  p.b3 = Eigen::VectorXd::Zero(shape.output);
  return p;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& features) {
  check_forward_shapes(p, features);
  const Eigen::MatrixXd a1 =
      ((p.w1 * features).colwise() + p.b1).cwiseMax(0.0);
  const Eigen::MatrixXd a2 = ((p.w2 * a1).colwise() + p.b2).cwiseMax(0.0);
  return (p.w3 * a2).colwise() + p.b3;
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& features) {
  return mlp_forward_batch(p, features);
}

double mse_loss(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (prediction.size() == 0) throw std::invalid_argument("mse_loss: empty input");
  return (prediction - target).squaredNorm() / static_cast<double>(prediction.size());
}

double mlp_backward_batch(const MlpParams& p, const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& targets, MlpGrads& grads) {
  check_forward_shapes(p, features);
  if (targets.rows() != p.w3.rows() || targets.cols() != features.cols())
    throw std::invalid_argument("mlp: target shape mismatch");

  const Eigen::MatrixXd z1 = (p.w1 * features).colwise() + p.b1;
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  const Eigen::MatrixXd z2 = (p.w2 * a1).colwise() + p.b2;
  const Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  const Eigen::MatrixXd out = (p.w3 * a2).colwise() + p.b3;

  const double n_elems = static_cast<double>(out.size());
  const Eigen::MatrixXd diff = out - targets;
  const double loss = diff.squaredNorm() / n_elems;

  const Eigen::MatrixXd d_out = (2.0 / n_elems) * diff;
  grads.w3 = d_out * a2.transpose();
  grads.b3 = d_out.rowwise().sum();

  const Eigen::MatrixXd d_a2 = p.w3.transpose() * d_out;
  const Eigen::MatrixXd d_z2 =
      d_a2.cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  grads.w2 = d_z2 * a1.transpose();
  grads.b2 = d_z2.rowwise().sum();

  const Eigen::MatrixXd d_a1 = p.w2.transpose() * d_z2;
  const Eigen::MatrixXd d_z1 =
      d_a1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  grads.w1 = d_z1 * features.transpose();
  grads.b1 = d_z1.rowwise().sum();

  return loss;
}

double mlp_backward(const MlpParams& p, const Eigen::VectorXd& features,
                    const Eigen::VectorXd& target, MlpGrads& grads) {
  return mlp_backward_batch(p, features, target, grads);
}

AdamState init_adam(const MlpParams& params, const AdamConfig& cfg) {
  AdamState s;
  s.cfg = cfg;
  auto zeros_like_m = [](const Eigen::MatrixXd& m) { return Eigen::MatrixXd::Zero(m.rows(), m.cols()); };
  auto zeros_like_v = [](const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()); };
  s.m.w1 = zeros_like_m(params.w1);
  s.m.w2 = zeros_like_m(params.w2);
  s.m.w3 = zeros_like_m(params.w3);
  s.m.b1 = zeros_like_v(params.b1);
  s.m.b2 = zeros_like_v(params.b2);
  s.m.b3 = zeros_like_v(params.b3);
  s.v = s.m;
  return s;
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const AdamConfig& cfg, double bias1,
                 double bias2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const T m_hat = m / bias1;
  const T v_hat = v / bias2;
  param.array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state) {
  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.cfg.beta2, static_cast<double>(state.step));
  adam_update(params.w1, grads.w1, state.m.w1, state.v.w1, state.cfg, bias1, bias2);
  adam_update(params.w2, grads.w2, state.m.w2, state.v.w2, state.cfg, bias1, bias2);
  adam_update(params.w3, grads.w3, state.m.w3, state.v.w3, state.cfg, bias1, bias2);
  adam_update(params.b1, grads.b1, state.m.b1, state.v.b1, state.cfg, bias1, bias2);
  adam_update(params.b2, grads.b2, state.m.b2, state.v.b2, state.cfg, bias1, bias2);
  adam_update(params.b3, grads.b3, state.m.b3, state.v.b3, state.cfg, bias1, bias2);
}

}  // namespace alsm
