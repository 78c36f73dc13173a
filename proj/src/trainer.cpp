#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace alsm {

namespace {

Eigen::VectorXd flatten_normalized(const Eigen::MatrixXd& rows, const NormStats& norm) {
  Eigen::MatrixXd scaled = normalize(rows, norm);
  Eigen::VectorXd flat(scaled.size());
  for (Eigen::Index r = 0; r < scaled.rows(); ++r)
    for (Eigen::Index c = 0; c < scaled.cols(); ++c) flat[r * scaled.cols() + c] = scaled(r, c);
  return flat;
}

// Columns of the returned pair are (feature, flattened normalized target) per window.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble(const std::vector<Eigen::VectorXd>& feats,
                                                     const std::vector<WindowPair>& windows,
                                                     const NormStats& norm) {
  const Eigen::Index n = static_cast<Eigen::Index>(windows.size());
  if (n == 0) return {Eigen::MatrixXd(), Eigen::MatrixXd()};
  Eigen::MatrixXd x(feats[0].size(), n);
  Eigen::MatrixXd y(windows[0].target.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.col(i) = feats[static_cast<std::size_t>(i)];
    y.col(i) = flatten_normalized(windows[static_cast<std::size_t>(i)].target, norm);
  }
  return {x, y};
}

}  // namespace

std::vector<Eigen::VectorXd> precompute_features(const ReservoirWeights& weights,
                                                 const ReservoirSpec& spec,
                                                 const std::vector<WindowPair>& windows,
                                                 const NormStats& norm, int jobs) {
  std::vector<Eigen::VectorXd> feats(windows.size());
  parallel_for(windows.size(), jobs, [&](std::size_t i) {
    Eigen::MatrixXd scaled = normalize(windows[i].input, norm);
    feats[i] = run(weights, spec, scaled).features;
  });
  return feats;
}

TrainResult train(const ReservoirWeights& weights, const ReservoirSpec& spec,
                  const Dataset& dataset, const TrainOptions& opts) {
  if (opts.epochs <= 0) throw ConfigError("epochs must be positive");
  if (opts.batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (dataset.train.empty()) throw ConfigError("training split is empty");

  const auto train_feats =
      precompute_features(weights, spec, dataset.train, dataset.norm, opts.jobs);
  auto [train_x, train_y] = assemble(train_feats, dataset.train, dataset.norm);

  Eigen::MatrixXd val_x, val_y;
  if (!dataset.val.empty()) {
    const auto val_feats =
        precompute_features(weights, spec, dataset.val, dataset.norm, opts.jobs);
    std::tie(val_x, val_y) = assemble(val_feats, dataset.val, dataset.norm);
  }

  MlpShape shape;
  shape.input = static_cast<int>(train_x.rows());
  shape.hidden1 = opts.hidden1;
  shape.hidden2 = opts.hidden2;
  shape.output = static_cast<int>(train_y.rows());

  TrainResult result;
  result.params = init_mlp(shape, mix_seed(opts.seed, 0x9d1f));
  AdamState adam = init_adam(result.params, opts.adam);

  const Eigen::Index n_train = train_x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng shuffle_rng(mix_seed(opts.seed, 0x5b0f));

  LossHistory& hist = result.history;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::uint64_t j = shuffle_rng.bounded(i);
      std::swap(order[i - 1], order[static_cast<std::size_t>(j)]);
    }

    double epoch_sum = 0.0;
    int epoch_batches = 0;
    for (Eigen::Index start = 0; start < n_train; start += opts.batch_size) {
      const Eigen::Index count = std::min<Eigen::Index>(opts.batch_size, n_train - start);
      Eigen::MatrixXd bx(train_x.rows(), count);
      Eigen::MatrixXd by(train_y.rows(), count);
      for (Eigen::Index k = 0; k < count; ++k) {
        bx.col(k) = train_x.col(order[static_cast<std::size_t>(start + k)]);
        by.col(k) = train_y.col(order[static_cast<std::size_t>(start + k)]);
      }

      MlpGrads grads;
      const double loss = mlp_backward_batch(result.params, bx, by, grads);
      if (!std::isfinite(loss)) {
        hist.diverged = true;
        return result;
      }
      adam_step(result.params, grads, adam);

      hist.batch_losses.push_back(loss);
      hist.batch_epochs.push_back(epoch);
      epoch_sum += loss;
      ++epoch_batches;
    }

    hist.epoch_train.push_back(epoch_sum / epoch_batches);
    if (val_x.cols() > 0) {
      const Eigen::MatrixXd pred = mlp_forward_batch(result.params, val_x);
      hist.epoch_val.push_back(mse_loss(pred, val_y));
    } else {
      hist.epoch_val.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return result;
}

}  // namespace alsm
