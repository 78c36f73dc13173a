#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

namespace alsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double population_stddev(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

// Records whose target is usable for fitting; preserves input order so fold
// assignment stays deterministic.
std::vector<RunRecord> usable_records(const std::vector<RunRecord>& records, Target target) {
  std::vector<RunRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records) {
    if (r.diverged) continue;
    double v = 0.0;
    switch (target) {
      case Target::kTrainSlope: v = r.train_slope; break;
      case Target::kValSlope: v = r.val_slope; break;
      case Target::kTrainPlateau: v = r.train_plateau; break;
      case Target::kValPlateau: v = r.val_plateau; break;
    }
    if (std::isfinite(v)) kept.push_back(r);
  }
  return kept;
}

}  // namespace

const char* const kFactorNames[3] = {"N", "A", "A_plus_N"};

double learning_rate(const std::vector<double>& epoch_losses) {
  if (epoch_losses.size() < 10)
    throw std::invalid_argument("learning_rate needs at least 10 epoch losses");
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double x = static_cast<double>(i);
    const double y = epoch_losses[static_cast<std::size_t>(i)];
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
  }
  return (10.0 * sxy - sx * sy) / (10.0 * sxx - sx * sx);
}

PlateauResult plateau_loss(const std::vector<double>& epoch_losses, int window) {
  const int n = static_cast<int>(epoch_losses.size());
  if (window < 1) throw std::invalid_argument("smoothing window must be positive");
  if (n < 20) throw std::invalid_argument("plateau_loss needs at least 20 epochs");
  if (n - 1 < window) throw std::invalid_argument("smoothing window exceeds the loss history");

  std::vector<double> diff(static_cast<std::size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i)
    diff[static_cast<std::size_t>(i)] =
        epoch_losses[static_cast<std::size_t>(i + 1)] - epoch_losses[static_cast<std::size_t>(i)];

  auto smoothed = [&](int i) {  // trailing window ending at diff[i]
    double sum = 0.0;
    for (int k = i - window + 1; k <= i; ++k) sum += diff[static_cast<std::size_t>(k)];
    return sum / window;
  };

  const double threshold = 0.01 * std::abs(smoothed(window - 1));
  PlateauResult result;
  bool found = false;
  for (int i = window - 1; i < n - 1; ++i) {
    if (std::abs(smoothed(i)) <= threshold) {
      // diff[i] is the change into epoch i+1; the curve is flat from there on.
      result.start_epoch = i + 1;
      found = true;
      break;
    }
  }
  if (!found) {
    result.start_epoch = n - std::max(1, n / 10);
    result.fallback = true;
  }

  double sum = 0.0;
  for (int e = result.start_epoch; e < n; ++e) sum += epoch_losses[static_cast<std::size_t>(e)];
  result.mean = sum / (n - result.start_epoch);
  return result;
}

std::string target_name(Target t) {
  switch (t) {
    case Target::kTrainSlope: return "train_slope";
    case Target::kValSlope: return "val_slope";
    case Target::kTrainPlateau: return "train_plateau";
    case Target::kValPlateau: return "val_plateau";
  }
  return "?";
}

Eigen::VectorXd target_values(const std::vector<RunRecord>& records, Target t) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    switch (t) {
      case Target::kTrainSlope: y[i] = r.train_slope; break;
      case Target::kValSlope: y[i] = r.val_slope; break;
      case Target::kTrainPlateau: y[i] = r.train_plateau; break;
      case Target::kValPlateau: y[i] = r.val_plateau; break;
    }
  }
  return y;
}

Eigen::MatrixXd factor_matrix(const std::vector<RunRecord>& records) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(records.size()), 3);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    z(i, 0) = r.n_neurons;
    z(i, 1) = r.n_astrocytes;
    z(i, 2) = static_cast<double>(r.n_neurons) + static_cast<double>(r.n_astrocytes);
  }
  return z;
}

namespace {

// R^2 of a min-norm least-squares fit; 0 when the target has no variance.
double fit_r_squared(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     Eigen::VectorXd* beta_out = nullptr, Eigen::VectorXd* fitted_out = nullptr) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::VectorXd beta = cod.solve(y);
  const Eigen::VectorXd fitted = x * beta;
  const double ss_res = (y - fitted).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  if (beta_out) *beta_out = beta;
  if (fitted_out) *fitted_out = fitted;
  if (ss_tot == 0.0) return 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace

RegressionResult ols_regression(const std::vector<RunRecord>& records, Target target) {
  const auto kept = usable_records(records, target);
  const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
  if (m < 5) throw std::invalid_argument("ols_regression needs at least 5 usable records");

  const Eigen::MatrixXd z = factor_matrix(kept);
  if (population_stddev(z.col(0)) == 0.0 && population_stddev(z.col(1)) == 0.0)
    throw std::invalid_argument("ols_regression: all records share one (N, A) cell");

  Eigen::MatrixXd x(m, 4);
  x.col(0).setOnes();
  x.rightCols(3) = z;
  const Eigen::VectorXd y = target_values(kept, target);

  RegressionResult result;
  result.r_squared = fit_r_squared(x, y, &result.coefficients, &result.fitted);

  result.vif.resize(3);
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd others(m, 3);
    others.col(0).setOnes();
    int col = 1;
    for (int k = 0; k < 3; ++k)
      if (k != j) others.col(col++) = z.col(k);
    if (population_stddev(z.col(j)) == 0.0) {
      result.vif[j] = kInf;  // constant column, fully absorbed by the intercept
      continue;
    }
    const double r2 = fit_r_squared(others, z.col(j));
    result.vif[j] = (1.0 - r2 < 1e-10) ? kInf : std::max(1.0, 1.0 / (1.0 - r2));
  }
  return result;
}

SubDesignStats sub_design_stats(const std::vector<RunRecord>& records, Target target, int drop) {
  if (drop < 0 || drop > 2) throw std::invalid_argument("drop must be 0, 1 or 2");
  const auto kept = usable_records(records, target);
  const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
  if (m < 5) throw std::invalid_argument("sub_design_stats needs at least 5 usable records");

  const Eigen::MatrixXd z = factor_matrix(kept);
  SubDesignStats stats;
  stats.names.push_back("intercept");
  Eigen::MatrixXd x(m, 3);
  x.col(0).setOnes();
  int col = 1;
  for (int k = 0; k < 3; ++k) {
    if (k == drop) continue;
    x.col(col++) = z.col(k);
    stats.names.push_back(kFactorNames[k]);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 3)
    throw std::invalid_argument("sub-design is rank-deficient; drop a different factor");

  const Eigen::VectorXd y = target_values(kept, target);
  stats.coefficients = qr.solve(y);
  const Eigen::VectorXd fitted = x * stats.coefficients;
  const double ss_res = (y - fitted).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  stats.r_squared = ss_tot == 0.0 ? 0.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);

  const double sigma2 = ss_res / static_cast<double>(m - 3);
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  stats.std_errors.resize(3);
  stats.t_stats.resize(3);
  for (int j = 0; j < 3; ++j) {
    stats.std_errors[j] = std::sqrt(sigma2 * xtx_inv(j, j));
    stats.t_stats[j] = stats.coefficients[j] / stats.std_errors[j];
  }
  return stats;
}

Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                         double lambda, bool* converged, int max_sweeps) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  if (z.rows() != y.size()) throw std::invalid_argument("design/target size mismatch");
  const double m = static_cast<double>(z.rows());
  const Eigen::Index p = z.cols();

  Eigen::VectorXd col_scale(p);
  for (Eigen::Index j = 0; j < p; ++j) col_scale[j] = z.col(j).squaredNorm() / m;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_scale[j] == 0.0) continue;
      const double rho = z.col(j).dot(residual) / m + col_scale[j] * beta[j];
      const double updated = soft_threshold(rho, lambda) / col_scale[j];
      const double delta = updated - beta[j];
      if (delta != 0.0) {
        residual -= z.col(j) * delta;
        beta[j] = updated;
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    if (max_delta < 1e-8) {
      if (converged) *converged = true;
      return beta;
    }
  }
  if (converged) *converged = false;
  return beta;
}

namespace {

struct StandardizedDesign {
  Eigen::MatrixXd z;       // zero mean, unit population variance per column
  Eigen::VectorXd y;       // raw target
  double y_mean = 0.0;
};

StandardizedDesign standardize(const std::vector<RunRecord>& kept, Target target) {
  StandardizedDesign d;
  d.z = factor_matrix(kept);
  d.y = target_values(kept, target);
  d.y_mean = d.y.mean();
  for (Eigen::Index j = 0; j < d.z.cols(); ++j) {
    const double mean = d.z.col(j).mean();
    const double sd = population_stddev(d.z.col(j));
    if (sd == 0.0)
      d.z.col(j).setZero();  // constant factor carries no signal; keep its coefficient at 0
    else
      d.z.col(j) = (d.z.col(j).array() - mean) / sd;
  }
  return d;
}

}  // namespace

std::vector<double> default_lambda_grid(const std::vector<RunRecord>& records, Target target,
                                        int size) {
  if (size < 1) throw std::invalid_argument("grid size must be positive");
  const auto kept = usable_records(records, target);
  if (kept.size() < 2) throw std::invalid_argument("too few records for a lambda grid");
  const StandardizedDesign d = standardize(kept, target);
  const Eigen::VectorXd y_c = d.y.array() - d.y_mean;
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < d.z.cols(); ++j)
    lambda_max = std::max(lambda_max, std::abs(d.z.col(j).dot(y_c)) / d.z.rows());
  if (lambda_max <= 0.0) return {0.0};

  std::vector<double> grid(static_cast<std::size_t>(size));
  const double lo = std::log(lambda_max * 1e-4);
  const double hi = std::log(lambda_max);
  for (int i = 0; i < size; ++i) {
    const double t = size == 1 ? 1.0 : static_cast<double>(i) / (size - 1);
    grid[static_cast<std::size_t>(i)] = std::exp(lo + t * (hi - lo));
  }
  return grid;
}

LassoResult lasso_regression(const std::vector<RunRecord>& records, Target target,
                             const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  const auto kept = usable_records(records, target);
  const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
  if (m < 10) throw std::invalid_argument("lasso_regression needs at least 10 usable records");

  const StandardizedDesign d = standardize(kept, target);
  constexpr int kFolds = 5;

  double best_lambda = lambda_grid.front();
  double best_mse = kInf;
  for (const double lambda : lambda_grid) {
    double sq_err = 0.0;
    for (int fold = 0; fold < kFolds; ++fold) {
      std::vector<Eigen::Index> train_rows, val_rows;
      for (Eigen::Index i = 0; i < m; ++i)
        (i % kFolds == fold ? val_rows : train_rows).push_back(i);
      Eigen::MatrixXd z_train(static_cast<Eigen::Index>(train_rows.size()), d.z.cols());
      Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
      for (std::size_t k = 0; k < train_rows.size(); ++k) {
        z_train.row(static_cast<Eigen::Index>(k)) = d.z.row(train_rows[k]);
        y_train[static_cast<Eigen::Index>(k)] = d.y[train_rows[k]];
      }
      const double mu = y_train.mean();
      // Near lambda 0 the descent can stall along the collinear ridge without
      // converging in coefficient space; the predictions (all that matter for
      // the CV score) still settle, so the stall is ignored here.
      const Eigen::VectorXd beta =
          lasso_coordinate_descent(z_train, y_train.array() - mu, lambda);
      for (const Eigen::Index i : val_rows) {
        const double pred = mu + d.z.row(i).dot(beta);
        sq_err += (pred - d.y[i]) * (pred - d.y[i]);
      }
    }
    const double mse = sq_err / static_cast<double>(m);
    // On a tie the larger penalty (sparser model) wins.
    if (mse < best_mse || (mse == best_mse && lambda > best_lambda)) {
      best_mse = mse;
      best_lambda = lambda;
    }
  }

  LassoResult result;
  result.lambda = best_lambda;
  bool conv = true;
  const Eigen::VectorXd y_c = d.y.array() - d.y_mean;
  result.coefficients = lasso_coordinate_descent(d.z, y_c, best_lambda, &conv);
  result.converged = conv;
  result.intercept = d.y_mean;
  result.actual = d.y;
  result.fitted = (d.z * result.coefficients).array() + result.intercept;
  for (int j = 0; j < 3; ++j)
    if (result.coefficients[j] != 0.0) result.selected.push_back(kFactorNames[j]);

  const double fitted_sd = population_stddev(result.fitted);
  const double actual_sd = population_stddev(result.actual);
  result.reconstruction_correlation =
      (fitted_sd == 0.0 || actual_sd == 0.0)
          ? 0.0  // an all-zero model reconstructs nothing
          : pearson_correlation(result.fitted, result.actual);
  return result;
}

namespace {

struct Bandwidths {
  double ratio = 0.0;
  double slope = 0.0;
  bool floored = false;
};

Bandwidths scott_bandwidths(const std::vector<std::pair<double, double>>& points) {
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd r(m), s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    r[i] = points[static_cast<std::size_t>(i)].first;
    s[i] = points[static_cast<std::size_t>(i)].second;
  }
  const double scale = std::pow(static_cast<double>(m), -1.0 / 6.0);
  Bandwidths bw;
  bw.ratio = population_stddev(r) * scale;
  bw.slope = population_stddev(s) * scale;
  constexpr double kFloor = 1e-6;
  if (bw.ratio < kFloor) {
    bw.ratio = kFloor;
    bw.floored = true;
  }
  if (bw.slope < kFloor) {
    bw.slope = kFloor;
    bw.floored = true;
  }
  return bw;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

}  // namespace

KdeGrid default_kde_grid(const std::vector<std::pair<double, double>>& points, int n_ratio,
                         int n_slope, double pad) {
  if (points.empty()) throw std::invalid_argument("no points for a KDE grid");
  if (n_ratio < 2 || n_slope < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  const Bandwidths bw = scott_bandwidths(points);
  double r_lo = kInf, r_hi = -kInf, s_lo = kInf, s_hi = -kInf;
  for (const auto& [r, s] : points) {
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
  }
  KdeGrid grid;
  grid.ratio = linspace(r_lo - pad * bw.ratio, r_hi + pad * bw.ratio, n_ratio);
  grid.slope = linspace(s_lo - pad * bw.slope, s_hi + pad * bw.slope, n_slope);
  return grid;
}

KdeResult kde2d(const std::vector<std::pair<double, double>>& points, const KdeGrid& grid) {
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  if (m == 0) throw std::invalid_argument("kde2d needs at least one point");
  if (grid.ratio.size() == 0 || grid.slope.size() == 0)
    throw std::invalid_argument("empty KDE grid");

  KdeResult result;
  result.grid = grid;
  const Bandwidths bw = scott_bandwidths(points);
  result.bandwidth_ratio = bw.ratio;
  result.bandwidth_slope = bw.slope;
  result.bandwidth_floored = bw.floored;

  const Eigen::Index nr = grid.ratio.size();
  const Eigen::Index ns = grid.slope.size();
  Eigen::MatrixXd g_ratio(nr, m), g_slope(ns, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& [pr, ps] = points[static_cast<std::size_t>(k)];
    g_ratio.col(k) = (-0.5 * ((grid.ratio.array() - pr) / bw.ratio).square()).exp();
    g_slope.col(k) = (-0.5 * ((grid.slope.array() - ps) / bw.slope).square()).exp();
  }
  const double norm = 1.0 / (static_cast<double>(m) * 2.0 * std::numbers::pi * bw.ratio * bw.slope);
  result.density = norm * (g_ratio * g_slope.transpose());

  double s_min = kInf, s_max = -kInf;
  for (const auto& [pr, ps] : points) {
    s_min = std::min(s_min, ps);
    s_max = std::max(s_max, ps);
  }
  const double s_mid = 0.5 * (s_min + s_max);

  double best = -kInf;
  bool any_eligible = false;
  for (int pass = 0; pass < 2 && !any_eligible; ++pass) {
    // First pass restricts to the most-negative-slope half; if the grid does
    // not reach it, fall back to the whole grid.
    for (Eigen::Index i = 0; i < nr; ++i) {
      for (Eigen::Index j = 0; j < ns; ++j) {
        if (pass == 0 && grid.slope[j] > s_mid) continue;
        any_eligible = true;
        if (result.density(i, j) > best) {
          best = result.density(i, j);
          result.mode_ratio = grid.ratio[i];
          result.mode_slope = grid.slope[j];
        }
      }
    }
  }
  return result;
}

KdeResult kde_slope_vs_ratio(const std::vector<RunRecord>& records, const KdeGrid& grid,
                             Target target) {
  std::vector<std::pair<double, double>> points;
  for (const auto& r : records) {
    if (r.diverged) continue;
    const double slope = target == Target::kValSlope ? r.val_slope : r.train_slope;
    if (std::isfinite(slope)) points.emplace_back(r.ratio, slope);
  }
  if (points.size() < 10)
    throw std::invalid_argument("kde_slope_vs_ratio needs at least 10 finite-slope records");
  return kde2d(points, grid);
}

BinnedDensity binned_slope_density(const std::vector<RunRecord>& records, int n_bins,
                                   int n_slope, Target target) {
  if (n_bins < 1) throw std::invalid_argument("need at least one ratio bin");
  std::vector<std::pair<double, double>> points;
  for (const auto& r : records) {
    if (r.diverged) continue;
    const double slope = target == Target::kValSlope ? r.val_slope : r.train_slope;
    if (std::isfinite(slope)) points.emplace_back(r.ratio, slope);
  }
  if (points.empty()) throw std::invalid_argument("no finite-slope records to bin");

  double r_lo = kInf, r_hi = -kInf, s_lo = kInf, s_hi = -kInf;
  for (const auto& [r, s] : points) {
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
  }
  const double width = (r_hi - r_lo) / n_bins;

  Eigen::VectorXd all_slopes(static_cast<Eigen::Index>(points.size()));
  for (Eigen::Index i = 0; i < all_slopes.size(); ++i)
    all_slopes[i] = points[static_cast<std::size_t>(i)].second;
  const double global_h = std::max(
      population_stddev(all_slopes) * std::pow(static_cast<double>(points.size()), -0.2), 1e-6);

  BinnedDensity out;
  out.slope_grid = linspace(s_lo - 6.0 * global_h, s_hi + 6.0 * global_h, n_slope);
  out.density = Eigen::MatrixXd::Zero(n_bins, n_slope);
  std::vector<std::vector<double>> bins(static_cast<std::size_t>(n_bins));
  for (const auto& [r, s] : points) {
    int b = width == 0.0 ? 0 : static_cast<int>((r - r_lo) / width);
    b = std::clamp(b, 0, n_bins - 1);
    bins[static_cast<std::size_t>(b)].push_back(s);
  }
  for (int b = 0; b < n_bins; ++b) {
    out.bin_centers.push_back(r_lo + (b + 0.5) * width);
    const auto& slopes = bins[static_cast<std::size_t>(b)];
    if (slopes.empty()) continue;
    Eigen::VectorXd sv(static_cast<Eigen::Index>(slopes.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i) sv[i] = slopes[static_cast<std::size_t>(i)];
    const double h = std::max(
        population_stddev(sv) * std::pow(static_cast<double>(slopes.size()), -0.2), 1e-6);
    const double norm = 1.0 / (slopes.size() * std::sqrt(2.0 * std::numbers::pi) * h);
    for (int j = 0; j < n_slope; ++j) {
      double sum = 0.0;
      for (const double s : slopes) {
        const double u = (out.slope_grid[j] - s) / h;
        sum += std::exp(-0.5 * u * u);
      }
      out.density(b, j) = norm * sum;
    }
  }
  return out;
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("pearson_correlation needs at least 2 samples");
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
  if (denom == 0.0) throw std::invalid_argument("pearson_correlation: zero variance input");
  return (ca * cb).sum() / denom;
}

}  // namespace alsm
