#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "records.hpp"

namespace alsm {

// OLS slope of loss vs. epoch index over the first 10 epochs.
double learning_rate(const std::vector<double>& epoch_losses);

struct PlateauResult {
  double mean = 0.0;     // mean loss from start_epoch to the end
  int start_epoch = 0;
  bool fallback = false; // criterion never triggered; last 10% used instead
};

// Finds where the loss curve flattens: first differences are smoothed with a
// trailing window (full windows only) and the plateau starts once the
// smoothed slope drops to 1% of its initial magnitude.
PlateauResult plateau_loss(const std::vector<double>& epoch_losses, int window = 5);

enum class Target { kTrainSlope, kValSlope, kTrainPlateau, kValPlateau };

std::string target_name(Target t);
Eigen::VectorXd target_values(const std::vector<RunRecord>& records, Target t);

// Predictor columns N, A, A+N for each record (the interaction column is an
// exact linear combination of the first two, which is the point: the design
// is rank-deficient by construction).
Eigen::MatrixXd factor_matrix(const std::vector<RunRecord>& records);

extern const char* const kFactorNames[3];  // "N", "A", "A_plus_N"

struct RegressionResult {
  Eigen::VectorXd coefficients;  // intercept, N, A, A+N (minimum-norm)
  double r_squared = 0.0;
  Eigen::VectorXd vif;           // one per factor; +inf on exact collinearity
  Eigen::VectorXd fitted;
};

// Least squares on the rank-deficient design [1, N, A, A+N]. The fit is
// unique even though the coefficients are not; the minimum-norm solution is
// returned and the VIFs document the collinearity.
RegressionResult ols_regression(const std::vector<RunRecord>& records, Target target);

struct SubDesignStats {
  std::vector<std::string> names;  // intercept first
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_stats;
  double r_squared = 0.0;
};

// Classical inference is only well-posed once one collinear column is
// dropped; `drop` is the factor index (0 = N, 1 = A, 2 = A+N) to leave out.
SubDesignStats sub_design_stats(const std::vector<RunRecord>& records, Target target, int drop);

struct LassoResult {
  Eigen::VectorXd coefficients;  // on standardized predictors, exact zeros possible
  double intercept = 0.0;
  double lambda = 0.0;
  double reconstruction_correlation = 0.0;
  std::vector<std::string> selected;  // factors with nonzero coefficients
  bool converged = true;  // the refit at the chosen lambda converged
  Eigen::VectorXd fitted;
  Eigen::VectorXd actual;
};

// Cyclic coordinate descent with soft-thresholding for
//   (1/(2m))*||y - Z*b||^2 + lambda*||b||_1
// on an arbitrary design. y must already be centered if no intercept is
// wanted. Stops when max |delta b| < 1e-8; sets *converged false if the sweep
// cap is hit first. Exposed separately so tests can drive it directly.
Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                         double lambda, bool* converged = nullptr,
                                         int max_sweeps = 100000);

// Log-spaced grid from lambda_max (the smallest penalty that zeroes every
// coefficient) down four decades.
std::vector<double> default_lambda_grid(const std::vector<RunRecord>& records, Target target,
                                        int size = 60);

// Standardizes the factors, selects lambda by 5-fold cross-validated MSE
// (fold of record i = i mod 5; ties go to the larger lambda) and refits on
// all records.
LassoResult lasso_regression(const std::vector<RunRecord>& records, Target target,
                             const std::vector<double>& lambda_grid);

struct KdeGrid {
  Eigen::VectorXd ratio;
  Eigen::VectorXd slope;
};

struct KdeResult {
  KdeGrid grid;
  Eigen::MatrixXd density;  // density(i, j) at (ratio[i], slope[j])
  double bandwidth_ratio = 0.0;
  double bandwidth_slope = 0.0;
  bool bandwidth_floored = false;
  double mode_ratio = 0.0;  // mode within the most-negative-slope half
  double mode_slope = 0.0;
};

// Product-Gaussian 2-D KDE with per-dimension Scott's-rule bandwidth
// (sigma * m^(-1/6)), floored at 1e-6. The reported mode is restricted to
// grid points whose slope coordinate lies in the lower (most negative) half
// of the data's slope range.
KdeResult kde2d(const std::vector<std::pair<double, double>>& points, const KdeGrid& grid);

// Grid covering the data plus `pad` bandwidths on each side.
KdeGrid default_kde_grid(const std::vector<std::pair<double, double>>& points, int n_ratio = 201,
                         int n_slope = 201, double pad = 6.0);

// kde2d over (ratio, slope) pairs of the non-diverged, finite-slope records.
KdeResult kde_slope_vs_ratio(const std::vector<RunRecord>& records, const KdeGrid& grid,
                             Target target = Target::kTrainSlope);

// 1-D alternative view: per ratio bin, a Gaussian KDE over slopes. Row b of
// the returned density is the (unit-integral) slope density of bin b; empty
// bins give zero rows.
struct BinnedDensity {
  std::vector<double> bin_centers;
  Eigen::VectorXd slope_grid;
  Eigen::MatrixXd density;
};

BinnedDensity binned_slope_density(const std::vector<RunRecord>& records, int n_bins,
                                   int n_slope = 201, Target target = Target::kTrainSlope);

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace alsm
