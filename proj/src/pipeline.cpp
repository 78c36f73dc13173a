#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "analysis.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "plot.hpp"
#include "records.hpp"
#include "reservoir.hpp"
#include "rng.hpp"
#include "sweep.hpp"
#include "trainer.hpp"
#include "version.hpp"

namespace alsm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed stream tags so the stages never share a random stream.
constexpr std::uint64_t kDataTag = 0xda7a;
constexpr std::uint64_t kReservoirTag = 0x0e55;
constexpr std::uint64_t kTrainTag = 0x7a11;

std::vector<RunRecord> usable_for_analysis(const std::vector<RunRecord>& records) {
  std::vector<RunRecord> usable;
  for (const auto& r : records)
    if (!r.diverged && std::isfinite(r.train_slope)) usable.push_back(r);
  return usable;
}

}  // namespace

void cmd_generate(const PipelineConfig& cfg, const std::string& out_dir) {
  DatasetConfig dc = cfg.lorenz;
  dc.seed = mix_seed(cfg.seed, kDataTag);
  const Dataset dataset = build_dataset(dc);
  save_dataset(out_dir, dataset);
  write_resolved_config(out_dir, cfg);
}

ReservoirSpec resolved_reservoir_spec(const PipelineConfig& cfg) {
  ReservoirSpec spec = cfg.reservoir;
  spec.seed = mix_seed(cfg.seed, kReservoirTag);
  return spec;
}

void cmd_train(const PipelineConfig& cfg, const std::string& dataset_dir,
               const std::string& out_dir) {
  if (!fs::exists(dataset_dir + "/manifest.json"))
    throw IoError("dataset not found: expected " + dataset_dir + "/manifest.json");
  const Dataset dataset = load_dataset(dataset_dir);

  const ReservoirSpec spec = resolved_reservoir_spec(cfg);
  ReservoirWeights weights;
  if (auto cached = try_load_reservoir_weights(out_dir, spec)) {
    weights = std::move(*cached);
  } else {
    weights = build(spec);
    save_reservoir_weights(out_dir, spec, weights);
  }

  TrainOptions opts;
  opts.epochs = cfg.training.epochs;
  opts.batch_size = cfg.training.batch_size;
  opts.hidden1 = cfg.training.hidden1;
  opts.hidden2 = cfg.training.hidden2;
  opts.adam = cfg.training.adam;
  opts.seed = mix_seed(cfg.seed, kTrainTag);
  opts.jobs = cfg.jobs;

  const TrainResult result = train(weights, spec, dataset, opts);
  ensure_dir(out_dir);
  write_batch_losses_csv(out_dir + "/batch_losses.csv", result.history);
  write_epoch_losses_csv(out_dir + "/epoch_losses.csv", result.history);
  save_mlp(out_dir + "/mlp", result.params);
  write_resolved_config(out_dir, cfg);
  if (result.history.diverged)
    throw DivergenceError("training diverged; partial loss history written to " + out_dir);
}

void cmd_sweep(const PipelineConfig& cfg, const std::string& dataset_dir,
               const std::string& out_dir) {
  if (!fs::exists(dataset_dir + "/manifest.json"))
    throw IoError("dataset not found: expected " + dataset_dir + "/manifest.json");
  const Dataset dataset = load_dataset(dataset_dir);
  const std::vector<RunRecord> records = run_sweep(cfg, dataset, out_dir);
  write_records_csv(out_dir + "/records.csv", records);
  write_resolved_config(out_dir, cfg);
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void write_ols_csvs(const std::string& out_dir, const std::vector<RunRecord>& records) {
  const Target targets[] = {Target::kTrainSlope, Target::kValSlope, Target::kTrainPlateau,
                            Target::kValPlateau};

  std::string summary =
      "target,intercept,beta_N,beta_A,beta_A_plus_N,r_squared,vif_N,vif_A,vif_A_plus_N\n";
  std::string sub = "target,dropped,term,coefficient,std_error,t_stat,r_squared\n";
  for (const Target t : targets) {
    const RegressionResult ols = ols_regression(records, t);
    summary += target_name(t);
    for (int j = 0; j < 4; ++j) summary += "," + fmt_g17(ols.coefficients[j]);
    summary += "," + fmt_g17(ols.r_squared);
    for (int j = 0; j < 3; ++j) summary += "," + fmt_g17(ols.vif[j]);
    summary += "\n";

    for (int drop = 0; drop < 3; ++drop) {
      const SubDesignStats stats = sub_design_stats(records, t, drop);
      for (std::size_t j = 0; j < stats.names.size(); ++j) {
        sub += target_name(t);
        sub += ",";
        sub += kFactorNames[drop];
        sub += "," + stats.names[j];
        sub += "," + fmt_g17(stats.coefficients[static_cast<Eigen::Index>(j)]);
        sub += "," + fmt_g17(stats.std_errors[static_cast<Eigen::Index>(j)]);
        sub += "," + fmt_g17(stats.t_stats[static_cast<Eigen::Index>(j)]);
        sub += "," + fmt_g17(stats.r_squared);
        sub += "\n";
      }
    }
  }
  write_text_file(out_dir + "/ols_summary.csv", summary);
  write_text_file(out_dir + "/ols_subdesigns.csv", sub);
}

void write_lasso_fit_csv(const std::string& path, const LassoResult& fit) {
  std::string out = "actual,fitted\n";
  for (Eigen::Index i = 0; i < fit.actual.size(); ++i)
    out += fmt_g17(fit.actual[i]) + "," + fmt_g17(fit.fitted[i]) + "\n";
  write_text_file(path, out);
}

}  // namespace

void cmd_analyze(const PipelineConfig& cfg, const std::string& records_path,
                 const std::string& out_dir) {
  if (!fs::exists(records_path)) throw IoError("records file not found: " + records_path);
  const std::vector<RunRecord> records = read_records_csv(records_path);
  const std::vector<RunRecord> usable = usable_for_analysis(records);
  // Validate up front: the sparse fit and the density map need 10 usable
  // records, and failing halfway would leave a partially written directory.
  if (usable.size() < 10)
    throw ConfigError("analysis needs at least 10 non-diverged records with finite slopes, got " +
                      std::to_string(usable.size()));

  const Target targets[] = {Target::kTrainSlope, Target::kValSlope, Target::kTrainPlateau,
                            Target::kValPlateau};
  json summary;
  summary["version"] = ALSM_VERSION_STRING;
  summary["records"] = {{"total", records.size()},
                        {"usable", usable.size()},
                        {"diverged", records.size() - usable.size()}};

  // Fit everything before writing anything.
  std::vector<LassoResult> lasso_fits;
  for (const Target t : targets)
    lasso_fits.push_back(
        lasso_regression(records, t, default_lambda_grid(records, t, cfg.analysis.lambda_grid_size)));

  std::vector<std::pair<double, double>> points;
  for (const auto& r : usable) points.emplace_back(r.ratio, r.train_slope);
  const KdeGrid grid = default_kde_grid(points, cfg.analysis.kde_ratio_points,
                                        cfg.analysis.kde_slope_points);
  const KdeResult kde = kde_slope_vs_ratio(records, grid);
  const BinnedDensity binned = binned_slope_density(records, 10);

  ensure_dir(out_dir);
  write_records_csv(out_dir + "/scatter.csv", records);
  write_ols_csvs(out_dir, records);

  std::string lasso_csv =
      "target,lambda,intercept,coef_N,coef_A,coef_A_plus_N,reconstruction_correlation,"
      "converged,selected\n";
  for (std::size_t i = 0; i < lasso_fits.size(); ++i) {
    const LassoResult& fit = lasso_fits[i];
    lasso_csv += target_name(targets[i]);
    lasso_csv += "," + fmt_g17(fit.lambda);
    lasso_csv += "," + fmt_g17(fit.intercept);
    for (int j = 0; j < 3; ++j) lasso_csv += "," + fmt_g17(fit.coefficients[j]);
    lasso_csv += "," + fmt_g17(fit.reconstruction_correlation);
    lasso_csv += fit.converged ? ",1," : ",0,";
    lasso_csv += join(fit.selected, ";");
    lasso_csv += "\n";

    summary["lasso"][target_name(targets[i])] = {
        {"lambda", fit.lambda},
        {"reconstruction_correlation", fit.reconstruction_correlation},
        {"selected", fit.selected},
        {"converged", fit.converged}};
  }
  write_text_file(out_dir + "/lasso_summary.csv", lasso_csv);
  write_lasso_fit_csv(out_dir + "/lasso_fit_train_slope.csv", lasso_fits[0]);
  write_lasso_fit_csv(out_dir + "/lasso_fit_val_slope.csv", lasso_fits[1]);

  std::string kde_csv = "ratio,slope,density\n";
  for (Eigen::Index i = 0; i < kde.grid.ratio.size(); ++i)
    for (Eigen::Index j = 0; j < kde.grid.slope.size(); ++j)
      kde_csv += fmt_g17(kde.grid.ratio[i]) + "," + fmt_g17(kde.grid.slope[j]) + "," +
                 fmt_g17(kde.density(i, j)) + "\n";
  write_text_file(out_dir + "/kde_train_slope.csv", kde_csv);

  std::string binned_csv = "ratio_bin_center,slope,density\n";
  for (std::size_t b = 0; b < binned.bin_centers.size(); ++b)
    for (Eigen::Index j = 0; j < binned.slope_grid.size(); ++j)
      binned_csv += fmt_g17(binned.bin_centers[b]) + "," + fmt_g17(binned.slope_grid[j]) + "," +
                    fmt_g17(binned.density(static_cast<Eigen::Index>(b), j)) + "\n";
  write_text_file(out_dir + "/kde_binned_train_slope.csv", binned_csv);

  summary["kde"] = {{"mode_ratio", kde.mode_ratio},
                    {"mode_slope", kde.mode_slope},
                    {"bandwidth_ratio", kde.bandwidth_ratio},
                    {"bandwidth_slope", kde.bandwidth_slope},
                    {"bandwidth_floored", kde.bandwidth_floored}};
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");
  write_resolved_config(out_dir, cfg);
}

namespace {

LassoResult load_fit_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "actual,fitted")
    throw IoError(path + ": unexpected header");
  std::vector<double> actual, fitted;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path + ": malformed row");
    actual.push_back(parse_double(line.substr(0, comma)));
    fitted.push_back(parse_double(line.substr(comma + 1)));
  }
  LassoResult fit;
  fit.actual = Eigen::Map<const Eigen::VectorXd>(actual.data(),
                                                 static_cast<Eigen::Index>(actual.size()));
  fit.fitted = Eigen::Map<const Eigen::VectorXd>(fitted.data(),
                                                 static_cast<Eigen::Index>(fitted.size()));
  if (fit.actual.size() >= 2) {
    const bool flat = (fit.actual.array() == fit.actual[0]).all() ||
                      (fit.fitted.array() == fit.fitted[0]).all();
    fit.reconstruction_correlation =
        flat ? 0.0 : pearson_correlation(fit.fitted, fit.actual);
  }
  return fit;
}

KdeResult load_kde_csv(const std::string& path, const json& summary) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "ratio,slope,density")
    throw IoError(path + ": unexpected header");
  std::vector<double> ratios, slopes, density;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw IoError(path + ": malformed row");
    const double r = parse_double(line.substr(0, c1));
    const double s = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
    density.push_back(parse_double(line.substr(c2 + 1)));
    if (ratios.empty() || r != ratios.back()) ratios.push_back(r);
    if (ratios.size() == 1) slopes.push_back(s);
  }
  KdeResult kde;
  const auto nr = static_cast<Eigen::Index>(ratios.size());
  const auto ns = static_cast<Eigen::Index>(slopes.size());
  if (nr * ns != static_cast<Eigen::Index>(density.size()))
    throw IoError(path + ": rows do not form a full grid");
  kde.grid.ratio = Eigen::Map<const Eigen::VectorXd>(ratios.data(), nr);
  kde.grid.slope = Eigen::Map<const Eigen::VectorXd>(slopes.data(), ns);
  kde.density.resize(nr, ns);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index j = 0; j < ns; ++j)
      kde.density(i, j) = density[static_cast<std::size_t>(i * ns + j)];
  const auto& kj = summary.at("kde");
  kde.mode_ratio = kj.at("mode_ratio").get<double>();
  kde.mode_slope = kj.at("mode_slope").get<double>();
  kde.bandwidth_ratio = kj.at("bandwidth_ratio").get<double>();
  kde.bandwidth_slope = kj.at("bandwidth_slope").get<double>();
  kde.bandwidth_floored = kj.at("bandwidth_floored").get<bool>();
  return kde;
}

}  // namespace

void cmd_plot(const PipelineConfig& cfg, const std::string& analysis_dir,
              const std::string& out_dir) {
  for (const char* name : {"/scatter.csv", "/lasso_fit_train_slope.csv",
                           "/lasso_fit_val_slope.csv", "/kde_train_slope.csv", "/summary.json"})
    if (!fs::exists(analysis_dir + name))
      throw IoError("analysis artifact not found: " + analysis_dir + name);

  const std::vector<RunRecord> records = read_records_csv(analysis_dir + "/scatter.csv");
  const LassoResult train_fit = load_fit_csv(analysis_dir + "/lasso_fit_train_slope.csv");
  const LassoResult val_fit = load_fit_csv(analysis_dir + "/lasso_fit_val_slope.csv");
  json summary = json::parse(read_text_file(analysis_dir + "/summary.json"), nullptr, false);
  if (summary.is_discarded()) throw IoError(analysis_dir + "/summary.json: invalid JSON");
  const KdeResult kde = load_kde_csv(analysis_dir + "/kde_train_slope.csv", summary);

  // Validate before emitting: an empty record set must not leave partial output.
  if (usable_for_analysis(records).empty())
    throw ConfigError("no plottable records in " + analysis_dir + "/scatter.csv");
  if (train_fit.actual.size() == 0 || val_fit.actual.size() == 0)
    throw ConfigError("empty reconstruction fits in " + analysis_dir);

  ensure_dir(out_dir);
  plot_slope_vs_size(out_dir + "/fig_slope_vs_size.svg", records);
  plot_lasso_reconstruction(out_dir + "/fig_lasso_reconstruction.svg", train_fit, val_fit);
  plot_kde_heatmap(out_dir + "/fig_kde_ratio.svg", kde);
  write_resolved_config(out_dir, cfg);
}

}  // namespace alsm
