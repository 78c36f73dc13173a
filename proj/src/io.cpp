#include "io.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "errors.hpp"

namespace alsm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw IoError("not a number: '" + text + "'");
  return v;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::uint64_t to_le_bits(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
    bits = swapped;
  }
  return bits;
}

double from_le_bits(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
    bits = swapped;
  }
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

json norm_to_json(const NormStats& norm) {
  return json{{"mean", {norm.mean[0], norm.mean[1], norm.mean[2]}},
              {"stddev", {norm.stddev[0], norm.stddev[1], norm.stddev[2]}}};
}

NormStats norm_from_json(const json& j) {
  NormStats norm;
  for (int i = 0; i < 3; ++i) {
    norm.mean[i] = j.at("mean").at(i).get<double>();
    norm.stddev[i] = j.at("stddev").at(i).get<double>();
  }
  return norm;
}

json params_to_json(const LorenzParams& p) {
  return json{{"sigma", p.sigma},
              {"rho", p.rho},
              {"delta", p.delta},
              {"dt", p.dt},
              {"n_steps", p.n_steps},
              {"transient_steps", p.transient_steps},
              {"x0", p.x0},
              {"y0", p.y0},
              {"z0", p.z0}};
}

LorenzParams params_from_json(const json& j) {
  LorenzParams p;
  p.sigma = j.at("sigma").get<double>();
  p.rho = j.at("rho").get<double>();
  p.delta = j.at("delta").get<double>();
  p.dt = j.at("dt").get<double>();
  p.n_steps = j.at("n_steps").get<std::int64_t>();
  p.transient_steps = j.at("transient_steps").get<std::int64_t>();
  p.x0 = j.at("x0").get<double>();
  p.y0 = j.at("y0").get<double>();
  p.z0 = j.at("z0").get<double>();
  return p;
}

void append_window(std::vector<double>& out, const Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out.push_back(rows(r, c));
}

json parse_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path);
  return j;
}

}  // namespace

void write_f64_blob(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (double v : values) {
    const std::uint64_t bits = to_le_bits(v);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<double> read_f64_blob(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  if (bytes % 8 != 0) throw IoError(path + ": size is not a multiple of 8 bytes");
  std::vector<double> values(bytes / 8);
  for (auto& v : values) {
    std::uint64_t bits;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    v = from_le_bits(bits);
  }
  if (!in) throw IoError("read failed: " + path);
  return values;
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
  ensure_dir(dir);

  json manifest;
  manifest["format"] = "alsm-dataset-v1";
  manifest["seed"] = dataset.seed;
  manifest["window_rows"] = kHalfWindow;
  manifest["window_cols"] = kStateDim;
  manifest["counts"] = {{"train", dataset.train.size()},
                        {"val", dataset.val.size()},
                        {"test", dataset.test.size()}};
  manifest["norm"] = norm_to_json(dataset.norm);
  json traj = json::array();
  for (const auto& p : dataset.trajectory_params) traj.push_back(params_to_json(p));
  manifest["trajectory_params"] = traj;

  std::vector<double> blob;
  blob.reserve((dataset.train.size() + dataset.val.size() + dataset.test.size()) * 2 *
               static_cast<std::size_t>(kHalfWindow * kStateDim));
  for (const auto* split : {&dataset.train, &dataset.val, &dataset.test}) {
    for (const auto& w : *split) {
      append_window(blob, w.input);
      append_window(blob, w.target);
    }
  }

  write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
  write_f64_blob(dir + "/windows.f64", blob);
}

Dataset load_dataset(const std::string& dir) {
  const json manifest = parse_json_file(dir + "/manifest.json");
  if (manifest.value("format", "") != "alsm-dataset-v1")
    throw IoError(dir + "/manifest.json: unrecognized dataset format");

  Dataset dataset;
  dataset.seed = manifest.at("seed").get<std::uint64_t>();
  dataset.norm = norm_from_json(manifest.at("norm"));
  for (const auto& pj : manifest.at("trajectory_params"))
    dataset.trajectory_params.push_back(params_from_json(pj));

  const auto rows = manifest.at("window_rows").get<Eigen::Index>();
  const auto cols = manifest.at("window_cols").get<Eigen::Index>();
  if (rows != kHalfWindow || cols != kStateDim)
    throw IoError(dir + ": unexpected window shape in manifest");

  const std::vector<double> blob = read_f64_blob(dir + "/windows.f64");
  const std::size_t per_window = static_cast<std::size_t>(rows * cols);
  const std::size_t n_train = manifest.at("counts").at("train").get<std::size_t>();
  const std::size_t n_val = manifest.at("counts").at("val").get<std::size_t>();
  const std::size_t n_test = manifest.at("counts").at("test").get<std::size_t>();
  if (blob.size() != (n_train + n_val + n_test) * 2 * per_window)
    throw IoError(dir + ": windows.f64 size does not match manifest counts");

  std::size_t pos = 0;
  auto take_matrix = [&] {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = blob[pos++];
    return m;
  };
  auto take_split = [&](std::size_t n) {
    std::vector<WindowPair> split(n);
    for (auto& w : split) {
      w.input = take_matrix();
      w.target = take_matrix();
    }
    return split;
  };
  dataset.train = take_split(n_train);
  dataset.val = take_split(n_val);
  dataset.test = take_split(n_test);
  return dataset;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string reservoir_cache_path(const std::string& dir, const ReservoirSpec& spec) {
  return dir + "/reservoir_" + hex64(spec.seed) + "_" + hex64(spec_hash(spec));
}

void save_reservoir_weights(const std::string& dir, const ReservoirSpec& spec,
                            const ReservoirWeights& weights) {
  ensure_dir(dir);
  const std::string prefix = reservoir_cache_path(dir, spec);

  json manifest;
  manifest["format"] = "alsm-reservoir-v1";
  manifest["seed"] = spec.seed;
  manifest["spec_hash"] = spec_hash(spec);
  json blocks = json::array();
  std::vector<double> blob;
  for (const auto& ref : weight_blocks(weights)) {
    blocks.push_back(json{{"name", ref.name},
                          {"rows", ref.matrix->rows()},
                          {"cols", ref.matrix->cols()}});
    append_window(blob, *ref.matrix);
  }
  manifest["blocks"] = blocks;

  write_text_file(prefix + ".json", manifest.dump(2) + "\n");
  write_f64_blob(prefix + ".f64", blob);
}

std::optional<ReservoirWeights> try_load_reservoir_weights(const std::string& dir,
                                                           const ReservoirSpec& spec) {
  const std::string prefix = reservoir_cache_path(dir, spec);
  if (!fs::exists(prefix + ".json") || !fs::exists(prefix + ".f64")) return std::nullopt;

  const json manifest = parse_json_file(prefix + ".json");
  if (manifest.value("format", "") != "alsm-reservoir-v1" ||
      manifest.at("seed").get<std::uint64_t>() != spec.seed ||
      manifest.at("spec_hash").get<std::uint64_t>() != spec_hash(spec))
    return std::nullopt;

  ReservoirWeights weights;
  weights.sizes = subnet_sizes(spec.n_neurons, spec.n_astrocytes);
  const std::vector<double> blob = read_f64_blob(prefix + ".f64");
  std::size_t pos = 0;
  const auto& blocks = manifest.at("blocks");
  auto refs = mutable_weight_blocks(weights);
  if (blocks.size() != refs.size()) throw IoError(prefix + ".json: wrong block count");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& bj = blocks.at(i);
    if (bj.at("name").get<std::string>() != refs[i].name)
      throw IoError(prefix + ".json: unexpected block order");
    const auto rows = bj.at("rows").get<Eigen::Index>();
    const auto cols = bj.at("cols").get<Eigen::Index>();
    if (pos + static_cast<std::size_t>(rows * cols) > blob.size())
      throw IoError(prefix + ".f64: truncated");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = blob[pos++];
    *refs[i].matrix = std::move(m);
  }
  if (pos != blob.size()) throw IoError(prefix + ".f64: trailing data");
  return weights;
}

void save_mlp(const std::string& prefix, const MlpParams& params) {
  const MlpShape shape = params.shape();
  json manifest;
  manifest["format"] = "alsm-mlp-v1";
  manifest["shape"] = {{"input", shape.input},
                       {"hidden1", shape.hidden1},
                       {"hidden2", shape.hidden2},
                       {"output", shape.output}};

  std::vector<double> blob;
  for (const auto* m : {&params.w1, &params.w2, &params.w3}) append_window(blob, *m);
  for (const auto* b : {&params.b1, &params.b2, &params.b3})
    for (Eigen::Index i = 0; i < b->size(); ++i) blob.push_back((*b)[i]);

  write_text_file(prefix + ".json", manifest.dump(2) + "\n");
  write_f64_blob(prefix + ".f64", blob);
}

MlpParams load_mlp(const std::string& prefix) {
  const json manifest = parse_json_file(prefix + ".json");
  if (manifest.value("format", "") != "alsm-mlp-v1")
    throw IoError(prefix + ".json: unrecognized checkpoint format");
  const auto& sj = manifest.at("shape");
  MlpShape shape;
  shape.input = sj.at("input").get<int>();
  shape.hidden1 = sj.at("hidden1").get<int>();
  shape.hidden2 = sj.at("hidden2").get<int>();
  shape.output = sj.at("output").get<int>();

  MlpParams params;
  params.w1.resize(shape.hidden1, shape.input);
  params.w2.resize(shape.hidden2, shape.hidden1);
  params.w3.resize(shape.output, shape.hidden2);
  params.b1.resize(shape.hidden1);
  params.b2.resize(shape.hidden2);
  params.b3.resize(shape.output);

  const std::vector<double> blob = read_f64_blob(prefix + ".f64");
  const std::size_t expect = static_cast<std::size_t>(
      params.w1.size() + params.w2.size() + params.w3.size() + params.b1.size() +
      params.b2.size() + params.b3.size());
  if (blob.size() != expect) throw IoError(prefix + ".f64: size mismatch with shape");

  std::size_t pos = 0;
  for (auto* m : {&params.w1, &params.w2, &params.w3})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = blob[pos++];
  for (auto* b : {&params.b1, &params.b2, &params.b3})
    for (Eigen::Index i = 0; i < b->size(); ++i) (*b)[i] = blob[pos++];
  return params;
}

void write_batch_losses_csv(const std::string& path, const LossHistory& history) {
  std::string out = "epoch,batch_index,train_loss\n";
  for (std::size_t i = 0; i < history.batch_losses.size(); ++i) {
    out += std::to_string(history.batch_epochs[i]);
    out += ',';
    out += std::to_string(i);
    out += ',';
    out += fmt_g17(history.batch_losses[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_epoch_losses_csv(const std::string& path, const LossHistory& history) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < history.epoch_train.size(); ++e) {
    out += std::to_string(e);
    out += ',';
    out += fmt_g17(history.epoch_train[e]);
    out += ',';
    out += fmt_g17(history.epoch_val[e]);
    out += '\n';
  }
  write_text_file(path, out);
}

std::pair<std::vector<double>, std::vector<double>> read_epoch_losses_csv(
    const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "epoch,train_loss,val_loss")
    throw IoError(path + ": unexpected header");
  std::vector<double> train, val;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw IoError(path + ": malformed row '" + line + "'");
    train.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
    val.push_back(parse_double(line.substr(c2 + 1)));
  }
  return {train, val};
}

}  // namespace alsm
