#include "records.hpp"

#include <sstream>

#include "errors.hpp"
#include "io.hpp"

namespace alsm {

namespace {

const char* kHeader =
    "n_neurons,n_astrocytes,proportion_index,seed_index,ratio,"
    "train_slope,val_slope,"
    "train_plateau,train_plateau_epoch,train_plateau_fallback,"
    "val_plateau,val_plateau_epoch,val_plateau_fallback,"
    "diverged,loss_dir";

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw IoError("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw IoError("not a 0/1 flag: '" + s + "'");
}

}  // namespace

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& r : records) {
    if (r.loss_dir.find(',') != std::string::npos ||
        r.loss_dir.find('\n') != std::string::npos)
      throw IoError("loss_dir contains a CSV delimiter: " + r.loss_dir);
    out += std::to_string(r.n_neurons);
    out += ',';
    out += std::to_string(r.n_astrocytes);
    out += ',';
    out += std::to_string(r.proportion_index);
    out += ',';
    out += std::to_string(r.seed_index);
    out += ',';
    out += fmt_g17(r.ratio);
    out += ',';
    out += fmt_g17(r.train_slope);
    out += ',';
    out += fmt_g17(r.val_slope);
    out += ',';
    out += fmt_g17(r.train_plateau);
    out += ',';
    out += std::to_string(r.train_plateau_epoch);
    out += ',';
    out += (r.train_plateau_fallback ? "1" : "0");
    out += ',';
    out += fmt_g17(r.val_plateau);
    out += ',';
    out += std::to_string(r.val_plateau_epoch);
    out += ',';
    out += (r.val_plateau_fallback ? "1" : "0");
    out += ',';
    out += (r.diverged ? "1" : "0");
    out += ',';
    out += r.loss_dir;
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw IoError(path + ": unexpected records header");

  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 15) throw IoError(path + ": malformed row '" + line + "'");
    RunRecord r;
    r.n_neurons = parse_int(f[0]);
    r.n_astrocytes = parse_int(f[1]);
    r.proportion_index = parse_int(f[2]);
    r.seed_index = parse_int(f[3]);
    r.ratio = parse_double(f[4]);
    r.train_slope = parse_double(f[5]);
    r.val_slope = parse_double(f[6]);
    r.train_plateau = parse_double(f[7]);
    r.train_plateau_epoch = parse_int(f[8]);
    r.train_plateau_fallback = parse_bool(f[9]);
    r.val_plateau = parse_double(f[10]);
    r.val_plateau_epoch = parse_int(f[11]);
    r.val_plateau_fallback = parse_bool(f[12]);
    r.diverged = parse_bool(f[13]);
    r.loss_dir = f[14];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace alsm
