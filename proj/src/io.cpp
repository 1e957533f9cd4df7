#include "rteq/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "dataset container assumes a little-endian host");

namespace rteq {

namespace {

using nlohmann::json;

constexpr char kDatasetMagic[4] = {'R', 'T', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["cases"] = c.cases;
  j["model"] = c.model;
  j["n_values"] = c.n_values;
  j["seeds"] = c.seeds;
  j["mu"] = c.mu;
  j["rotation_count"] = c.rotation_count;
  j["mlp"] = {{"hidden_sizes", c.mlp.hidden_sizes},
              {"learning_rate", c.mlp.learning_rate},
              {"batch_size", c.mlp.batch_size},
              {"epochs", c.mlp.epochs}};
  j["forest"] = {{"n_estimators", c.forest.n_estimators},
                 {"max_depth", c.forest.max_depth},
                 {"subsample_fraction", c.forest.subsample_fraction}};
  j["output_dir"] = c.output_dir;
  return j;
}

void config_from_json(const json& j, RunConfig& c) {
  if (j.contains("schema_version")) {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != 1) throw std::runtime_error("unsupported config schema_version");
  }
  if (j.contains("cases")) c.cases = j.at("cases").get<std::vector<std::string>>();
  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (j.contains("n_values")) c.n_values = j.at("n_values").get<std::vector<std::size_t>>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("mu")) c.mu = j.at("mu").get<double>();
  if (j.contains("rotation_count")) c.rotation_count = j.at("rotation_count").get<std::size_t>();
  if (j.contains("mlp")) {
    const json& m = j.at("mlp");
    if (m.contains("hidden_sizes")) c.mlp.hidden_sizes = m.at("hidden_sizes").get<std::vector<int>>();
    if (m.contains("learning_rate")) c.mlp.learning_rate = m.at("learning_rate").get<double>();
    if (m.contains("batch_size")) c.mlp.batch_size = m.at("batch_size").get<int>();
    if (m.contains("epochs")) c.mlp.epochs = m.at("epochs").get<int>();
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    if (f.contains("n_estimators")) c.forest.n_estimators = f.at("n_estimators").get<int>();
    if (f.contains("max_depth")) c.forest.max_depth = f.at("max_depth").get<int>();
    if (f.contains("subsample_fraction"))
      c.forest.subsample_fraction = f.at("subsample_fraction").get<double>();
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
}

void write_string(std::ostream& out, const std::string& s) {
  const std::uint32_t len = static_cast<std::uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  std::uint32_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)))
    throw std::runtime_error("dataset file: truncated string");
  if (len > (1u << 20)) throw std::runtime_error("dataset file: implausible string length");
  std::string s(len, '\0');
  if (len && !in.read(s.data(), static_cast<std::streamsize>(len)))
    throw std::runtime_error("dataset file: truncated string");
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kReportHeader =
    "case,arm,model,n_total,n_train,seed,train_e,test_e,e_d,e_m,"
    "error_reduction_train,error_reduction_test,config_hash,status";

}  // namespace

std::vector<std::size_t> full_n_grid() {
  std::vector<std::size_t> n;
  for (std::size_t k = 10000; k <= 100000; k += 10000) n.push_back(k);
  return n;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }
  RunConfig cfg;
  config_from_json(j, cfg);
  return cfg;
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config '" + path.string() + "'");
  out << config_to_json(cfg).dump(2) << "\n";
}

std::string config_hash(const RunConfig& cfg) {
  return hex64(fnv1a64(config_to_json(cfg).dump()));
}

std::string row_hash(const RunConfig& cfg, const std::string& case_name, const std::string& arm,
                     const std::string& model, std::size_t n, std::uint64_t seed) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["case"] = case_name;
  j["arm"] = arm;
  j["model"] = model;
  j["n"] = n;
  j["seed"] = seed;
  j["mu"] = cfg.mu;
  j["rotation_count"] = cfg.rotation_count;
  j["mlp"] = config_to_json(cfg)["mlp"];
  j["forest"] = config_to_json(cfg)["forest"];
  return hex64(fnv1a64(j.dump()));
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  out.write(kDatasetMagic, 4);
  auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  auto w64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  w32(kDatasetVersion);
  write_string(out, d.meta.case_name);
  w64(d.n);
  w64(d.seed);
  out.write(reinterpret_cast<const char*>(&d.meta.mu), sizeof(double));
  w32(static_cast<std::uint32_t>(d.d_in));
  w32(static_cast<std::uint32_t>(d.d_out));

  w32(static_cast<std::uint32_t>(d.meta.input_shape.scalar_names.size()));
  for (const auto& s : d.meta.input_shape.scalar_names) write_string(out, s);
  w32(static_cast<std::uint32_t>(d.meta.input_shape.tensor_orders.size()));
  for (const auto& [name, order] : d.meta.input_shape.tensor_orders) {
    write_string(out, name);
    w32(static_cast<std::uint32_t>(order));
  }
  write_string(out, d.meta.input_shape.anchor);
  write_string(out, d.meta.label_name);
  w32(static_cast<std::uint32_t>(d.meta.label_order));
  w64(d.train_idx.size());

  out.write(reinterpret_cast<const char*>(d.features.data()),
            static_cast<std::streamsize>(d.features.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(d.labels.data()),
            static_cast<std::streamsize>(d.labels.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");

  char magic[4] = {};
  if (!in.read(magic, 4) || std::string_view(magic, 4) != std::string_view(kDatasetMagic, 4))
    throw std::runtime_error("dataset file: bad magic");
  auto r32 = [&]() {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
      throw std::runtime_error("dataset file: truncated");
    return v;
  };
  auto r64 = [&]() {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
      throw std::runtime_error("dataset file: truncated");
    return v;
  };
  if (r32() != kDatasetVersion) throw std::runtime_error("dataset file: unsupported version");

  Dataset d;
  d.meta.case_name = read_string(in);
  d.n = r64();
  d.seed = r64();
  if (!in.read(reinterpret_cast<char*>(&d.meta.mu), sizeof(double)))
    throw std::runtime_error("dataset file: truncated");
  d.d_in = r32();
  d.d_out = r32();

  const std::uint32_t n_scalars = r32();
  for (std::uint32_t i = 0; i < n_scalars; ++i)
    d.meta.input_shape.scalar_names.push_back(read_string(in));
  const std::uint32_t n_tensors = r32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = read_string(in);
    const int order = static_cast<int>(r32());
    d.meta.input_shape.tensor_orders.emplace_back(std::move(name), order);
  }
  d.meta.input_shape.anchor = read_string(in);
  d.meta.label_name = read_string(in);
  d.meta.label_order = static_cast<int>(r32());
  const std::uint64_t n_train = r64();
  if (n_train > d.n) throw std::runtime_error("dataset file: bad split size");

  d.features.resize(d.n * d.d_in);
  d.labels.resize(d.n * d.d_out);
  if (!in.read(reinterpret_cast<char*>(d.features.data()),
               static_cast<std::streamsize>(d.features.size() * sizeof(double))) ||
      !in.read(reinterpret_cast<char*>(d.labels.data()),
               static_cast<std::streamsize>(d.labels.size() * sizeof(double))))
    throw std::runtime_error("dataset file: truncated data block");

  d.train_idx.resize(n_train);
  d.test_idx.resize(d.n - n_train);
  for (std::size_t i = 0; i < n_train; ++i) d.train_idx[i] = i;
  for (std::size_t i = n_train; i < d.n; ++i) d.test_idx[i - n_train] = i;
  return d;
}

namespace {

void entry_names(const std::string& base, int order, std::vector<std::string>& out) {
  std::size_t count = 1;
  for (int k = 0; k < order; ++k) count *= 3;
  for (std::size_t i = 0; i < count; ++i) {
    std::string suffix(static_cast<std::size_t>(order), '0');
    std::size_t rem = i;
    for (int d = order - 1; d >= 0; --d) {
      suffix[static_cast<std::size_t>(d)] = static_cast<char>('0' + rem % 3);
      rem /= 3;
    }
    out.push_back(order == 0 ? base : base + "_" + suffix);
  }
}

}  // namespace

void export_dataset_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

  std::vector<std::string> cols;
  for (const auto& s : d.meta.input_shape.scalar_names) cols.push_back(s);
  for (const auto& [name, order] : d.meta.input_shape.tensor_orders)
    entry_names(name, order, cols);
  entry_names(d.meta.label_name, d.meta.label_order, cols);

  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = 0; j < d.d_in; ++j)
      out << (j ? "," : "") << format_double(d.features[i * d.d_in + j]);
    for (std::size_t j = 0; j < d.d_out; ++j)
      out << "," << format_double(d.labels[i * d.d_out + j]);
    out << "\n";
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string report_row_line(const EvalReport& r) {
  std::ostringstream os;
  os << r.case_name << ',' << r.arm << ',' << r.model_kind << ',' << r.n_total << ','
     << r.n_train << ',' << r.seed << ',' << format_double(r.train_e) << ','
     << format_double(r.test_e) << ',' << (r.e_d ? format_double(*r.e_d) : "") << ','
     << (r.e_m ? format_double(*r.e_m) : "") << ','
     << (r.error_reduction_train ? format_double(*r.error_reduction_train) : "") << ','
     << (r.error_reduction_test ? format_double(*r.error_reduction_test) : "") << ','
     << r.config_hash << ',' << r.status;
  return os.str();
}

void append_lines(const std::filesystem::path& path, const std::string& header,
                  const std::vector<std::string>& lines) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for appending");
  if (fresh) out << header << "\n";
  for (const auto& l : lines) out << l << "\n";
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

void append_report_rows(const std::filesystem::path& path, std::span<const EvalReport> rows) {
  std::vector<std::string> lines;
  lines.reserve(rows.size());
  for (const EvalReport& r : rows) lines.push_back(report_row_line(r));
  append_lines(path, kReportHeader, lines);
}

void append_timing_rows(const std::filesystem::path& path, std::span<const EvalReport> rows) {
  std::vector<std::string> lines;
  for (const EvalReport& r : rows) {
    std::ostringstream os;
    os << r.config_hash << ',' << r.case_name << ',' << r.arm << ',' << r.model_kind << ','
       << r.n_total << ',' << r.seed << ',' << format_double(r.wall_time_s);
    lines.push_back(os.str());
  }
  append_lines(path, "config_hash,case,arm,model,n_total,seed,wall_time_s", lines);
}

void append_curve_rows(const std::filesystem::path& path, std::span<const EvalReport> rows) {
  std::vector<std::string> lines;
  for (const EvalReport& r : rows) {
    for (const char* split : {"train", "test"}) {
      std::ostringstream os;
      os << r.case_name << ',' << r.model_kind << ',' << r.arm << ',' << r.n_train << ','
         << r.seed << ',' << split << ','
         << format_double(split == std::string("train") ? r.train_e : r.test_e);
      lines.push_back(os.str());
    }
  }
  append_lines(path, "case,model,arm,n_train,seed,split,e", lines);
}

std::map<std::string, ExistingRow> existing_report_rows(const std::filesystem::path& path) {
  std::map<std::string, ExistingRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 14) continue;
    ExistingRow r;
    r.train_e = f[6].empty() ? 0.0 : std::stod(f[6]);
    r.test_e = f[7].empty() ? 0.0 : std::stod(f[7]);
    r.status = f[13];
    rows[f[12]] = r;
  }
  return rows;
}

}  // namespace rteq
