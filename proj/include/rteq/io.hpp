#pragma once

#include <filesystem>
#include <map>
#include <set>

#include "rteq/eval.hpp"

namespace rteq {

/// Run configuration: every hyperparameter of the protocol, pre-filled with
/// sensible defaults so an empty config file runs the desk preset.
struct RunConfig {
  int schema_version = 1;
  std::vector<std::string> cases = {"newtonian", "les", "third_order", "electrostriction"};
  std::string model = "mlp";
  std::vector<std::size_t> n_values = {2000, 10000};  // desk preset grid
  std::vector<std::uint64_t> seeds = {1};
  double mu = 1.0;
  std::size_t rotation_count = 10000;
  MlpConfig mlp;
  ForestConfig forest;
  std::string output_dir = "out";
};

/// Full-scale N grid (10,000 .. 100,000 step 10,000).
std::vector<std::size_t> full_n_grid();

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

/// FNV-1a 64 hex digest of the canonically serialized (sorted-key JSON)
/// config; platform-independent.
std::string config_hash(const RunConfig& cfg);

/// Digest identifying one report row's work unit.
std::string row_hash(const RunConfig& cfg, const std::string& case_name, const std::string& arm,
                     const std::string& model, std::size_t n, std::uint64_t seed);

// --- dataset container ------------------------------------------------------

/// Self-describing binary: magic "RTDS", version, case/shape metadata,
/// split size, then little-endian f64 feature and label blocks. Writing the
/// same dataset twice produces byte-identical files.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// One row per sample with named columns (p, S_00, ..., sigma_22, ...).
void export_dataset_csv(const Dataset& d, const std::filesystem::path& path);

// --- report output ----------------------------------------------------------

/// %.17g, round-trip exact and byte-stable.
std::string format_double(double v);

/// Appends rows to report.csv (header written if the file is new). Columns:
/// case,arm,model,n_total,n_train,seed,train_e,test_e,e_d,e_m,
/// error_reduction_train,error_reduction_test,config_hash,status
/// Deliberately excludes wall time, which lives in timings.csv, so repeated
/// runs of the same config are byte-identical.
void append_report_rows(const std::filesystem::path& path, std::span<const EvalReport> rows);

void append_timing_rows(const std::filesystem::path& path, std::span<const EvalReport> rows);

/// Plot-ready long format for the error-vs-N curves:
/// case,model,arm,n_train,seed,split,e
void append_curve_rows(const std::filesystem::path& path, std::span<const EvalReport> rows);

/// Rows already present in report.csv: config_hash -> (arm -> (train_e, test_e)).
struct ExistingRow {
  double train_e = 0.0;
  double test_e = 0.0;
  std::string status;
};
std::map<std::string, ExistingRow> existing_report_rows(const std::filesystem::path& path);

}  // namespace rteq
