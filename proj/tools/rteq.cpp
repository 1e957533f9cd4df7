#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

#include "rteq/io.hpp"
#include "rteq/kernels.hpp"
#include "rteq/standardize.hpp"

namespace fs = std::filesystem;
using namespace rteq;

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 usage/validation.

fs::path resolve_output_dir(const std::string& dir) {
  if (const char* env = std::getenv("RTEQ_OUTPUT_DIR")) return fs::path(env);
  return fs::path(dir);
}

struct TrainFlags {
  std::string dataset_path;
  std::string arm = "roteqnet";
  std::string model = "mlp";
  std::string out_path = "model.rteq";
  std::string report_path;
  std::uint64_t seed = 1;
  std::size_t rotations = 10000;
  MlpConfig mlp;
  ForestConfig forest;
};

EvalReport evaluate_pipeline(const Pipeline& pipeline, const Dataset& data,
                             const Dataset& standardized, const RotationEvalSet& evalset) {
  EvalReport rep;
  rep.case_name = data.meta.case_name;
  rep.arm = arm_name(pipeline.arm);
  rep.model_kind = model_kind_name(pipeline.model.kind());
  rep.n_total = data.n;
  rep.n_train = data.train_idx.size();
  rep.seed = data.seed;
  const Dataset& scored = pipeline.arm == Arm::standard_only ? standardized : data;
  rep.train_e = mse(pipeline, scored, scored.train_idx);
  rep.test_e = scored.test_idx.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : mse(pipeline, scored, scored.test_idx);
  if (pipeline.arm != Arm::standard_only) {
    rep.e_d = rotation_data_error(pipeline, evalset);
    rep.e_m = rotation_model_error(pipeline, evalset);
  }
  return rep;
}

int cmd_generate(const std::string& case_str, std::size_t n, std::uint64_t seed, double mu,
                 const std::string& out, const std::string& csv) {
  const Case c = case_from_name(case_str);
  const Dataset d = generate_case(c, n, seed, mu);
  save_dataset(d, out);
  if (!csv.empty()) export_dataset_csv(d, csv);
  std::cout << "wrote " << out << ": case=" << d.meta.case_name << " n=" << d.n
            << " d_in=" << d.d_in << " d_out=" << d.d_out << " train=" << d.train_idx.size()
            << " test=" << d.test_idx.size() << " seed=" << d.seed << "\n";
  return 0;
}

int cmd_train(const TrainFlags& f) {
  const Dataset data = load_dataset(f.dataset_path);
  const Arm arm = arm_from_name(f.arm);
  const ModelKind kind = model_kind_from_name(f.model);

  MlpConfig mlp_cfg = f.mlp;
  mlp_cfg.seed = f.seed;
  ForestConfig forest_cfg = f.forest;
  forest_cfg.seed = f.seed;

  const TrainOutcome trained = train_pipeline(arm, data, kind, mlp_cfg, forest_cfg);
  trained.pipeline.model.save(f.out_path);

  std::optional<Dataset> standardized;
  if (arm == Arm::standard_only) standardized = standardize_dataset(data);
  const RotationEvalSet evalset = build_rotation_eval(
      case_from_name(data.meta.case_name), data.seed ^ 0x5DEECE66DULL, f.rotations,
      data.meta.mu, true);

  EvalReport rep = evaluate_pipeline(trained.pipeline, data,
                                     standardized ? *standardized : data, evalset);
  rep.wall_time_s = trained.wall_time_s;

  std::cout << "model written to " << f.out_path << "\n"
            << "train_e=" << format_double(rep.train_e) << " test_e=" << format_double(rep.test_e);
  if (rep.e_d) std::cout << " e_d=" << format_double(*rep.e_d);
  if (rep.e_m) std::cout << " e_m=" << format_double(*rep.e_m);
  std::cout << "\n";

  if (!f.report_path.empty()) {
    append_report_rows(f.report_path, {&rep, 1});
    std::cout << "report row appended to " << f.report_path << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& dataset_path, const std::string& model_path,
             const std::string& arm_str, std::size_t rotations) {
  const Dataset data = load_dataset(dataset_path);
  Pipeline pipeline;
  pipeline.arm = arm_from_name(arm_str);
  pipeline.meta = data.meta;
  pipeline.model = KernelModel::load(model_path);

  std::optional<Dataset> standardized;
  if (pipeline.arm == Arm::standard_only) standardized = standardize_dataset(data);
  const RotationEvalSet evalset =
      build_rotation_eval(case_from_name(data.meta.case_name), data.seed ^ 0x5DEECE66DULL,
                          rotations, data.meta.mu, true);
  const EvalReport rep =
      evaluate_pipeline(pipeline, data, standardized ? *standardized : data, evalset);

  std::cout << "case=" << rep.case_name << " arm=" << rep.arm << " model=" << rep.model_kind
            << "\n"
            << "train_e=" << format_double(rep.train_e) << "\n"
            << "test_e=" << format_double(rep.test_e) << "\n";
  if (rep.e_d) std::cout << "e_d=" << format_double(*rep.e_d) << "\n";
  if (rep.e_m) std::cout << "e_m=" << format_double(*rep.e_m) << "\n";
  return 0;
}

int cmd_equivariance(const std::string& case_str, const std::string& model_path,
                     const std::string& arm_str, std::size_t rotations, std::uint64_t seed,
                     double mu) {
  const Case c = case_from_name(case_str);
  Pipeline pipeline;
  pipeline.arm = arm_from_name(arm_str);
  pipeline.meta = case_meta(c, mu);
  pipeline.model = KernelModel::load(model_path);

  const RotationEvalSet evalset = build_rotation_eval(c, seed, rotations, mu, true);
  const double e_m = rotation_model_error(pipeline, evalset);
  const double e_d = rotation_data_error(pipeline, evalset);
  std::cout << "case=" << case_str << " arm=" << arm_str << " rotations=" << rotations
            << (evalset.base_degenerate ? " base=degenerate" : " base=regular") << "\n"
            << "e_m=" << format_double(e_m) << "\n"
            << "e_d=" << format_double(e_d) << "\n";
  return 0;
}

int cmd_reproduce(const std::string& config_path, const std::string& out_dir_flag, bool full) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  if (full) cfg.n_values = full_n_grid();
  if (!out_dir_flag.empty()) cfg.output_dir = out_dir_flag;

  const fs::path out_dir = resolve_output_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  const fs::path report_path = out_dir / "report.csv";
  const fs::path timing_path = out_dir / "timings.csv";
  const fs::path curve_path = out_dir / "curves.csv";
  save_run_config(cfg, out_dir / "config.used.json");

  const ModelKind kind = model_kind_from_name(cfg.model);
  auto existing = existing_report_rows(report_path);

  CompareSettings settings;
  settings.mlp = cfg.mlp;
  settings.forest = cfg.forest;
  settings.rotation_count = cfg.rotation_count;
  settings.mu = cfg.mu;

  std::size_t ran = 0, skipped = 0, failed = 0;
  for (const std::string& case_str : cfg.cases) {
    const Case c = case_from_name(case_str);
    for (std::size_t n : cfg.n_values) {
      for (std::uint64_t seed : cfg.seeds) {
        const std::array<Arm, 3> arms = {Arm::baseline, Arm::roteqnet, Arm::standard_only};
        std::array<std::string, 3> hashes;
        bool all_done = true;
        for (std::size_t a = 0; a < arms.size(); ++a) {
          hashes[a] = row_hash(cfg, case_str, arm_name(arms[a]), cfg.model, n, seed);
          const auto it = existing.find(hashes[a]);
          if (it == existing.end() || it->second.status != "ok") all_done = false;
        }
        if (all_done) {
          skipped += arms.size();
          continue;
        }

        Dataset data, standardized;
        RotationEvalSet evalset;
        try {
          data = generate_case(c, n, seed, cfg.mu);
          standardized = standardize_dataset(data);
          evalset = build_rotation_eval(c, seed ^ 0x5DEECE66DULL, cfg.rotation_count,
                                        cfg.mu, true);
        } catch (const std::exception& e) {
          std::cerr << "group (" << case_str << ", n=" << n << ", seed=" << seed
                    << ") failed to set up: " << e.what() << "\n";
          failed += arms.size();
          continue;
        }

        double baseline_train = 0.0, baseline_test = 0.0;
        bool have_baseline = false;
        for (std::size_t a = 0; a < arms.size(); ++a) {
          const Arm arm = arms[a];
          const auto it = existing.find(hashes[a]);
          if (it != existing.end() && it->second.status == "ok") {
            if (arm == Arm::baseline) {
              baseline_train = it->second.train_e;
              baseline_test = it->second.test_e;
              have_baseline = true;
            }
            ++skipped;
            continue;
          }

          MlpConfig mlp_cfg = cfg.mlp;
          mlp_cfg.seed = seed;
          ForestConfig forest_cfg = cfg.forest;
          forest_cfg.seed = seed;

          EvalReport rep;
          rep.case_name = case_str;
          rep.arm = arm_name(arm);
          rep.model_kind = cfg.model;
          rep.n_total = n;
          rep.seed = seed;
          rep.config_hash = hashes[a];
          try {
            const auto t0 = std::chrono::steady_clock::now();
            const TrainOutcome trained = train_pipeline(arm, data, kind, mlp_cfg, forest_cfg);
            rep = evaluate_pipeline(trained.pipeline, data, standardized, evalset);
            rep.config_hash = hashes[a];
            if (arm == Arm::baseline) {
              baseline_train = rep.train_e;
              baseline_test = rep.test_e;
              have_baseline = true;
            } else if (have_baseline) {
              rep.error_reduction_train = 100.0 * (1.0 - rep.train_e / baseline_train);
              rep.error_reduction_test = 100.0 * (1.0 - rep.test_e / baseline_test);
            }
            rep.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            ++ran;
          } catch (const std::exception& e) {
            rep.status = std::string("failed: ") + e.what();
            // Commas would break the CSV row.
            for (char& ch : rep.status)
              if (ch == ',' || ch == '\n') ch = ';';
            ++failed;
          }
          append_report_rows(report_path, {&rep, 1});
          append_timing_rows(timing_path, {&rep, 1});
          if (rep.status == "ok") append_curve_rows(curve_path, {&rep, 1});
          std::cout << case_str << " n=" << n << " seed=" << seed << " " << arm_name(arm)
                    << ": " << rep.status << " test_e="
                    << (rep.status == "ok" ? format_double(rep.test_e) : "-") << "\n";
        }
      }
    }
  }

  std::cout << "reproduce finished: " << ran << " rows run, " << skipped << " skipped, "
            << failed << " failed\n"
            << "report: " << report_path.string() << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotation-equivariant tensor regression experiments"};
  app.require_subcommand(1);

  // generate
  std::string g_case = "newtonian", g_out = "dataset.rtds", g_csv;
  std::size_t g_n = 10000;
  std::uint64_t g_seed = 1;
  double g_mu = 1.0;
  CLI::App* generate = app.add_subcommand("generate", "generate a synthetic dataset");
  generate->add_option("--case", g_case, "newtonian|les|third_order|electrostriction");
  generate->add_option("--n", g_n, "sample count")->check(CLI::PositiveNumber);
  generate->add_option("--seed", g_seed, "generator seed");
  generate->add_option("--mu", g_mu, "viscosity-like coefficient");
  generate->add_option("--out", g_out, "output dataset file");
  generate->add_option("--csv", g_csv, "optional CSV export path");

  // train
  TrainFlags t;
  CLI::App* train = app.add_subcommand("train", "train one arm on a dataset file");
  train->add_option("--dataset", t.dataset_path, "dataset file from 'generate'")->required();
  train->add_option("--arm", t.arm, "baseline|roteqnet|standard_only");
  train->add_option("--model", t.model, "mlp|forest");
  train->add_option("--out", t.out_path, "output model file");
  train->add_option("--report", t.report_path, "append an EvalReport row to this CSV");
  train->add_option("--seed", t.seed, "training seed");
  train->add_option("--rotations", t.rotations, "rotation count for E_D/E_M")
      ->check(CLI::PositiveNumber);
  train->add_option("--epochs", t.mlp.epochs, "MLP epochs")->check(CLI::PositiveNumber);
  train->add_option("--batch-size", t.mlp.batch_size, "MLP batch size")
      ->check(CLI::PositiveNumber);
  train->add_option("--learning-rate", t.mlp.learning_rate, "MLP Adam learning rate");
  train->add_option("--hidden", t.mlp.hidden_sizes, "MLP hidden layer sizes");
  train->add_option("--n-estimators", t.forest.n_estimators, "forest size")
      ->check(CLI::PositiveNumber);
  train->add_option("--max-depth", t.forest.max_depth, "forest depth cap")
      ->check(CLI::PositiveNumber);

  // eval
  std::string e_dataset, e_model, e_arm = "roteqnet";
  std::size_t e_rotations = 10000;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  eval_cmd->add_option("--dataset", e_dataset, "dataset file")->required();
  eval_cmd->add_option("--model-file", e_model, "model file from 'train'")->required();
  eval_cmd->add_option("--arm", e_arm, "arm the model was trained under");
  eval_cmd->add_option("--rotations", e_rotations, "rotation count")->check(CLI::PositiveNumber);

  // equivariance
  std::string q_case = "newtonian", q_model, q_arm = "roteqnet";
  std::size_t q_rotations = 10000;
  std::uint64_t q_seed = 1;
  double q_mu = 1.0;
  CLI::App* equi = app.add_subcommand("equivariance", "measure E_M and E_D for a saved model");
  equi->add_option("--case", q_case, "case study name");
  equi->add_option("--model-file", q_model, "model file")->required();
  equi->add_option("--arm", q_arm, "arm the model was trained under");
  equi->add_option("--rotations", q_rotations, "rotation count")->check(CLI::PositiveNumber);
  equi->add_option("--seed", q_seed, "base sample / rotation seed");
  equi->add_option("--mu", q_mu, "viscosity-like coefficient");

  // reproduce
  std::string r_config, r_out;
  bool r_full = false;
  CLI::App* repr = app.add_subcommand("reproduce", "run the full experiment protocol");
  repr->add_option("--config", r_config, "JSON config (defaults = desk preset)");
  repr->add_option("--out-dir", r_out, "output directory (overrides config)");
  repr->add_flag("--full", r_full, "use the full-scale N grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(g_case, g_n, g_seed, g_mu, g_out, g_csv);
    if (*train) return cmd_train(t);
    if (*eval_cmd) return cmd_eval(e_dataset, e_model, e_arm, e_rotations);
    if (*equi) return cmd_equivariance(q_case, q_model, q_arm, q_rotations, q_seed, q_mu);
    if (*repr) return cmd_reproduce(r_config, r_out, r_full);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
