#pragma once

#include <functional>
#include <optional>

#include "rteq/pipeline.hpp"

namespace rteq {

using PredictFn = std::function<std::vector<double>(std::span<const double>)>;

/// Mean squared loss E = (1/N) * sum of squared 2-norms of the flattened
/// per-sample residuals.
double mse(const PredictFn& predict, const Dataset& data, std::span<const std::size_t> idx);
double mse(const Pipeline& pipeline, const Dataset& data, std::span<const std::size_t> idx);

using TuplePredictFn = std::function<DenseTensor(const TensorTuple&)>;

/// E_D: squared error of the model against rotated ground truth,
/// (1/N) * sum ||M(R_i(X0)) - R_i(y0)||^2.
double rotation_data_error(const TuplePredictFn& model, const RotationEvalSet& evalset);
double rotation_data_error(const Pipeline& pipeline, const RotationEvalSet& evalset);

/// E_M: self-equivariance defect of the model,
/// (1/N) * sum ||M(R_i(X0)) - R_i(M(X0))||^2.
double rotation_model_error(const TuplePredictFn& model, const RotationEvalSet& evalset);
double rotation_model_error(const Pipeline& pipeline, const RotationEvalSet& evalset);

/// One result row of the experiment protocol.
struct EvalReport {
  std::string case_name;
  std::string arm;
  std::string model_kind;
  std::size_t n_total = 0;
  std::size_t n_train = 0;
  std::uint64_t seed = 0;
  double train_e = 0.0;
  double test_e = 0.0;
  std::optional<double> e_d;  // absent for the standard_only arm
  std::optional<double> e_m;
  std::optional<double> error_reduction_train;  // percent vs the baseline arm
  std::optional<double> error_reduction_test;
  double wall_time_s = 0.0;
  std::string config_hash;
  std::string status = "ok";
};

struct CompareSettings {
  MlpConfig mlp;
  ForestConfig forest;
  std::size_t rotation_count = 10000;
  double mu = 1.0;
};

/// Runs the three-arm protocol (baseline raw, full pipeline, kernel on
/// standard positions only) for every (N, seed) and fills the reduction
/// columns of the non-baseline arms against their matching baseline row.
std::vector<EvalReport> compare(Case c, ModelKind kind, std::span<const std::size_t> n_values,
                                std::span<const std::uint64_t> seeds,
                                const CompareSettings& settings);

}  // namespace rteq
