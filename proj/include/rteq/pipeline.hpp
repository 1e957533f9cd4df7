#pragma once

#include "rteq/casestudies.hpp"
#include "rteq/model.hpp"

namespace rteq {

/// The three experiment arms: a kernel fit on raw rows, the full
/// standardize/predict/restore pipeline, and a kernel that lives entirely
/// in the standard-position domain (trained AND evaluated there).
enum class Arm { baseline, roteqnet, standard_only };

std::string arm_name(Arm a);
Arm arm_from_name(const std::string& s);

/// A trained predictor bound to its arm and sample layout.
///
/// roteqnet prediction: standardize the input tuple, run the kernel on the
/// flattened standard position, average the prediction over the stabilizer
/// of the standardized input (a no-op unless the input genuinely admits
/// several frames), rotate back with the restore rotation.
struct Pipeline {
  Arm arm = Arm::baseline;
  DatasetMeta meta;
  KernelModel model;

  std::vector<double> predict_flat(std::span<const double> x) const;
  DenseTensor predict_tuple(const TensorTuple& x) const;
};

/// Rewrites every row into standard position: features via
/// standardize_tuple, labels rotated into the same frame (Y_s = R^T(Y)).
/// Split, seed and metadata carry over.
Dataset standardize_dataset(const Dataset& d);

struct TrainOutcome {
  Pipeline pipeline;
  double wall_time_s = 0.0;
  std::vector<double> loss_history;
};

/// Fits the requested kernel under the given arm. baseline fits raw rows;
/// roteqnet and standard_only fit standardized rows (they differ only in
/// how the result predicts).
TrainOutcome train_pipeline(Arm arm, const Dataset& data, ModelKind kind,
                            const MlpConfig& mlp_cfg, const ForestConfig& forest_cfg);

}  // namespace rteq
