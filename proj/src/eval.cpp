#include "rteq/eval.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

#include "rteq/kernels.hpp"

namespace rteq {

double mse(const PredictFn& predict, const Dataset& data, std::span<const std::size_t> idx) {
  if (idx.empty()) throw std::invalid_argument("mse: empty sample slice");
  double total = 0.0;
  for (std::size_t i : idx) {
    const std::vector<double> y = predict({data.features.data() + i * data.d_in, data.d_in});
    if (y.size() != data.d_out) throw std::invalid_argument("mse: prediction length mismatch");
    total += kernels::sq_diff(y.data(), data.labels.data() + i * data.d_out, data.d_out);
  }
  return total / static_cast<double>(idx.size());
}

double mse(const Pipeline& pipeline, const Dataset& data, std::span<const std::size_t> idx) {
  return mse([&](std::span<const double> x) { return pipeline.predict_flat(x); }, data, idx);
}

double rotation_data_error(const TuplePredictFn& model, const RotationEvalSet& evalset) {
  if (evalset.rotations.empty()) throw std::invalid_argument("rotation eval set is empty");
  double total = 0.0;
  for (const Rotation& r : evalset.rotations) {
    const DenseTensor pred = model(rotate_tuple(evalset.x0, r));
    const DenseTensor truth = rotate(evalset.y0, r);
    total += kernels::sq_diff(pred.data().data(), truth.data().data(), pred.size());
  }
  return total / static_cast<double>(evalset.rotations.size());
}

double rotation_data_error(const Pipeline& pipeline, const RotationEvalSet& evalset) {
  return rotation_data_error(
      [&](const TensorTuple& x) { return pipeline.predict_tuple(x); }, evalset);
}

double rotation_model_error(const TuplePredictFn& model, const RotationEvalSet& evalset) {
  if (evalset.rotations.empty()) throw std::invalid_argument("rotation eval set is empty");
  const DenseTensor base_pred = model(evalset.x0);
  double total = 0.0;
  for (const Rotation& r : evalset.rotations) {
    const DenseTensor pred = model(rotate_tuple(evalset.x0, r));
    const DenseTensor expected = rotate(base_pred, r);
    total += kernels::sq_diff(pred.data().data(), expected.data().data(), pred.size());
  }
  return total / static_cast<double>(evalset.rotations.size());
}

double rotation_model_error(const Pipeline& pipeline, const RotationEvalSet& evalset) {
  return rotation_model_error(
      [&](const TensorTuple& x) { return pipeline.predict_tuple(x); }, evalset);
}

std::vector<EvalReport> compare(Case c, ModelKind kind, std::span<const std::size_t> n_values,
                                std::span<const std::uint64_t> seeds,
                                const CompareSettings& settings) {
  std::vector<EvalReport> reports;

  for (std::size_t n : n_values) {
    for (std::uint64_t seed : seeds) {
      const Dataset data = generate_case(c, n, seed, settings.mu);
      const Dataset standardized = standardize_dataset(data);
      const RotationEvalSet evalset = build_rotation_eval(
          c, seed ^ 0x5DEECE66DULL, settings.rotation_count, settings.mu, true);

      MlpConfig mlp_cfg = settings.mlp;
      mlp_cfg.seed = seed;
      ForestConfig forest_cfg = settings.forest;
      forest_cfg.seed = seed;

      double baseline_train = 0.0, baseline_test = 0.0;
      for (Arm arm : {Arm::baseline, Arm::roteqnet, Arm::standard_only}) {
        const auto t0 = std::chrono::steady_clock::now();
        const TrainOutcome trained = train_pipeline(arm, data, kind, mlp_cfg, forest_cfg);

        EvalReport rep;
        rep.case_name = case_name(c);
        rep.arm = arm_name(arm);
        rep.model_kind = model_kind_name(kind);
        rep.n_total = n;
        rep.n_train = data.train_idx.size();
        rep.seed = seed;

        // The standard_only arm lives in the standardized domain for both
        // fitting and scoring; the other two are scored on raw rows.
        const Dataset& scored = arm == Arm::standard_only ? standardized : data;
        rep.train_e = mse(trained.pipeline, scored, scored.train_idx);
        rep.test_e = scored.test_idx.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : mse(trained.pipeline, scored, scored.test_idx);
        if (arm != Arm::standard_only) {
          rep.e_d = rotation_data_error(trained.pipeline, evalset);
          rep.e_m = rotation_model_error(trained.pipeline, evalset);
        }

        if (arm == Arm::baseline) {
          baseline_train = rep.train_e;
          baseline_test = rep.test_e;
        } else {
          rep.error_reduction_train = 100.0 * (1.0 - rep.train_e / baseline_train);
          rep.error_reduction_test = 100.0 * (1.0 - rep.test_e / baseline_test);
        }
        rep.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        reports.push_back(std::move(rep));
      }
    }
  }
  return reports;
}

}  // namespace rteq
