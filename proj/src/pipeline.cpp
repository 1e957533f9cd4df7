#include "rteq/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "rteq/standardize.hpp"

namespace rteq {

std::string arm_name(Arm a) {
  switch (a) {
    case Arm::baseline: return "baseline";
    case Arm::roteqnet: return "roteqnet";
    case Arm::standard_only: return "standard_only";
  }
  throw std::logic_error("unreachable");
}

Arm arm_from_name(const std::string& s) {
  if (s == "baseline") return Arm::baseline;
  if (s == "roteqnet") return Arm::roteqnet;
  if (s == "standard_only") return Arm::standard_only;
  throw std::invalid_argument("unknown arm '" + s + "'");
}

DenseTensor Pipeline::predict_tuple(const TensorTuple& x) const {
  if (arm != Arm::roteqnet) {
    const std::vector<double> flat = flatten(x);
    std::vector<double> y = model.predict(flat);
    return DenseTensor(meta.label_order, std::move(y), 3);
  }

  const StandardizedSample s = standardize_tuple(x);
  const std::vector<double> xs_flat = flatten(s.xs);
  std::vector<double> ys = model.predict(xs_flat);
  DenseTensor ys_tensor(meta.label_order, std::move(ys), 3);
  const std::vector<int> stab = xs_stabilizer(s.xs);
  if (stab.size() > 1) ys_tensor = stabilizer_average(ys_tensor, stab);
  return restore_label(ys_tensor, s);
}

std::vector<double> Pipeline::predict_flat(std::span<const double> x) const {
  if (arm != Arm::roteqnet) return model.predict(x);
  const TensorTuple tuple = unflatten(x, meta.input_shape);
  return predict_tuple(tuple).data();
}

Dataset standardize_dataset(const Dataset& d) {
  Dataset out = d;
  for (std::size_t i = 0; i < d.n; ++i) {
    const StandardizedSample s = standardize_tuple(d.sample_tuple(i));
    const std::vector<double> xs_flat = flatten(s.xs);
    std::copy(xs_flat.begin(), xs_flat.end(),
              out.features.begin() + static_cast<std::ptrdiff_t>(i * d.d_in));
    const DenseTensor ys = rotate(d.sample_label(i), s.restore.transposed());
    std::copy(ys.data().begin(), ys.data().end(),
              out.labels.begin() + static_cast<std::ptrdiff_t>(i * d.d_out));
  }
  return out;
}

namespace {

/// Gathers the train split into contiguous buffers.
void gather_train(const Dataset& d, std::vector<double>& x, std::vector<double>& y) {
  x.resize(d.train_idx.size() * d.d_in);
  y.resize(d.train_idx.size() * d.d_out);
  for (std::size_t k = 0; k < d.train_idx.size(); ++k) {
    const std::size_t i = d.train_idx[k];
    std::copy_n(d.features.data() + i * d.d_in, d.d_in, x.data() + k * d.d_in);
    std::copy_n(d.labels.data() + i * d.d_out, d.d_out, y.data() + k * d.d_out);
  }
}

}  // namespace

TrainOutcome train_pipeline(Arm arm, const Dataset& data, ModelKind kind,
                            const MlpConfig& mlp_cfg, const ForestConfig& forest_cfg) {
  if (data.train_idx.empty()) throw std::invalid_argument("train split is empty");

  const auto t0 = std::chrono::steady_clock::now();
  const Dataset* source = &data;
  Dataset standardized;
  if (arm != Arm::baseline) {
    standardized = standardize_dataset(data);
    source = &standardized;
  }

  std::vector<double> x, y;
  gather_train(*source, x, y);

  TrainOutcome out;
  out.pipeline.arm = arm;
  out.pipeline.meta = data.meta;
  if (kind == ModelKind::mlp) {
    Mlp mlp(static_cast<int>(data.d_in), static_cast<int>(data.d_out), mlp_cfg);
    mlp.fit(x, y, data.train_idx.size());
    out.loss_history = mlp.loss_history();
    out.pipeline.model = KernelModel(std::move(mlp));
  } else {
    Forest forest(static_cast<int>(data.d_in), static_cast<int>(data.d_out), forest_cfg);
    forest.fit(x, y, data.train_idx.size());
    out.pipeline.model = KernelModel(std::move(forest));
  }
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace rteq
