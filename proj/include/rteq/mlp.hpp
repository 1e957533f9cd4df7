#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rteq {

/// Stock feed-forward regressor configuration: two logistic hidden
/// layers of 512 and 4 units, linear output, Adam at 1e-3, batches of 64.
struct MlpConfig {
  std::vector<int> hidden_sizes = {512, 4};
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

/// From-scratch MLP. Logistic hidden activations, linear output head,
/// squared-error loss minimized with Adam (0.9, 0.999, 1e-8). All random
/// streams (init, per-epoch shuffles) derive from config.seed, batches are
/// reduced sample by sample in a fixed order, and no global state is
/// touched: identical seed means bit-identical parameters.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, int output_dim, MlpConfig config);

  /// Trains on row-major features (n x input_dim) / labels (n x output_dim).
  /// Records the full-train loss at the end of every epoch with frozen
  /// parameters, so the history matches an external loss evaluation exactly.
  void fit(std::span<const double> features, std::span<const double> labels, std::size_t n);

  std::vector<double> predict(std::span<const double> x) const;

  /// Squared-error loss (1/n * sum of squared residual norms) over the given
  /// samples, and its gradient in parameter order. Used by training and by
  /// the finite-difference gradient check.
  double loss_and_gradient(std::span<const double> features, std::span<const double> labels,
                           std::size_t n, std::vector<double>& grad) const;

  double loss(std::span<const double> features, std::span<const double> labels,
              std::size_t n) const;

  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int output_dim() const { return dims_.empty() ? 0 : dims_.back(); }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const MlpConfig& config() const { return config_; }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  void serialize(std::ostream& out) const;
  static Mlp deserialize(std::istream& in);

 private:
  struct LayerView {
    std::size_t w_off;
    std::size_t b_off;
    int rows;
    int cols;
  };

  void build_views();
  void forward(const double* x, std::vector<std::vector<double>>& acts) const;

  MlpConfig config_;
  std::vector<int> dims_;  // input, hidden..., output
  std::vector<LayerView> layers_;
  std::vector<double> params_;
  std::vector<double> loss_history_;
};

}  // namespace rteq
