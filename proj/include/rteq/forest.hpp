#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rteq {

/// Stock regression-forest configuration: 100 estimators, depth cap 3,
/// squared-error split criterion, bootstrap resampling.
struct ForestConfig {
  int n_estimators = 100;
  int max_depth = 3;
  std::uint64_t seed = 0;
  double subsample_fraction = 1.0;  // bootstrap draw count = round(frac * n)

  void validate() const;
};

/// Depth-limited regression forest. Multi-output data is handled as one
/// tree ensemble per output dimension, all ensembles sharing the same
/// per-tree bootstrap index draws.
///
/// Split search is exhaustive and fully pinned: every feature, thresholds
/// at midpoints between sorted distinct values, ties broken by lowest
/// feature index then lowest threshold. Same seed, same trees, bit for bit.
class Forest {
 public:
  Forest() = default;
  Forest(int input_dim, int output_dim, ForestConfig config);

  void fit(std::span<const double> features, std::span<const double> labels, std::size_t n);

  /// Mean of the per-tree predictions, averaged in tree order.
  std::vector<double> predict(std::span<const double> x) const;

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const ForestConfig& config() const { return config_; }

  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
  };
  struct Tree {
    std::vector<Node> nodes;  // root at index 0
    double eval(const double* x) const;
    int internal_node_count() const;
  };

  /// ensembles()[output_dim][tree_index]
  const std::vector<std::vector<Tree>>& ensembles() const { return ensembles_; }

  void serialize(std::ostream& out) const;
  static Forest deserialize(std::istream& in);

 private:
  ForestConfig config_;
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<std::vector<Tree>> ensembles_;
};

}  // namespace rteq
