#include "rteq/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rteq/rng.hpp"

namespace rteq {

void ForestConfig::validate() const {
  if (n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!(subsample_fraction > 0.0) || subsample_fraction > 1.0)
    throw std::invalid_argument("subsample_fraction must be in (0, 1]");
}

Forest::Forest(int input_dim, int output_dim, ForestConfig config)
    : config_(std::move(config)), input_dim_(input_dim), output_dim_(output_dim) {
  config_.validate();
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("forest dims must be positive");
}

double Forest::Tree::eval(const double* x) const {
  int idx = 0;
  while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
    const Node& node = nodes[static_cast<std::size_t>(idx)];
    idx = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

int Forest::Tree::internal_node_count() const {
  int c = 0;
  for (const Node& node : nodes)
    if (node.feature >= 0) ++c;
  return c;
}

namespace {

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;  // combined child SSE
};

/// Exhaustive best split of `idx` (indices into features/targets), using
/// squared-error reduction. Features scanned in ascending index order and
/// thresholds ascending, replacing only on strict improvement, which bakes
/// in the tie-break rules.
Split find_split(std::span<const double> features, std::size_t d_in,
                 const std::vector<double>& target, const std::vector<std::size_t>& idx) {
  const std::size_t m = idx.size();
  Split best;

  std::vector<std::pair<double, double>> vt(m);  // (value, target), sorted by value
  std::vector<double> pre_sum(m + 1), pre_sq(m + 1);

  for (std::size_t f = 0; f < d_in; ++f) {
    for (std::size_t k = 0; k < m; ++k)
      vt[k] = {features[idx[k] * d_in + f], target[idx[k]]};
    std::stable_sort(vt.begin(), vt.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    pre_sum[0] = 0.0;
    pre_sq[0] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      pre_sum[k + 1] = pre_sum[k] + vt[k].second;
      pre_sq[k + 1] = pre_sq[k] + vt[k].second * vt[k].second;
    }

    for (std::size_t k = 1; k < m; ++k) {
      if (vt[k].first <= vt[k - 1].first) continue;  // not a distinct-value boundary
      const double nl = static_cast<double>(k);
      const double nr = static_cast<double>(m - k);
      const double sse_l = pre_sq[k] - pre_sum[k] * pre_sum[k] / nl;
      const double sse_r = (pre_sq[m] - pre_sq[k]) -
                           (pre_sum[m] - pre_sum[k]) * (pre_sum[m] - pre_sum[k]) / nr;
      const double sse = sse_l + sse_r;
      if (!best.found || sse < best.sse) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (vt[k - 1].first + vt[k].first);
        best.sse = sse;
      }
    }
  }
  return best;
}

int build_node(std::span<const double> features, std::size_t d_in,
               const std::vector<double>& target, std::vector<std::size_t>& idx, int depth,
               int max_depth, Forest::Tree& tree) {
  const int me = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  double mean = 0.0;
  for (std::size_t i : idx) mean += target[i];
  mean /= static_cast<double>(idx.size());

  if (depth >= max_depth || idx.size() < 2) {
    tree.nodes[static_cast<std::size_t>(me)].value = mean;
    return me;
  }

  const Split split = find_split(features, d_in, target, idx);
  if (!split.found) {
    tree.nodes[static_cast<std::size_t>(me)].value = mean;
    return me;
  }

  std::vector<std::size_t> left, right;
  left.reserve(idx.size());
  right.reserve(idx.size());
  for (std::size_t i : idx) {
    if (features[i * d_in + static_cast<std::size_t>(split.feature)] <= split.threshold)
      left.push_back(i);
    else
      right.push_back(i);
  }

  tree.nodes[static_cast<std::size_t>(me)].feature = split.feature;
  tree.nodes[static_cast<std::size_t>(me)].threshold = split.threshold;
  const int l = build_node(features, d_in, target, left, depth + 1, max_depth, tree);
  tree.nodes[static_cast<std::size_t>(me)].left = l;
  const int r = build_node(features, d_in, target, right, depth + 1, max_depth, tree);
  tree.nodes[static_cast<std::size_t>(me)].right = r;
  return me;
}

}  // namespace

void Forest::fit(std::span<const double> features, std::span<const double> labels, std::size_t n) {
  if (n == 0) throw std::invalid_argument("fit: empty dataset");
  const std::size_t din = static_cast<std::size_t>(input_dim_);
  const std::size_t dout = static_cast<std::size_t>(output_dim_);
  if (features.size() != n * din || labels.size() != n * dout)
    throw std::invalid_argument("fit: feature/label dims inconsistent");
  for (double v : features)
    if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature");

  const std::size_t draws = static_cast<std::size_t>(
      std::llround(config_.subsample_fraction * static_cast<double>(n)));
  if (draws == 0) throw std::invalid_argument("fit: subsample_fraction yields zero draws");

  ensembles_.assign(dout, {});
  for (auto& e : ensembles_) e.resize(static_cast<std::size_t>(config_.n_estimators));

  std::vector<std::size_t> boot(draws);
  std::vector<double> target(n);

  for (int t = 0; t < config_.n_estimators; ++t) {
    // One bootstrap draw per tree index, shared by every output's ensemble.
    Rng rng = Rng::substream(config_.seed, static_cast<std::uint64_t>(t));
    for (std::size_t k = 0; k < draws; ++k) boot[k] = rng.next_u64() % n;

    for (std::size_t o = 0; o < dout; ++o) {
      for (std::size_t i = 0; i < n; ++i) target[i] = labels[i * dout + o];
      Tree& tree = ensembles_[o][static_cast<std::size_t>(t)];
      tree.nodes.clear();
      std::vector<std::size_t> idx = boot;
      build_node(features, din, target, idx, 0, config_.max_depth, tree);
    }
  }
}

std::vector<double> Forest::predict(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(input_dim_))
    throw std::invalid_argument("predict: input length mismatch");
  std::vector<double> out(static_cast<std::size_t>(output_dim_), 0.0);
  for (std::size_t o = 0; o < out.size(); ++o) {
    double s = 0.0;
    for (const Tree& tree : ensembles_[o]) s += tree.eval(x.data());
    out[o] = s / static_cast<double>(config_.n_estimators);
  }
  return out;
}

void Forest::serialize(std::ostream& out) const {
  auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  w32(static_cast<std::uint32_t>(config_.n_estimators));
  w32(static_cast<std::uint32_t>(config_.max_depth));
  w32(static_cast<std::uint32_t>(input_dim_));
  w32(static_cast<std::uint32_t>(output_dim_));
  for (const auto& ensemble : ensembles_) {
    for (const Tree& tree : ensemble) {
      w32(static_cast<std::uint32_t>(tree.nodes.size()));
      for (const Node& node : tree.nodes) {
        out.write(reinterpret_cast<const char*>(&node.feature), sizeof(node.feature));
        out.write(reinterpret_cast<const char*>(&node.threshold), sizeof(node.threshold));
        out.write(reinterpret_cast<const char*>(&node.left), sizeof(node.left));
        out.write(reinterpret_cast<const char*>(&node.right), sizeof(node.right));
        out.write(reinterpret_cast<const char*>(&node.value), sizeof(node.value));
      }
    }
  }
}

Forest Forest::deserialize(std::istream& in) {
  auto fail = [] { throw std::runtime_error("forest payload: unexpected end of file"); };
  auto r32 = [&]() {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) fail();
    return v;
  };
  Forest f;
  f.config_.n_estimators = static_cast<int>(r32());
  f.config_.max_depth = static_cast<int>(r32());
  f.input_dim_ = static_cast<int>(r32());
  f.output_dim_ = static_cast<int>(r32());
  if (f.config_.n_estimators < 1 || f.config_.n_estimators > 1000000 ||
      f.input_dim_ < 1 || f.input_dim_ > 1000000 ||
      f.output_dim_ < 1 || f.output_dim_ > 1000000)
    throw std::runtime_error("forest payload: implausible header");
  f.ensembles_.assign(static_cast<std::size_t>(f.output_dim_), {});
  for (auto& ensemble : f.ensembles_) {
    ensemble.resize(static_cast<std::size_t>(f.config_.n_estimators));
    for (Tree& tree : ensemble) {
      const std::uint32_t nn = r32();
      if (nn == 0 || nn > 1u << 24) throw std::runtime_error("forest payload: bad node count");
      tree.nodes.resize(nn);
      for (Node& node : tree.nodes) {
        if (!in.read(reinterpret_cast<char*>(&node.feature), sizeof(node.feature))) fail();
        if (!in.read(reinterpret_cast<char*>(&node.threshold), sizeof(node.threshold))) fail();
        if (!in.read(reinterpret_cast<char*>(&node.left), sizeof(node.left))) fail();
        if (!in.read(reinterpret_cast<char*>(&node.right), sizeof(node.right))) fail();
        if (!in.read(reinterpret_cast<char*>(&node.value), sizeof(node.value))) fail();
      }
    }
  }
  return f;
}

}  // namespace rteq
