#include "rteq/mlp.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rteq/kernels.hpp"
#include "rteq/rng.hpp"

namespace rteq {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Substream tags keep the init and the per-epoch shuffle draws independent.
constexpr std::uint64_t kInitStream = 0x1;
constexpr std::uint64_t kShuffleStreamBase = 0x100;

}  // namespace

void MlpConfig::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  for (int h : hidden_sizes)
    if (h < 1) throw std::invalid_argument("hidden sizes must be positive");
}

Mlp::Mlp(int input_dim, int output_dim, MlpConfig config) : config_(std::move(config)) {
  config_.validate();
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("mlp dims must be positive");
  dims_.push_back(input_dim);
  for (int h : config_.hidden_sizes) dims_.push_back(h);
  dims_.push_back(output_dim);
  build_views();

  // Glorot-uniform weights, zero biases.
  Rng rng = Rng::substream(config_.seed, kInitStream);
  for (const LayerView& l : layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.rows + l.cols));
    for (int i = 0; i < l.rows * l.cols; ++i)
      params_[l.w_off + static_cast<std::size_t>(i)] = (2.0 * rng.next_double() - 1.0) * bound;
  }
}

void Mlp::build_views() {
  layers_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    LayerView v;
    v.rows = dims_[l + 1];
    v.cols = dims_[l];
    v.w_off = off;
    off += static_cast<std::size_t>(v.rows) * static_cast<std::size_t>(v.cols);
    v.b_off = off;
    off += static_cast<std::size_t>(v.rows);
    layers_.push_back(v);
  }
  params_.assign(off, 0.0);
}

void Mlp::forward(const double* x, std::vector<std::vector<double>>& acts) const {
  acts.resize(layers_.size() + 1);
  acts[0].assign(x, x + dims_[0]);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerView& v = layers_[l];
    acts[l + 1].resize(static_cast<std::size_t>(v.rows));
    kernels::matvec(params_.data() + v.w_off, static_cast<std::size_t>(v.rows),
                    static_cast<std::size_t>(v.cols), acts[l].data(),
                    params_.data() + v.b_off, acts[l + 1].data());
    if (l + 1 < layers_.size())
      for (double& z : acts[l + 1]) z = logistic(z);
  }
}

std::vector<double> Mlp::predict(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(input_dim()))
    throw std::invalid_argument("predict: input length mismatch");
  std::vector<std::vector<double>> acts;
  forward(x.data(), acts);
  return acts.back();
}

double Mlp::loss(std::span<const double> features, std::span<const double> labels,
                 std::size_t n) const {
  const std::size_t din = static_cast<std::size_t>(input_dim());
  const std::size_t dout = static_cast<std::size_t>(output_dim());
  std::vector<std::vector<double>> acts;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    forward(features.data() + i * din, acts);
    total += kernels::sq_diff(acts.back().data(), labels.data() + i * dout, dout);
  }
  return total / static_cast<double>(n);
}

double Mlp::loss_and_gradient(std::span<const double> features, std::span<const double> labels,
                              std::size_t n, std::vector<double>& grad) const {
  if (n == 0) throw std::invalid_argument("loss_and_gradient: empty batch");
  const std::size_t din = static_cast<std::size_t>(input_dim());
  const std::size_t dout = static_cast<std::size_t>(output_dim());
  grad.assign(params_.size(), 0.0);

  std::vector<std::vector<double>> acts;
  std::vector<double> delta, delta_prev;
  double total = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double* x = features.data() + i * din;
    const double* y = labels.data() + i * dout;
    forward(x, acts);
    total += kernels::sq_diff(acts.back().data(), y, dout);

    // Output residual; the 2/n loss factor is applied once at the end.
    delta.resize(dout);
    for (std::size_t j = 0; j < dout; ++j) delta[j] = acts.back()[j] - y[j];

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const LayerView& v = layers_[l];
      const std::vector<double>& a_in = acts[l];
      for (int r = 0; r < v.rows; ++r) {
        const double d = delta[static_cast<std::size_t>(r)];
        kernels::axpy(d, a_in.data(),
                      grad.data() + v.w_off + static_cast<std::size_t>(r) * static_cast<std::size_t>(v.cols),
                      static_cast<std::size_t>(v.cols));
        grad[v.b_off + static_cast<std::size_t>(r)] += d;
      }
      if (l > 0) {
        delta_prev.assign(static_cast<std::size_t>(v.cols), 0.0);
        kernels::matvec_transposed_add(params_.data() + v.w_off,
                                       static_cast<std::size_t>(v.rows),
                                       static_cast<std::size_t>(v.cols), delta.data(),
                                       delta_prev.data());
        // Logistic derivative through the layer below.
        for (int c = 0; c < v.cols; ++c) {
          const double a = acts[l][static_cast<std::size_t>(c)];
          delta_prev[static_cast<std::size_t>(c)] *= a * (1.0 - a);
        }
        delta.swap(delta_prev);
      }
    }
  }

  const double scale = 2.0 / static_cast<double>(n);
  for (double& g : grad) g *= scale;
  return total / static_cast<double>(n);
}

void Mlp::fit(std::span<const double> features, std::span<const double> labels, std::size_t n) {
  if (n == 0) throw std::invalid_argument("fit: empty dataset");
  const std::size_t din = static_cast<std::size_t>(input_dim());
  const std::size_t dout = static_cast<std::size_t>(output_dim());
  if (features.size() != n * din || labels.size() != n * dout)
    throw std::invalid_argument("fit: feature/label dims inconsistent");
  for (double v : features)
    if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature");

  std::vector<double> m(params_.size(), 0.0);
  std::vector<double> v2(params_.size(), 0.0);
  std::vector<double> grad(params_.size(), 0.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const std::size_t batch = static_cast<std::size_t>(config_.batch_size);
  std::vector<double> bx(batch * din), by(batch * dout);

  long t = 0;
  loss_history_.clear();
  loss_history_.reserve(static_cast<std::size_t>(config_.epochs));

  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    Rng shuffle = Rng::substream(config_.seed, kShuffleStreamBase + static_cast<std::uint64_t>(epoch));
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = shuffle.next_u64() % i;
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t b = std::min(batch, n - start);
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t src = order[start + k];
        std::copy_n(features.data() + src * din, din, bx.data() + k * din);
        std::copy_n(labels.data() + src * dout, dout, by.data() + k * dout);
      }
      loss_and_gradient({bx.data(), b * din}, {by.data(), b * dout}, b, grad);

      ++t;
      const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
      const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
      for (std::size_t p = 0; p < params_.size(); ++p) {
        m[p] = kAdamBeta1 * m[p] + (1.0 - kAdamBeta1) * grad[p];
        v2[p] = kAdamBeta2 * v2[p] + (1.0 - kAdamBeta2) * grad[p] * grad[p];
        const double mhat = m[p] / bc1;
        const double vhat = v2[p] / bc2;
        params_[p] -= config_.learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
      }
    }

    loss_history_.push_back(loss(features, labels, n));
  }
}

void Mlp::serialize(std::ostream& out) const {
  const std::uint32_t nd = static_cast<std::uint32_t>(dims_.size());
  out.write(reinterpret_cast<const char*>(&nd), sizeof(nd));
  for (int d : dims_) {
    const std::uint32_t v = static_cast<std::uint32_t>(d);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  const std::uint64_t np = params_.size();
  out.write(reinterpret_cast<const char*>(&np), sizeof(np));
  out.write(reinterpret_cast<const char*>(params_.data()),
            static_cast<std::streamsize>(np * sizeof(double)));
}

Mlp Mlp::deserialize(std::istream& in) {
  auto fail = [] { throw std::runtime_error("mlp payload: unexpected end of file"); };
  std::uint32_t nd = 0;
  if (!in.read(reinterpret_cast<char*>(&nd), sizeof(nd))) fail();
  if (nd < 2 || nd > 64) throw std::runtime_error("mlp payload: bad layer count");
  Mlp mlp;
  mlp.dims_.resize(nd);
  for (std::uint32_t i = 0; i < nd; ++i) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) fail();
    mlp.dims_[i] = static_cast<int>(v);
  }
  mlp.build_views();
  std::uint64_t np = 0;
  if (!in.read(reinterpret_cast<char*>(&np), sizeof(np))) fail();
  if (np != mlp.params_.size()) throw std::runtime_error("mlp payload: parameter count mismatch");
  if (!in.read(reinterpret_cast<char*>(mlp.params_.data()),
               static_cast<std::streamsize>(np * sizeof(double))))
    fail();
  return mlp;
}

}  // namespace rteq
