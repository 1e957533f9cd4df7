#include "rteq/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rteq {

Mat3 mat3_identity() {
  return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return c;
}

Mat3 mat3_transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

double mat3_det(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

double mat3_frobenius(const Mat3& a) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * a[i][j];
  return std::sqrt(s);
}

Vec3 mat3_apply(const Mat3& a, const Vec3& v) {
  return {a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
          a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
          a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2]};
}

namespace {

std::size_t pow_size(int dim, int order) {
  std::size_t s = 1;
  for (int i = 0; i < order; ++i) s *= static_cast<std::size_t>(dim);
  return s;
}

}  // namespace

DenseTensor::DenseTensor(int order, int dim)
    : order_(order), dim_(dim), data_(pow_size(dim, order), 0.0) {
  if (order < 0) throw std::invalid_argument("tensor order must be non-negative");
  if (dim < 1) throw std::invalid_argument("tensor dim must be positive");
}

DenseTensor::DenseTensor(int order, std::vector<double> data, int dim)
    : order_(order), dim_(dim), data_(std::move(data)) {
  if (order < 0) throw std::invalid_argument("tensor order must be non-negative");
  if (dim < 1) throw std::invalid_argument("tensor dim must be positive");
  if (data_.size() != pow_size(dim, order))
    throw std::invalid_argument("tensor data length must be dim^order");
}

DenseTensor DenseTensor::scalar(double v) {
  DenseTensor t(0, 3);
  t.data_[0] = v;
  return t;
}

std::size_t DenseTensor::offset(std::span<const int> idx) const {
  std::size_t off = 0;
  for (int a = 0; a < order_; ++a) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[a]);
  return off;
}

double DenseTensor::at(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != order_)
    throw std::invalid_argument("multi-index length must equal tensor order");
  std::vector<int> v(idx);
  return data_[offset(v)];
}

double DenseTensor::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  Mat3 mmt = mat3_mul(m, mat3_transpose(m));
  Mat3 eye = mat3_identity();
  double resid = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double d = mmt[i][j] - eye[i][j];
      resid += d * d;
    }
  if (std::sqrt(resid) > 1e-12)
    throw std::invalid_argument("rotation matrix is not orthonormal");
  if (std::abs(mat3_det(m) - 1.0) > 1e-12)
    throw std::invalid_argument("rotation matrix must have determinant +1");
}

Rotation Rotation::transposed() const {
  Rotation r;
  r.m_ = mat3_transpose(m_);
  return r;
}

Rotation operator*(const Rotation& a, const Rotation& b) {
  Rotation r;
  r.m_ = mat3_mul(a.m_, b.m_);
  return r;
}

const DenseTensor& TensorTuple::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw std::invalid_argument("tuple has no tensor named '" + name + "'");
}

std::size_t TupleShape::flat_size() const {
  std::size_t s = scalar_names.size();
  for (const auto& [name, order] : tensor_orders) s += pow_size(3, order);
  return s;
}

TupleShape shape_of(const TensorTuple& t) {
  TupleShape s;
  for (const auto& [name, v] : t.scalars) s.scalar_names.push_back(name);
  for (const auto& [name, ten] : t.tensors) s.tensor_orders.emplace_back(name, ten.order());
  s.anchor = t.anchor;
  return s;
}

DenseTensor rotate(const DenseTensor& t, const Rotation& r) {
  if (t.dim() != 3)
    throw std::invalid_argument("rotate requires a dim-3 tensor");
  const int k = t.order();
  if (k == 0) return t;

  const Mat3& m = r.matrix();
  std::vector<double> cur = t.data();
  std::vector<double> nxt(cur.size());

  // Mode products, front axis first; stride of axis a is 3^(k-1-a).
  std::size_t stride = cur.size() / 3;
  for (int axis = 0; axis < k; ++axis) {
    const std::size_t blocks = cur.size() / (3 * stride);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t base = b * 3 * stride;
      for (std::size_t i = 0; i < stride; ++i) {
        const double x0 = cur[base + i];
        const double x1 = cur[base + stride + i];
        const double x2 = cur[base + 2 * stride + i];
        nxt[base + i] = m[0][0] * x0 + m[0][1] * x1 + m[0][2] * x2;
        nxt[base + stride + i] = m[1][0] * x0 + m[1][1] * x1 + m[1][2] * x2;
        nxt[base + 2 * stride + i] = m[2][0] * x0 + m[2][1] * x1 + m[2][2] * x2;
      }
    }
    cur.swap(nxt);
    stride /= 3;
  }

  DenseTensor out(k, std::move(cur), 3);
  out.symmetric = t.symmetric;
  return out;
}

DenseTensor contract(const DenseTensor& t, int axis_a, int axis_b) {
  const int k = t.order();
  if (k < 2) throw std::invalid_argument("contract requires order >= 2");
  if (axis_a == axis_b) throw std::invalid_argument("contraction axes must differ");
  if (axis_a < 1 || axis_a > k || axis_b < 1 || axis_b > k)
    throw std::invalid_argument("contraction axis out of range (axes are 1-based)");

  const int a = std::min(axis_a, axis_b) - 1;
  const int b = std::max(axis_a, axis_b) - 1;
  const int n = t.dim();
  const std::size_t un = static_cast<std::size_t>(n);

  // Input strides per axis.
  std::vector<std::size_t> stride(k);
  stride[k - 1] = 1;
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * un;

  // Axes of the result, i.e. input axes minus {a, b}.
  std::vector<std::size_t> kept;
  kept.reserve(k - 2);
  for (int i = 0; i < k; ++i)
    if (i != a && i != b) kept.push_back(stride[i]);

  DenseTensor out(k - 2, n);
  const std::size_t out_size = out.size();
  const std::size_t pair_stride = stride[a] + stride[b];

  for (std::size_t oi = 0; oi < out_size; ++oi) {
    // Decompose oi into digits over the kept axes (last fastest).
    std::size_t base = 0;
    std::size_t rem = oi;
    for (int d = k - 3; d >= 0; --d) {
      base += (rem % un) * kept[d];
      rem /= un;
    }
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += t[base + static_cast<std::size_t>(m) * pair_stride];
    out[oi] = s;
  }
  return out;
}

DenseTensor contract_to_order(const DenseTensor& t, int target_order) {
  if (target_order < 0) throw std::invalid_argument("target order must be non-negative");
  if (t.order() < target_order)
    throw std::invalid_argument("cannot contract below the target order");
  if ((t.order() - target_order) % 2 != 0)
    throw std::invalid_argument("contraction changes order in steps of 2; parity mismatch");
  DenseTensor cur = t;
  while (cur.order() > target_order) cur = contract(cur, 1, 2);
  return cur;
}

DenseTensor symmetrize(const DenseTensor& t) {
  const int k = t.order();
  if (k > 6) throw std::invalid_argument("symmetrize supports order <= 6");
  if (k <= 1) {
    DenseTensor out = t;
    out.symmetric = true;
    return out;
  }

  const int n = t.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  const std::size_t size = t.size();

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<double> acc(size, 0.0);
  std::vector<int> digits(k);
  std::size_t n_perms = 0;
  do {
    ++n_perms;
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t rem = idx;
      for (int d = k - 1; d >= 0; --d) {
        digits[d] = static_cast<int>(rem % un);
        rem /= un;
      }
      std::size_t src = 0;
      for (int d = 0; d < k; ++d)
        src = src * un + static_cast<std::size_t>(digits[perm[d]]);
      acc[idx] += t[src];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const double inv = 1.0 / static_cast<double>(n_perms);
  for (double& x : acc) x *= inv;
  DenseTensor out(k, std::move(acc), n);
  out.symmetric = true;
  return out;
}

TensorTuple rotate_tuple(const TensorTuple& x, const Rotation& r) {
  TensorTuple out;
  out.scalars = x.scalars;
  out.anchor = x.anchor;
  out.tensors.reserve(x.tensors.size());
  for (const auto& [name, t] : x.tensors) out.tensors.emplace_back(name, rotate(t, r));
  return out;
}

std::vector<double> flatten(const TensorTuple& t) {
  std::vector<double> v;
  std::size_t total = t.scalars.size();
  for (const auto& [name, ten] : t.tensors) total += ten.size();
  v.reserve(total);
  for (const auto& [name, s] : t.scalars) v.push_back(s);
  for (const auto& [name, ten] : t.tensors)
    v.insert(v.end(), ten.data().begin(), ten.data().end());
  return v;
}

TensorTuple unflatten(std::span<const double> v, const TupleShape& shape) {
  if (v.size() != shape.flat_size())
    throw std::invalid_argument("flat vector length does not match tuple shape");
  TensorTuple t;
  std::size_t pos = 0;
  for (const auto& name : shape.scalar_names) t.scalars.emplace_back(name, v[pos++]);
  for (const auto& [name, order] : shape.tensor_orders) {
    const std::size_t sz = pow_size(3, order);
    std::vector<double> data(v.begin() + static_cast<std::ptrdiff_t>(pos),
                             v.begin() + static_cast<std::ptrdiff_t>(pos + sz));
    pos += sz;
    t.tensors.emplace_back(name, DenseTensor(order, std::move(data), 3));
  }
  t.anchor = shape.anchor;
  return t;
}

}  // namespace rteq
