#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rteq {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Mat3 mat3_identity();
Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Mat3 mat3_transpose(const Mat3& a);
double mat3_det(const Mat3& a);
double mat3_frobenius(const Mat3& a);
Vec3 mat3_apply(const Mat3& a, const Vec3& v);

/// Dense order-k tensor over R^n (n defaults to 3), row-major with the last
/// index fastest. Order 0 is a scalar held in a length-1 buffer.
///
/// Values are immutable in spirit: every operation below returns a fresh
/// tensor. Mutation is only exposed through data() for construction code.
class DenseTensor {
 public:
  DenseTensor() : DenseTensor(0, 3) {}
  DenseTensor(int order, int dim = 3);
  DenseTensor(int order, std::vector<double> data, int dim = 3);

  static DenseTensor scalar(double v);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Linear offset of a multi-index (idx must have order() entries).
  std::size_t offset(std::span<const int> idx) const;
  double at(std::initializer_list<int> idx) const;

  double frobenius_norm() const;

  /// Advisory flag: set on tensors constructed to be permutation-symmetric.
  bool symmetric = false;

 private:
  int order_;
  int dim_;
  std::vector<double> data_;
};

/// Element of SO(3). The constructor validates orthonormality (1e-12) and
/// det = +1 (1e-12); factorizations that build rotations by construction
/// still go through the check, it is ~40 flops.
class Rotation {
 public:
  Rotation() : m_(mat3_identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation transposed() const;

  /// Composition: (a * b) acts as "apply b, then a".
  friend Rotation operator*(const Rotation& a, const Rotation& b);

  Vec3 apply(const Vec3& v) const { return mat3_apply(m_, v); }

 private:
  Mat3 m_;
};

/// A named bundle of rotation-invariant scalars plus tensors over R^3,
/// the sample type the case studies feed through the pipeline. `anchor`
/// names the tensor the standardizing rotation is derived from.
struct TensorTuple {
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, DenseTensor>> tensors;
  std::string anchor;

  const DenseTensor& tensor(const std::string& name) const;
};

/// Layout metadata that makes a flat feature vector invertible back into a
/// TensorTuple: scalar names first, then (name, order) per tensor, all dim 3.
struct TupleShape {
  std::vector<std::string> scalar_names;
  std::vector<std::pair<std::string, int>> tensor_orders;
  std::string anchor;

  std::size_t flat_size() const;
  bool operator==(const TupleShape&) const = default;
};

TupleShape shape_of(const TensorTuple& t);

// ---------------------------------------------------------------------------
// Operations. Contraction axes are 1-based, matching the C(a,b) convention
// used throughout the tests and docs.
// ---------------------------------------------------------------------------

/// Rotation action on an order-k tensor: applies R to every index. Computed
/// as k successive mode products (cost k*3^(k+1)), identical to the k-fold
/// sum over R_{i1 j1}...R_{ik jk} T_{j1...jk}. Requires dim 3. Order 0 is
/// returned unchanged.
DenseTensor rotate(const DenseTensor& t, const Rotation& r);

/// Contraction C(a,b): sums over a matched index pair, reducing order by 2.
/// Axes are 1-based and must be distinct, order must be >= 2. For order 2
/// this is the trace (as an order-0 tensor). Works for any dim.
DenseTensor contract(const DenseTensor& t, int axis_a, int axis_b);

/// Repeated C(1,2) until the requested order (2 or 3 in practice) is hit.
/// Always contracting the current first two axes is normative; a different
/// axis schedule gives a different (equally valid but non-reproducible)
/// standard position.
DenseTensor contract_to_order(const DenseTensor& t, int target_order);

/// Average over all k! index permutations; idempotent. Supported for
/// order <= 6, in line with what the case studies and suites need.
DenseTensor symmetrize(const DenseTensor& t);

/// Rotates every tensor of the tuple by r; scalars are invariant.
TensorTuple rotate_tuple(const TensorTuple& x, const Rotation& r);

/// Scalars first in declaration order, then each tensor row-major in
/// declaration order. unflatten is the exact inverse given the shape.
std::vector<double> flatten(const TensorTuple& t);
TensorTuple unflatten(std::span<const double> v, const TupleShape& shape);

}  // namespace rteq
