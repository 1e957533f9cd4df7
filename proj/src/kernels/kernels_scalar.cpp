#include "rteq/kernels.hpp"

namespace rteq::kernels::detail {

namespace {

// Reference kernels. The 4-lane blocking is the canonical accumulation
// order that the SIMD backends reproduce lane for lane.

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  const std::size_t nb = n & ~static_cast<std::size_t>(3);
  for (std::size_t i = 0; i < nb; i += 4) {
    l0 += a[i] * b[i];
    l1 += a[i + 1] * b[i + 1];
    l2 += a[i + 2] * b[i + 2];
    l3 += a[i + 3] * b[i + 3];
  }
  double r = (l0 + l2) + (l1 + l3);
  for (std::size_t i = nb; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  const std::size_t nb = n & ~static_cast<std::size_t>(3);
  for (std::size_t i = 0; i < nb; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    l0 += d0 * d0;
    l1 += d1 * d1;
    l2 += d2 * d2;
    l3 += d3 * d3;
  }
  double r = (l0 + l2) + (l1 + l3);
  for (std::size_t i = nb; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{dot_scalar, sq_diff_scalar, axpy_scalar};
  return ops;
}

}  // namespace rteq::kernels::detail
