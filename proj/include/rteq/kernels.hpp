#pragma once

#include <cstddef>
#include <string>

namespace rteq::kernels {

/// Reduction/update kernels behind the MLP and the evaluation loops.
///
/// Both backends implement the same canonical arithmetic: blocked 4-lane
/// accumulation combined as (l0+l2)+(l1+l3), then a sequential tail. With
/// fp-contract off that makes scalar and AVX2 results bit-identical, so the
/// runtime backend choice can never change a reported number.
enum class Backend { scalar, avx2 };

struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sq_diff)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

bool avx2_supported();

/// Backend in use. Resolution order: explicit set_backend() call, then the
/// RTEQ_KERNELS env var ("scalar" or "avx2"), then AVX2 if the CPU has it.
Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unsupported
std::string backend_name(Backend b);

const Ops& ops();

inline double dot(const double* a, const double* b, std::size_t n) {
  return ops().dot(a, b, n);
}
inline double sq_diff(const double* a, const double* b, std::size_t n) {
  return ops().sq_diff(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  ops().axpy(alpha, x, y, n);
}

/// out = W x + bias, W row-major rows x cols (bias may be null).
inline void matvec(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, const double* bias, double* out) {
  for (std::size_t r = 0; r < rows; ++r)
    out[r] = dot(w + r * cols, x, cols) + (bias ? bias[r] : 0.0);
}

/// out += W^T y, accumulated row by row so the summation order is fixed.
inline void matvec_transposed_add(const double* w, std::size_t rows, std::size_t cols,
                                  const double* y, double* out) {
  for (std::size_t r = 0; r < rows; ++r) axpy(y[r], w + r * cols, out, cols);
}

namespace detail {
const Ops& scalar_ops();
#if defined(RTEQ_HAVE_AVX2)
const Ops& avx2_ops();
#endif
}  // namespace detail

}  // namespace rteq::kernels
