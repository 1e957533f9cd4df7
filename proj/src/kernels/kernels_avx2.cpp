#if defined(RTEQ_HAVE_AVX2)

#include <immintrin.h>

#include "rteq/kernels.hpp"

namespace rteq::kernels::detail {

namespace {

// Plain mul+add, no fma: lane arithmetic must match the scalar reference
// bit for bit.

inline double hsum(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t nb = n & ~static_cast<std::size_t>(3);
  for (std::size_t i = 0; i < nb; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double r = hsum(acc);
  for (std::size_t i = nb; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t nb = n & ~static_cast<std::size_t>(3);
  for (std::size_t i = 0; i < nb; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double r = hsum(acc);
  for (std::size_t i = nb; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const std::size_t nb = n & ~static_cast<std::size_t>(3);
  for (std::size_t i = 0; i < nb; i += 4) {
    const __m256d t = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                    _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, t);
  }
  for (std::size_t i = nb; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{dot_avx2, sq_diff_avx2, axpy_avx2};
  return ops;
}

}  // namespace rteq::kernels::detail

#endif  // RTEQ_HAVE_AVX2
