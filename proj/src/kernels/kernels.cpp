#include "rteq/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace rteq::kernels {

namespace {

Backend resolve_default() {
  if (const char* env = std::getenv("RTEQ_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2") {
      if (!avx2_supported())
        throw std::invalid_argument("RTEQ_KERNELS=avx2 but this CPU/build lacks AVX2");
      return Backend::avx2;
    }
    throw std::invalid_argument("RTEQ_KERNELS must be 'scalar' or 'avx2'");
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend& current() {
  static Backend b = resolve_default();
  return b;
}

}  // namespace

bool avx2_supported() {
#if defined(RTEQ_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return current(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported())
    throw std::invalid_argument("AVX2 backend not available on this CPU/build");
  current() = b;
}

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

const Ops& ops() {
#if defined(RTEQ_HAVE_AVX2)
  if (current() == Backend::avx2) return detail::avx2_ops();
#endif
  return detail::scalar_ops();
}

}  // namespace rteq::kernels
