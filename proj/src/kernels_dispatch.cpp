#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sta/kernels.hpp"

namespace sta::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(STA_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(STA_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

namespace {

Isa initial_isa() {
  const char* force = std::getenv("STA_FORCE_SCALAR");
  if (force && std::string(force) == "1") return Isa::scalar;
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("instruction set not available: " + std::string(to_string(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void axpy_f64(double* c, const double* b, double a, std::size_t n) {
  switch (active_isa()) {
#if defined(STA_BUILD_AVX2)
    case Isa::avx2: return avx2::axpy_f64(c, b, a, n);
#endif
#if defined(STA_BUILD_NEON)
    case Isa::neon: return neon::axpy_f64(c, b, a, n);
#endif
    default: return scalar::axpy_f64(c, b, a, n);
  }
}

void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n) {
  switch (active_isa()) {
#if defined(STA_BUILD_AVX2)
    case Isa::avx2: return avx2::minplus_i32(c, b, a, inf, n);
#endif
#if defined(STA_BUILD_NEON)
    case Isa::neon: return neon::minplus_i32(c, b, a, inf, n);
#endif
    default: return scalar::minplus_i32(c, b, a, inf, n);
  }
}

}  // namespace sta::kernels
