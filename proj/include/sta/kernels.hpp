#pragma once

// Row-update kernels used by the local block multiply. Each kernel has a
// scalar reference version and vector versions that must match it bit for bit.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace sta::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Best instruction set that is both compiled in and supported by the CPU.
Isa detected_isa();
/// Instruction set used by the dispatching entry points. Defaults to
/// detected_isa(); STA_FORCE_SCALAR=1 in the environment forces scalar.
Isa active_isa();
/// Overrides the active instruction set (tests). Throws if unavailable.
void set_active_isa(Isa isa);
bool isa_available(Isa isa);

// c[j] = c[j] + a * b[j]
void axpy_f64(double* c, const double* b, double a, std::size_t n);
// c[j] = min(c[j], a (x) b[j]) where (x) is + saturating at `inf`
void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n);

namespace scalar {
void axpy_f64(double* c, const double* b, double a, std::size_t n);
void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy_f64(double* c, const double* b, double a, std::size_t n);
void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n);
}  // namespace avx2

namespace neon {
void axpy_f64(double* c, const double* b, double a, std::size_t n);
void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n);
}  // namespace neon

}  // namespace sta::kernels
