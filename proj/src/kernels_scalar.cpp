#include "sta/kernels.hpp"

namespace sta::kernels::scalar {

void axpy_f64(double* c, const double* b, double a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double prod = a * b[j];
    c[j] = c[j] + prod;
  }
}

void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n) {
  if (a == inf) {
    for (std::size_t j = 0; j < n; ++j)
      if (inf < c[j]) c[j] = inf;
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    // Wrapping add to mirror the vector lane semantics.
    const auto sum = static_cast<std::int32_t>(static_cast<std::uint32_t>(a) +
                                               static_cast<std::uint32_t>(b[j]));
    const std::int32_t v = b[j] == inf ? inf : sum;
    if (v < c[j]) c[j] = v;
  }
}

}  // namespace sta::kernels::scalar
