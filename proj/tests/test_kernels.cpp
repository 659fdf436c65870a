#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "sta/kernels.hpp"

using namespace sta::kernels;

namespace {

using AxpyFn = void (*)(double*, const double*, double, std::size_t);
using MinplusFn = void (*)(std::int32_t*, const std::int32_t*, std::int32_t, std::int32_t, std::size_t);

struct Variant {
  Isa isa;
  AxpyFn axpy;
  MinplusFn minplus;
};

std::vector<Variant> vector_variants() {
  std::vector<Variant> v;
#if defined(STA_BUILD_AVX2)
  if (isa_available(Isa::avx2)) v.push_back({Isa::avx2, &avx2::axpy_f64, &avx2::minplus_i32});
#endif
#if defined(STA_BUILD_NEON)
  if (isa_available(Isa::neon)) v.push_back({Isa::neon, &neon::axpy_f64, &neon::minplus_i32});
#endif
  return v;
}

constexpr std::int32_t kInf = INT32_MAX / 2;

}  // namespace

TEST_CASE("scalar kernels") {
  std::vector<double> c = {1, 2, 3}, b = {1, 1, 2};
  scalar::axpy_f64(c.data(), b.data(), 2.0, 3);
  CHECK(c == std::vector<double>{3, 4, 7});

  std::vector<std::int32_t> ci = {5, kInf, 1}, bi = {1, 2, kInf};
  scalar::minplus_i32(ci.data(), bi.data(), 3, kInf, 3);
  CHECK(ci == std::vector<std::int32_t>{4, 5, 1});
  scalar::minplus_i32(ci.data(), bi.data(), kInf, kInf, 3);
  CHECK(ci == std::vector<std::int32_t>{4, 5, 1});
}

TEST_CASE("vector kernels match scalar bit for bit") {
  const auto variants = vector_variants();
  if (variants.empty()) {
    MESSAGE("no vector ISA available; only the scalar kernel is exercised");
    return;
  }
  std::mt19937_64 g(12345);
  std::uniform_real_distribution<double> ud(-1e3, 1e3);
  std::uniform_int_distribution<std::int32_t> ui(-1000000, 1000000);
  for (const auto& v : variants) {
    CAPTURE(to_string(v.isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 33u, 100u, 1027u}) {
      CAPTURE(n);
      std::vector<double> b(n), c0(n), c1;
      for (auto& x : b) x = ud(g);
      for (auto& x : c0) x = ud(g);
      c1 = c0;
      const double a = ud(g);
      scalar::axpy_f64(c0.data(), b.data(), a, n);
      v.axpy(c1.data(), b.data(), a, n);
      CHECK(std::memcmp(c0.data(), c1.data(), n * sizeof(double)) == 0);

      std::vector<std::int32_t> bi(n), d0(n), d1;
      for (std::size_t j = 0; j < n; ++j) {
        bi[j] = j % 5 == 0 ? kInf : ui(g);
        d0[j] = j % 7 == 0 ? kInf : ui(g);
      }
      d1 = d0;
      for (std::int32_t ai : {ui(g), std::int32_t(0), kInf}) {
        scalar::minplus_i32(d0.data(), bi.data(), ai, kInf, n);
        v.minplus(d1.data(), bi.data(), ai, kInf, n);
        CHECK(d0 == d1);
      }
    }
  }
}

TEST_CASE("dispatch") {
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  std::vector<double> c = {1}, b = {2};
  axpy_f64(c.data(), b.data(), 3.0, 1);
  CHECK(c[0] == 7.0);
  if (!isa_available(Isa::neon)) CHECK_THROWS(set_active_isa(Isa::neon));
  set_active_isa(before);
  CHECK(active_isa() == before);
}
