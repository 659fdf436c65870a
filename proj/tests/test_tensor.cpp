#include <cmath>
#include <cstdint>
#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sta/tensor.hpp"
#include "sta/tensor_io.hpp"

using namespace sta;

namespace {

auto uniform(double lo, double hi) {
  return [lo, hi](std::mt19937_64& g) { return std::uniform_real_distribution<double>(lo, hi)(g); };
}

}  // namespace

TEST_CASE("construction") {
  Tensor<std::int32_t> F({4, 4}, tropical_semiring(), Storage::sparse, {Sym::SH, Sym::NS});
  CHECK(F.nnz() == 0);
  CHECK(F.is_symmetric());
  CHECK(F.at({1, 2}) == F.structure().add_id());

  Tensor<double> V({3, 3, 2, 2}, standard_ring(), Storage::sparse, {Sym::AS, Sym::NS, Sym::AS, Sym::NS});
  CHECK(V.order() == 4);
  CHECK(V.size() == 36);

  Tensor<double> s({}, standard_ring());
  CHECK(s.order() == 0);
  CHECK(s.size() == 1);
  CHECK(s.value() == 0.0);

  CHECK_THROWS_AS(Tensor<double>({2, 3}, standard_ring(), Storage::dense, {Sym::SY, Sym::NS}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor<double>({2, 2}, standard_ring(), Storage::dense, {Sym::NS, Sym::SY}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor<double>({2, 0}, standard_ring()), std::invalid_argument);
  CHECK_THROWS_AS(Tensor<double>({2, 2}, standard_ring(), Storage::dense, {Sym::NS}), std::invalid_argument);
  // antisymmetry needs an additive inverse
  CHECK_THROWS_AS(Tensor<std::int32_t>({2, 2}, tropical_semiring(), Storage::sparse, {Sym::AS, Sym::NS}),
                  std::invalid_argument);
  // mixed adjacent tags in one group
  CHECK_THROWS_AS(Tensor<double>({2, 2, 2}, standard_ring(), Storage::dense, {Sym::SY, Sym::AS, Sym::NS}),
                  std::invalid_argument);
  // sets carry no identity but may still be stored densely
  Tensor<int> set_t({2}, Structure<int>::set());
  CHECK(set_t.at({1}) == 0);

  CHECK_THROWS_AS(V["abc"], std::invalid_argument);
}

TEST_CASE("write and read") {
  Tensor<double> d({2, 2}, standard_ring());
  d.write({{0, 5.0}});
  CHECK(d.at({0, 0}) == 5.0);
  d.write({{0, 1.0}}, true);
  CHECK(d.at({0, 0}) == 6.0);
  CHECK_THROWS_AS(d.write({{4, 1.0}}), std::out_of_range);

  Tensor<double> s({4}, standard_ring(), Storage::sparse);
  s.write({{3, 0.0}});
  CHECK(s.nnz() == 0);
  CHECK(s.at({3}) == 0.0);
  s.write({{3, 2.0}, {1, 1.0}});
  CHECK(s.nnz() == 2);
  s.write({{3, -2.0}}, true);
  CHECK(s.nnz() == 1);
  CHECK(s.read({0, 1, 2, 3}) == std::vector<double>{0, 1, 0, 0});

  SUBCASE("round trip") {
    Tensor<double> t({5, 3}, standard_ring(), Storage::sparse);
    std::vector<IndexValuePair<double>> e = {{14, 1.5}, {2, -3.0}, {7, 9.0}};
    t.write(e);
    for (const auto& p : e) CHECK(t.read(p.index) == p.value);
  }
}

TEST_CASE("symmetry") {
  SUBCASE("antisymmetric") {
    Tensor<double> a({3, 3}, standard_ring(), Storage::sparse, {Sym::AS, Sym::NS});
    a.write({{1, 2.0}});  // (0,1)
    CHECK(a.at({1, 0}) == -2.0);
    CHECK(a.at({0, 1}) == 2.0);
    CHECK(a.at({2, 2}) == 0.0);
    CHECK_THROWS_AS(a.write({{3, 1.0}}), std::invalid_argument);  // (1,0) is not canonical
    CHECK_THROWS_AS(a.write({{4, 1.0}}), std::invalid_argument);  // diagonal of AS
    CHECK(a.norm2() == doctest::Approx(std::sqrt(8.0)));
  }
  SUBCASE("symmetric hollow") {
    Tensor<std::int32_t> h({3, 3}, tropical_semiring(), Storage::sparse, {Sym::SH, Sym::NS});
    h.write({{5, 7}});  // (1,2)
    CHECK(h.at({2, 1}) == 7);
    CHECK(h.at({1, 1}) == h.structure().add_id());
  }
  SUBCASE("symmetric dense") {
    Tensor<double> s({3, 3}, standard_ring(), Storage::dense, {Sym::SY, Sym::NS});
    s.write({{4, 1.0}, {2, 3.0}});  // (1,1) and (0,2)
    CHECK(s.at({2, 0}) == 3.0);
    CHECK(s.at({1, 1}) == 1.0);
    int logical = 0;
    s.for_each_logical([&](std::span<const std::int64_t>, const double& v) { logical += v != 0.0; });
    CHECK(logical == 3);
  }
  SUBCASE("order-3 antisymmetric images") {
    Tensor<double> t({3, 3, 3}, standard_ring(), Storage::sparse, {Sym::AS, Sym::AS, Sym::NS});
    t.write({{t.linearize(std::vector<std::int64_t>{0, 1, 2}), 1.0}});
    std::map<std::vector<std::int64_t>, double> seen;
    t.for_each_logical([&](std::span<const std::int64_t> idx, const double& v) {
      seen[std::vector<std::int64_t>(idx.begin(), idx.end())] = v;
    });
    CHECK(seen.size() == 6);
    CHECK(seen[{1, 0, 2}] == -1.0);
    CHECK(seen[{2, 0, 1}] == 1.0);
    CHECK(seen[{2, 1, 0}] == -1.0);
    CHECK(t.at({1, 2, 0}) == 1.0);
  }
}

TEST_CASE("sparsify") {
  Tensor<PathElement> p({3}, path_semiring(), Storage::sparse);
  p.write({{0, {4, 1}}, {1, {5, 2}}, {2, {6, 3}}});
  SUBCASE("hop filter") {
    p.sparsify([](const PathElement& e) { return e.h == 2; });
    CHECK(p.nnz() == 1);
    CHECK(p.at({1}).w == 5);
  }
  SUBCASE("keep all") {
    p.sparsify([](const PathElement&) { return true; });
    CHECK(p.nnz() == 3);
  }
  SUBCASE("keep none") {
    p.sparsify([](const PathElement&) { return false; });
    CHECK(p.nnz() == 0);
  }
  Tensor<double> d({2}, standard_ring());
  CHECK_THROWS_AS(d.sparsify([](const double&) { return true; }), std::logic_error);
}

TEST_CASE("fill_random") {
  Tensor<double> a({64, 64}, standard_ring(), Storage::sparse), b = a;
  a.fill_random(0.1, 7, uniform(1, 2));
  b.fill_random(0.1, 7, uniform(1, 2));
  CHECK(std::ranges::equal(a.entries(), b.entries()));
  b.fill_random(0.1, 8, uniform(1, 2));
  CHECK_FALSE(std::ranges::equal(a.entries(), b.entries()));

  Tensor<double> d({2, 2}, standard_ring());
  d.fill_random(1.0, 3, uniform(1, 2));
  int nz = 0;
  for (double v : d.dense_data()) nz += v != 0.0;
  CHECK(nz == 4);

  CHECK_THROWS_AS(d.fill_random(0.0, 1, uniform(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(d.fill_random(1.5, 1, uniform(1, 2)), std::invalid_argument);

  SUBCASE("binomial nnz") {
    // mean over seeds of a 1024^2 fill at density 0.01
    const double n2 = 1024.0 * 1024.0, p = 0.01;
    double total = 0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s) {
      Tensor<double> t({1024, 1024}, standard_ring(), Storage::sparse);
      t.fill_random(p, 100 + s, uniform(1, 2));
      total += static_cast<double>(t.nnz());
    }
    const double mean = n2 * p * seeds, sigma = std::sqrt(n2 * p * (1 - p) * seeds);
    CHECK(std::abs(total - mean) <= 3 * sigma);
  }
  SUBCASE("symmetric fill stays canonical") {
    Tensor<double> s({8, 8}, standard_ring(), Storage::sparse, {Sym::AS, Sym::NS});
    s.fill_random(0.5, 2, uniform(1, 2));
    for (const auto& e : s.entries()) CHECK(s.is_canonical(s.unravel(e.index)));
  }
}

TEST_CASE("norms") {
  Tensor<double> v({2}, standard_ring());
  v.write({{0, 3.0}, {1, -4.0}});
  CHECK(v.norm2() == 5.0);
  CHECK(v.norm1() == 7.0);
  Tensor<double> e({5}, standard_ring(), Storage::sparse);
  CHECK(e.norm1() == 0.0);
}

TEST_CASE("storage conversion") {
  Tensor<double> s({3, 3}, standard_ring(), Storage::sparse, {Sym::SY, Sym::NS});
  s.write({{1, 2.0}, {8, 1.0}});
  const auto d = with_storage(s, Storage::dense);
  CHECK_FALSE(d.is_sparse());
  CHECK(d.at({1, 0}) == 2.0);
  const auto back = with_storage(d, Storage::sparse);
  CHECK(std::ranges::equal(back.entries(), s.entries()));
}

TEST_CASE("text formats") {
  SUBCASE("matrix market symmetric") {
    std::istringstream in(
        "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2.0\n3 1 -1.5\n2 2 4\n");
    const auto t = read_matrix_market(in, standard_ring());
    CHECK(t.sym()[0] == Sym::SY);
    CHECK(t.at({0, 2}) == -1.5);
    CHECK(t.at({2, 0}) == -1.5);
    std::ostringstream out;
    write_matrix_market(out, t);
    std::istringstream again(out.str());
    const auto u = read_matrix_market(again, standard_ring());
    CHECK(std::ranges::equal(u.entries(), t.entries()));
  }
  SUBCASE("matrix market errors") {
    std::istringstream bad("not a banner\n");
    CHECK_THROWS(read_matrix_market(bad, standard_ring()));
    std::istringstream range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS(read_matrix_market(range, standard_ring()));
  }
  SUBCASE("plain tensor text") {
    Tensor<double> t({2, 3, 4}, standard_ring(), Storage::sparse);
    t.fill_random(0.3, 5, uniform(-1, 1));
    std::ostringstream out;
    write_tensor_text(out, t);
    std::istringstream in(out.str());
    const auto u = read_tensor_text(in, standard_ring());
    CHECK(u.dims() == t.dims());
    CHECK(std::ranges::equal(u.entries(), t.entries()));
  }
}
