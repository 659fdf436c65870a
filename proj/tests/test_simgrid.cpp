#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "sta/planned.hpp"
#include "sta/simgrid.hpp"

using namespace sta;

namespace {

auto ones() {
  return [](std::mt19937_64&) { return 1.0; };
}

CsrPattern csr_of(const Tensor<double>& t) {
  CsrPattern p;
  p.m = t.dims()[0];
  p.k = t.dims()[1];
  p.row_ptr.assign(static_cast<std::size_t>(p.m + 1), 0);
  for (const auto& e : t.entries()) {
    ++p.row_ptr[static_cast<std::size_t>(e.index / p.k + 1)];
    p.col.push_back(e.index % p.k);
  }
  for (std::size_t i = 1; i < p.row_ptr.size(); ++i) p.row_ptr[i] += p.row_ptr[i - 1];
  return p;
}

// Expected largest bin when `balls` balls land uniformly in `bins` bins.
double expected_max_bin(int balls, int bins, int trials, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<int> pick(0, bins - 1);
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> c(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b < balls; ++b) ++c[static_cast<std::size_t>(pick(g))];
    total += *std::max_element(c.begin(), c.end());
  }
  return total / trials;
}

}  // namespace

TEST_CASE("cyclic assignment") {
  const auto ring = standard_ring();
  const GridMap m2{{2, 2}, {0, 1}};
  SUBCASE("dense uniform") {
    Tensor<double> d({4, 4}, ring);
    const auto as = cyclic_assign(d, m2);
    for (auto c : as.counts) CHECK(c == 4);
    CHECK(balance_report(as).balance_ratio == 1.0);
  }
  SUBCASE("single dense column") {
    Tensor<double> s({4, 4}, ring, Storage::sparse);
    s.write({{0, 1.0}, {4, 1.0}, {8, 1.0}, {12, 1.0}});
    const auto as = cyclic_assign(s, m2);
    // rank = row coordinate * 2 + column coordinate
    CHECK(as.counts == std::vector<std::int64_t>{2, 0, 2, 0});
    CHECK(as.owned[0] == std::vector<std::int64_t>{0, 8});
    CHECK(balance_report(as).balance_ratio == 2.0);
  }
  SUBCASE("one mapped dimension") {
    Tensor<double> t({5, 3, 4}, ring, Storage::sparse);
    t.fill_random(0.5, 3, ones());
    const auto as = cyclic_assign(t, GridMap{{3}, {-1, -1, 0}});
    for (int r = 0; r < 3; ++r)
      for (auto lin : as.owned[static_cast<std::size_t>(r)]) CHECK(t.unravel(lin)[2] % 3 == r);
  }
  SUBCASE("bad maps") {
    Tensor<double> d({4, 4}, ring);
    CHECK_THROWS(cyclic_assign(d, GridMap{{2}, {0}}));
    CHECK_THROWS(cyclic_assign(d, GridMap{{2, 2}, {0, 0}}));
    CHECK_THROWS(cyclic_assign(d, GridMap{{2, 2}, {0, 5}}));
  }
  SUBCASE("non-dividing grid") {
    Tensor<double> d({5, 5}, ring);
    const auto as = cyclic_assign(d, m2);
    CHECK(as.counts == std::vector<std::int64_t>{9, 6, 6, 4});
  }
}

TEST_CASE("index randomization") {
  const auto ring = standard_ring();
  SUBCASE("round trip") {
    Tensor<double> t({6, 4, 6}, ring, Storage::sparse);
    t.fill_random(0.3, 11, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(1, 2)(g); });
    const Tensor<double> orig = t;
    const auto rec = randomize_indices(t, 99);
    CHECK(rec.perms.size() == 2);
    CHECK(t.nnz() == orig.nnz());
    restore_indices(t, rec);
    CHECK(std::ranges::equal(t.entries(), orig.entries()));
  }
  SUBCASE("symmetric stays symmetric") {
    Tensor<double> s({5, 5}, ring, Storage::sparse, {Sym::AS, Sym::NS});
    s.fill_random(0.6, 4, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(1, 2)(g); });
    const Tensor<double> orig = s;
    const auto rec = randomize_indices(s, 5);
    const auto& p = rec.perms.at(5);
    for (std::int64_t i = 0; i < 5; ++i)
      for (std::int64_t j = 0; j < 5; ++j) CHECK(s.at({p[i], p[j]}) == orig.at({i, j}));
    restore_indices(s, rec);
    CHECK(std::ranges::equal(s.entries(), orig.entries()));
  }
  SUBCASE("dense columns against balls into bins") {
    const std::int64_t n = 64;
    const int q1 = 8, q2 = 8;
    for (int c : {1, 4, 16}) {
      CAPTURE(c);
      double observed = 0;
      const int seeds = 100;
      for (int s = 0; s < seeds; ++s) {
        Tensor<double> t({n, n}, ring, Storage::sparse);
        std::vector<IndexValuePair<double>> e;
        for (std::int64_t i = 0; i < n; ++i)
          for (std::int64_t j = 0; j < c; ++j) e.push_back({i * n + j, 1.0});
        t.write(e);
        randomize_indices(t, 1000 + s);
        observed += double(balance_report(cyclic_assign(t, GridMap{{q1, q2}, {0, 1}})).max_nnz);
      }
      observed /= seeds;
      const double predicted =
          std::min({double(n * n) / (q1 * q2), double(n * c), double(n / q1) * expected_max_bin(c, q2, 2000, 7)});
      CHECK(observed == doctest::Approx(predicted).epsilon(0.1));
    }
  }
}

TEST_CASE("balance of uniform sparsity") {
  const auto ring = standard_ring();
  int good = 0;
  for (int s = 0; s < 100; ++s) {
    Tensor<double> t({1024, 1024}, ring, Storage::sparse);
    t.fill_random(65536.0 / (1024.0 * 1024.0), 500 + s, ones());
    const auto r = balance_report(cyclic_assign(t, GridMap{{8, 8}, {0, 1}}));
    CHECK(r.balance_ratio >= 1.0);
    good += r.balance_ratio <= 1.35;
  }
  CHECK(good >= 95);

  // one ball per bin on average: reported only
  Tensor<double> t({64, 64}, ring, Storage::sparse);
  t.fill_random(64.0 / 4096.0, 1, ones());
  MESSAGE("z = q balance ratio: " << balance_report(cyclic_assign(t, GridMap{{8, 8}, {0, 1}})).balance_ratio);
}

TEST_CASE("summa traffic") {
  const auto ring = standard_ring();
  SUBCASE("single process") {
    Tensor<double> a({8, 8}, ring, Storage::sparse);
    a.fill_random(1.0, 1, ones());
    const auto r = summa_traffic(csr_of(a), 8, {1, 1, 1});
    CHECK(r.total_words == 0);
    CHECK(r.max_words == 0);
  }
  SUBCASE("dense 4x4x4 on (2,2,1)") {
    Tensor<double> a({4, 4}, ring, Storage::sparse);
    a.fill_random(1.0, 1, ones());
    const auto r = summa_traffic(csr_of(a), 4, {2, 2, 1});
    for (auto x : r.received) CHECK(x == 8);
  }
  SUBCASE("conservation") {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 60; ++trial) {
      const std::int64_t m = 4 + g() % 29, k = 4 + g() % 29, n = 1 + g() % 32;
      Tensor<double> a({m, k}, ring, Storage::sparse);
      a.fill_random(1.0, trial, ones());
      for (int p : {2, 4, 8, 12}) {
        for (const Grid& grid : enumerate_grids(p)) {
          const auto r = summa_traffic(csr_of(a), n, grid);
          CHECK(std::accumulate(r.sent.begin(), r.sent.end(), std::int64_t{0}) ==
                std::accumulate(r.received.begin(), r.received.end(), std::int64_t{0}));
        }
      }
    }
  }
  SUBCASE("factor two on divisible dense shapes") {
    for (std::int64_t d : {12, 24, 48})
      for (int p : {2, 4, 8, 12})
        for (const Grid& grid : enumerate_grids(p)) {
          Tensor<double> a({d, d}, ring, Storage::sparse);
          a.fill_random(1.0, 1, ones());
          const auto r = summa_traffic(csr_of(a), d, grid);
          ProblemShape s;
          s.m = s.k = s.n = d;
          s.z = double(d * d);
          s.p = p;
          const double w = grid_words(s, grid);
          CAPTURE(grid.str());
          CHECK(double(r.max_words) <= 2 * w);
          CHECK(double(r.max_words) >= 0.5 * w);
        }
  }
}

TEST_CASE("replay determinism") {
  const auto ring = standard_ring();
  Tensor<double> A({20, 16}, ring, Storage::sparse), B({16, 12}, ring), C1({20, 12}, ring), C2({20, 12}, ring);
  A.fill_random(0.2, 1, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(-1, 1)(g); });
  B.fill_random(1.0, 2, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(-1, 1)(g); });
  const VirtualWorld w(8);
  const auto e1 = contraction(C1["ij"], A["ik"], B["kj"]);
  const auto e2 = contraction(C2["ij"], A["ik"], B["kj"]);
  for (const Grid& g : enumerate_grids(8)) {
    const auto plan = make_plan(folded_shape(e1, 8), g);
    const auto r1 = execute_planned(e1, plan, w);
    const auto r2 = execute_planned(e2, plan, w);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(std::ranges::equal(C1.dense_data(), C2.dense_data()));
  }
}
