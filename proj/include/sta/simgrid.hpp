#pragma once

// Simulated processor grids: cyclic ownership, load balance, index
// randomization, and a replay of the replicated SUMMA schedule that counts
// every word moved between virtual processes.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sta/algebra.hpp"
#include "sta/kernels.hpp"
#include "sta/planner.hpp"
#include "sta/tensor.hpp"
#include "sta/workers.hpp"
#include "sta/world.hpp"

namespace sta {

struct SimReport {
  Grid grid;
  std::vector<std::int64_t> nnz;       // sparse-operand elements owned per process
  std::vector<std::int64_t> sent;      // words sent per process
  std::vector<std::int64_t> received;  // words received per process
  std::vector<std::int64_t> a_words;   // sent + received while gathering A
  std::vector<std::int64_t> a_received;
  std::vector<std::int64_t> b_words;
  std::vector<std::int64_t> c_words;
  std::int64_t max_nnz = 0;
  double mean_nnz = 0;
  double balance_ratio = 1;
  std::int64_t total_words = 0;  // sum of words sent
  std::int64_t max_words = 0;    // max over processes of sent + received
  std::int64_t max_a_words = 0;
  double predicted_W = 0;

  /// Sizes all per-process vectors for p processes, zeroed.
  void resize(int p);
  /// Recomputes the summary fields from the per-process vectors.
  void finalize();
  /// Adds another replay on the same number of processes (problems run one
  /// after another). Per-process counters are summed.
  void merge(const SimReport& other);

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row(const ProblemShape& shape) const;
};

// ---------------------------------------------------------------------------
// Cyclic assignment

/// dim_to_grid[d] names the grid dimension that splits tensor dimension d,
/// or -1 when the dimension is not distributed.
struct GridMap {
  std::vector<int> grid_dims;
  std::vector<int> dim_to_grid;
};

struct Assignment {
  std::vector<int> grid_dims;
  std::vector<std::int64_t> counts;              // elements per process
  std::vector<std::vector<std::int64_t>> owned;  // linear indices (sparse only)
};

namespace detail {
void check_grid_map(const GridMap& map, std::size_t order);
int owner_rank(const GridMap& map, std::span<const std::int64_t> idx);
std::vector<std::int64_t> dense_counts(const GridMap& map, const std::vector<std::int64_t>& dims);
}  // namespace detail

/// Element (i1, i2, ...) belongs to the process whose coordinate along grid
/// dimension g is i_d mod q_g for each mapped d. Dense tensors only report
/// counts; sparse tensors list their stored entries.
template <class T>
Assignment cyclic_assign(const Tensor<T>& t, const GridMap& map) {
  detail::check_grid_map(map, t.dims().size());
  Assignment as;
  as.grid_dims = map.grid_dims;
  if (!t.is_sparse()) {
    as.counts = detail::dense_counts(map, t.dims());
    return as;
  }
  int q = 1;
  for (int g : map.grid_dims) q *= g;
  as.counts.assign(static_cast<std::size_t>(q), 0);
  as.owned.resize(static_cast<std::size_t>(q));
  std::vector<std::int64_t> idx(t.dims().size());
  for (const auto& e : t.entries()) {
    t.unravel_into(e.index, idx);
    const int r = detail::owner_rank(map, idx);
    ++as.counts[r];
    as.owned[r].push_back(e.index);
  }
  return as;
}

SimReport balance_report(const Assignment& as);

// ---------------------------------------------------------------------------
// Index randomization

struct PermutationRecord {
  std::uint64_t seed = 0;
  std::map<std::int64_t, std::vector<std::int64_t>> perms;  // by dimension length

  std::vector<std::int64_t> inverse(std::int64_t length) const;
};

namespace detail {
template <class T>
void permute_tensor(Tensor<T>& t, const std::map<std::int64_t, std::vector<std::int64_t>>& perms) {
  std::vector<IndexValuePair<T>> moved;
  std::vector<std::int64_t> idx(t.dims().size()), dst(t.dims().size());
  auto place = [&](std::int64_t lin, const T& v) {
    t.unravel_into(lin, idx);
    for (std::size_t d = 0; d < idx.size(); ++d) dst[d] = perms.at(t.dims()[d])[idx[d]];
    const auto c = t.canonicalize(dst);
    if (c.forced_zero) return;
    moved.push_back({c.linear, c.negate ? t.structure().inv(v) : v});
  };
  t.for_each_stored(place);
  t.clear();
  t.set_entries(std::move(moved), false);
}
}  // namespace detail

/// Relabels every dimension through a seeded random permutation; dimensions of
/// equal length share one permutation so symmetric tensors stay symmetric.
template <class T>
PermutationRecord randomize_indices(Tensor<T>& t, std::uint64_t seed) {
  PermutationRecord rec;
  rec.seed = seed;
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> lengths(t.dims());
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  for (auto len : lengths) {
    std::vector<std::int64_t> p(static_cast<std::size_t>(len));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    rec.perms[len] = std::move(p);
  }
  detail::permute_tensor(t, rec.perms);
  return rec;
}

/// Undoes randomize_indices.
template <class T>
void restore_indices(Tensor<T>& t, const PermutationRecord& rec) {
  std::map<std::int64_t, std::vector<std::int64_t>> inv;
  for (const auto& [len, p] : rec.perms) inv[len] = rec.inverse(len);
  detail::permute_tensor(t, inv);
}

// ---------------------------------------------------------------------------
// SUMMA replay

/// Nonzero pattern of the folded sparse operand (m x k) in CSR form.
struct CsrPattern {
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::vector<std::int64_t> row_ptr;  // m + 1 entries
  std::vector<std::int64_t> col;
};

/// Words moved by the replicated SUMMA schedule on grid (p1,p2,p3): p1 splits
/// k, p2 splits m, p3 splits n. A is gathered along p3, B along p2 (ring
/// all-gathers) and partial C blocks are reduce-scattered along p1.
SimReport summa_traffic(const CsrPattern& a, std::int64_t n, const Grid& g);

/// Folded contraction C (m x n) = sum_k mul(A[i,k], B[k,j]).
template <class TC, class TS, class TD>
struct FoldedProblem {
  CsrPattern a;
  std::vector<TS> a_val;
  std::int64_t n = 0;
  std::vector<TD> b;             // k x n, row-major
  std::vector<char> b_present;   // empty when every element of b is present
  std::function<TC(const TS&, const TD&)> mul;
  const Structure<TC>* out = nullptr;
  KernelTag kernel = KernelTag::generic;  // SIMD fast path when mul is the structure's own
};

template <class TC>
struct FoldedResult {
  std::vector<TC> c;  // m x n
  std::vector<char> touched;
};

namespace detail {

template <class TC, class TS, class TD>
void local_block(const FoldedProblem<TC, TS, TD>& f, const Grid& g, int a, int b, int c, std::vector<TC>& out,
                 std::vector<char>& touched) {
  const std::int64_t n = f.n;
  std::vector<std::int64_t> cols;
  for (std::int64_t j = c; j < n; j += g.p3) cols.push_back(j);
  const std::size_t nc = cols.size();
  std::int64_t nrows = 0;
  for (std::int64_t i = b; i < f.a.m; i += g.p2) ++nrows;
  out.assign(static_cast<std::size_t>(nrows) * nc, f.out->zero());
  touched.assign(out.size(), 0);
  if (nc == 0) return;

  // This process's gathered B panel: rows k = a (mod p1), columns j = c (mod p3).
  std::vector<TD> panel;
  std::vector<char> panel_present;
  std::vector<std::int64_t> panel_row(static_cast<std::size_t>(f.a.k), -1);
  std::int64_t pr = 0;
  for (std::int64_t kk = a; kk < f.a.k; kk += g.p1) {
    panel_row[kk] = pr++;
    for (auto j : cols) {
      panel.push_back(f.b[kk * n + j]);
      panel_present.push_back(f.b_present.empty() ? 1 : f.b_present[kk * n + j]);
    }
  }
  const bool all_present = f.b_present.empty();

  std::int64_t li = 0;
  for (std::int64_t i = b; i < f.a.m; i += g.p2, ++li) {
    TC* crow = out.data() + li * nc;
    char* trow = touched.data() + li * nc;
    for (std::int64_t e = f.a.row_ptr[i]; e < f.a.row_ptr[i + 1]; ++e) {
      const std::int64_t kk = f.a.col[e];
      if (kk % g.p1 != a) continue;
      const std::size_t off = static_cast<std::size_t>(panel_row[kk]) * nc;
      const TS av = f.a_val[e];
      if constexpr (std::is_same_v<TC, double> && std::is_same_v<TS, double> && std::is_same_v<TD, double>) {
        if (f.kernel == KernelTag::real_ring && all_present) {
          kernels::axpy_f64(crow, panel.data() + off, av, nc);
          std::fill(trow, trow + nc, 1);
          continue;
        }
      }
      if constexpr (std::is_same_v<TC, std::int32_t> && std::is_same_v<TS, std::int32_t> &&
                    std::is_same_v<TD, std::int32_t>) {
        if (f.kernel == KernelTag::tropical_i32 && all_present) {
          kernels::minplus_i32(crow, panel.data() + off, av, f.out->add_id(), nc);
          std::fill(trow, trow + nc, 1);
          continue;
        }
      }
      for (std::size_t jj = 0; jj < nc; ++jj) {
        if (!panel_present[off + jj]) continue;
        const TC term = f.mul(av, panel[off + jj]);
        if (trow[jj]) {
          crow[jj] = f.out->add(crow[jj], term);
        } else {
          crow[jj] = term;
          trow[jj] = 1;
        }
      }
    }
  }
}

}  // namespace detail

/// Runs the block schedule: each virtual process multiplies its gathered
/// panels, then partial C blocks are combined over the k-split in ascending
/// layer order. Output is independent of the worker count.
template <class TC, class TS, class TD>
FoldedResult<TC> replay_summa(const FoldedProblem<TC, TS, TD>& f, const Grid& g, SimReport* report = nullptr) {
  if (!f.out || !f.mul) throw std::invalid_argument("folded problem lacks an output structure or multiply");
  const std::int64_t m = f.a.m, n = f.n;
  const int p = g.size();
  std::vector<std::vector<TC>> partial(static_cast<std::size_t>(p));
  std::vector<std::vector<char>> touched(static_cast<std::size_t>(p));
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t r) {
    const int a = static_cast<int>(r) / (g.p2 * g.p3);
    const int b = (static_cast<int>(r) / g.p3) % g.p2;
    const int c = static_cast<int>(r) % g.p3;
    detail::local_block(f, g, a, b, c, partial[r], touched[r]);
  });

  FoldedResult<TC> res;
  res.c.assign(static_cast<std::size_t>(m * n), f.out->zero());
  res.touched.assign(res.c.size(), 0);
  for (int a = 0; a < g.p1; ++a)
    for (int b = 0; b < g.p2; ++b)
      for (int c = 0; c < g.p3; ++c) {
        const auto r = static_cast<std::size_t>(g.rank(a, b, c));
        std::int64_t nc = 0;
        for (std::int64_t j = c; j < n; j += g.p3) ++nc;
        std::int64_t li = 0;
        for (std::int64_t i = b; i < m; i += g.p2, ++li) {
          std::int64_t lj = 0;
          for (std::int64_t j = c; j < n; j += g.p3, ++lj) {
            const std::size_t src = static_cast<std::size_t>(li * nc + lj);
            if (!touched[r][src]) continue;
            const std::size_t dst = static_cast<std::size_t>(i * n + j);
            if (res.touched[dst]) {
              res.c[dst] = f.out->add(res.c[dst], partial[r][src]);
            } else {
              res.c[dst] = partial[r][src];
              res.touched[dst] = 1;
            }
          }
        }
      }
  if (report) *report = summa_traffic(f.a, n, g);
  return res;
}

}  // namespace sta
