#include "sta/apps.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sta {

namespace {

template <class T>
std::vector<T> all_values(const Tensor<T>& t) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(t.size()));
  for (std::int64_t i = 0; i < t.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return t.read(idx);
}

template <class T>
bool same_values(const Tensor<T>& a, const Tensor<T>& b) {
  const auto x = all_values(a), y = all_values(b);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!a.structure().equal(x[i], y[i])) return false;
  return true;
}

std::int64_t square_dim(const Tensor<std::int32_t>& A) {
  if (A.order() != 2 || A.dims()[0] != A.dims()[1]) throw std::invalid_argument("adjacency matrix must be square");
  return A.dims()[0];
}

}  // namespace

JacobiResult jacobi(const Tensor<double>& A_in, const Tensor<double>& b_in, double tol, int max_iter, Executor* ex) {
  if (A_in.order() != 2 || b_in.order() != 1 || A_in.dims()[0] != A_in.dims()[1] || A_in.dims()[0] != b_in.dims()[0])
    throw std::invalid_argument("jacobi needs a square matrix and a matching vector");
  Executor local = Executor::reference();
  Executor& run = ex ? *ex : local;
  const std::int64_t n = b_in.dims()[0];
  const auto ring = standard_ring();
  Tensor<double> A = A_in, b = b_in;
  Tensor<double> x({n}, ring), d({n}, ring), r({n}, ring);
  Tensor<double> R({n, n}, ring, Storage::sparse);

  assign(d["i"], A["ii"]);
  for (double v : all_values(d))
    if (v == 0.0) throw std::invalid_argument("jacobi needs a nonzero diagonal");
  apply_transform(Transform<double>([](double& v) { v = 1.0 / v; }), d["i"]);
  assign(R["ij"], A["ij"]);
  fill(R["ii"], 0.0);

  JacobiResult res{x, 0, {}};
  while (true) {
    if (res.iterations == max_iter) throw std::runtime_error("jacobi did not converge");
    ++res.iterations;
    run.contract(x["i"], R["ij"], x["j"], {-1.0, false});
    run.assign(x["i"], b["i"], {std::nullopt, true});
    run.contract(x["i"], x["i"], d["i"]);

    run.assign(r["i"], b["i"]);
    run.contract(r["i"], A["ij"], x["j"], {-1.0, true});
    const double rn = r.norm2();
    res.residuals.push_back(rn);
    if (rn <= tol) break;
  }
  res.x = x;
  return res;
}

bool bellman_ford(const Tensor<std::int32_t>& A_in, Tensor<std::int32_t>& P, int n, Executor* ex,
                  std::vector<std::vector<std::int32_t>>* history) {
  Executor local = Executor::reference();
  Executor& run = ex ? *ex : local;
  Tensor<std::int32_t> A = A_in;
  Tensor<std::int32_t> Q = P;
  int r = 0;
  do {
    if (r == n) return false;
    ++r;
    Q = P;
    run.contract(P["i"], A["ij"], P["j"], {std::nullopt, true});
    if (history) history->push_back(all_values(P));
  } while (!same_values(P, Q));
  return true;
}

Tensor<std::int32_t> apsp_dense_doubling(const Tensor<std::int32_t>& A_in, Executor* ex) {
  Executor local = Executor::reference();
  Executor& run = ex ? *ex : local;
  const std::int64_t n = square_dim(A_in);
  Tensor<std::int32_t> A = A_in;
  for (std::int64_t l = 1; l < n; l <<= 1) run.contract(A["ij"], A["ik"], A["kj"], {std::nullopt, true});
  return A;
}

TiskinResult apsp_tiskin(const Tensor<std::int32_t>& A_in, Executor* ex) {
  Executor local = Executor::reference();
  Executor& run = ex ? *ex : local;
  const std::int64_t n = square_dim(A_in);
  const auto ps = path_semiring();
  Tensor<std::int32_t> A = A_in;
  Tensor<PathElement> P({n, n}, ps);
  apply_function(P["ij"], A["ij"], Function<PathElement, std::int32_t>([](const std::int32_t& w) {
                   return PathElement{w, 1};
                 }));

  TiskinResult res{Tensor<std::int32_t>({n, n}, A_in.structure()), {}};
  for (std::int64_t l = 1; l < n; l <<= 1) {
    Tensor<PathElement> Pl({n, n}, ps, Storage::sparse);
    assign(Pl["ij"], P["ij"]);
    const auto hops = static_cast<std::int32_t>(l);
    Pl.sparsify([hops](const PathElement& p) { return p.h == hops; });
    res.pl_nnz.push_back(Pl.nnz());
    run.contract(P["ij"], Pl["ik"], P["kj"], {std::nullopt, true});
  }
  apply_function(res.dist["ij"], P["ij"],
                 Function<std::int32_t, PathElement>([](const PathElement& p) { return p.w; }));
  return res;
}

Tensor<std::int32_t> floyd_warshall_oracle(const Tensor<std::int32_t>& A) {
  const std::int64_t n = square_dim(A);
  const std::int32_t inf = A.structure().add_id();
  std::vector<std::int32_t> D = all_values(A);
  for (std::int64_t k = 0; k < n; ++k)
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int32_t dik = D[i * n + k];
      if (dik == inf) continue;
      for (std::int64_t j = 0; j < n; ++j) {
        const std::int32_t dkj = D[k * n + j];
        if (dkj == inf) continue;
        D[i * n + j] = std::min(D[i * n + j], dik + dkj);
      }
    }
  Tensor<std::int32_t> out({n, n}, A.structure());
  std::vector<IndexValuePair<std::int32_t>> e;
  for (std::int64_t i = 0; i < n * n; ++i) e.push_back({i, D[i]});
  out.write(e);
  return out;
}

Tensor<std::int32_t> random_digraph(std::int64_t n, double density, std::int32_t wmin, std::int32_t wmax,
                                    std::uint64_t seed, Storage storage) {
  Tensor<std::int32_t> A({n, n}, tropical_semiring(), storage);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(density);
  std::uniform_int_distribution<std::int32_t> weight(wmin, wmax);
  std::vector<IndexValuePair<std::int32_t>> e;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      if (i == j) {
        e.push_back({i * n + j, 0});
      } else if (edge(rng)) {
        e.push_back({i * n + j, weight(rng)});
      }
    }
  A.write(e);
  return A;
}

MP3Inputs make_mp3_inputs(std::int64_t m, std::int64_t n, double density, std::uint64_t seed, Storage v_storage) {
  const auto ring = standard_ring();
  auto uniform = [](double lo, double hi) {
    return [lo, hi](std::mt19937_64& g) { return std::uniform_real_distribution<double>(lo, hi)(g); };
  };
  auto dense = [&](std::vector<std::int64_t> dims, double lo, double hi, std::uint64_t s) {
    Tensor<double> t(std::move(dims), ring);
    t.fill_random(1.0, s, uniform(lo, hi));
    return t;
  };
  auto two_electron = [&](std::vector<std::int64_t> dims, std::uint64_t s) {
    Tensor<double> t(std::move(dims), ring, Storage::sparse);
    t.fill_random(density, s, uniform(-1.0, 1.0));
    return v_storage == Storage::sparse ? t : with_storage(t, Storage::dense);
  };
  return MP3Inputs{
      dense({m}, -1.0, 0.0, seed * 16 + 1),
      dense({n}, 1.0, 2.0, seed * 16 + 2),
      dense({n, n}, -0.1, 0.1, seed * 16 + 3),
      dense({m, m}, -0.1, 0.1, seed * 16 + 4),
      two_electron({n, n, m, m}, seed * 16 + 5),
      two_electron({m, m, n, n}, seed * 16 + 6),
      two_electron({n, n, n, n}, seed * 16 + 7),
      two_electron({m, m, m, m}, seed * 16 + 8),
      two_electron({n, m, n, m}, seed * 16 + 9),
  };
}

MP3Inputs with_v_storage(const MP3Inputs& in, Storage s) {
  return MP3Inputs{in.Ei,
                   in.Ea,
                   in.Fab,
                   in.Fij,
                   with_storage(in.Vabij, s),
                   with_storage(in.Vijab, s),
                   with_storage(in.Vabcd, s),
                   with_storage(in.Vijkl, s),
                   with_storage(in.Vaibj, s)};
}

double mp3_energy(const MP3Inputs& in_c, Executor* ex) {
  Executor local = Executor::reference();
  Executor& run = ex ? *ex : local;
  MP3Inputs in = in_c;
  const auto ring = standard_ring();
  const auto& lens = in.Vabij.dims();

  // D_abij = 1 / (-e_a - e_b + e_i + e_j)
  Tensor<double> D(lens, ring);
  run.assign(D["abij"], in.Ei["i"], {std::nullopt, true});
  run.assign(D["abij"], in.Ei["j"], {std::nullopt, true});
  run.assign(D["abij"], in.Ea["a"], {-1.0, true});
  run.assign(D["abij"], in.Ea["b"], {-1.0, true});
  for (double v : D.dense_data())
    if (v == 0.0) throw std::domain_error("zero MP3 denominator");
  apply_transform(Transform<double>([](double& v) { v = 1.0 / v; }), D["abij"]);

  Tensor<double> T(lens, ring);
  run.contract(T["abij"], in.Vabij["abij"], D["abij"]);

  Tensor<double> Z(lens, ring);
  run.assign(Z["abij"], in.Vijab["ijab"]);
  run.contract(Z["abij"], in.Fab["af"], T["fbij"], {std::nullopt, true});
  run.contract(Z["abij"], in.Fij["ni"], T["abnj"], {-1.0, true});
  run.contract(Z["abij"], in.Vabcd["abef"], T["efij"], {0.5, true});
  run.contract(Z["abij"], in.Vijkl["mnij"], T["abmn"], {0.5, true});
  run.contract(Z["abij"], in.Vaibj["amei"], T["ebmj"], {-1.0, true});

  run.contract(T["abij"], Z["abij"], D["abij"], {std::nullopt, true});

  Tensor<double> E({}, ring);
  run.contract(E[""], T["abij"], in.Vabij["abij"]);
  return E.value();
}

}  // namespace sta
