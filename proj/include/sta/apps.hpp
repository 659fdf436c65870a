#pragma once

// Applications written against the public tensor interface: Jacobi iteration,
// tropical shortest paths, and the MP3 energy correction.

#include <cstdint>
#include <vector>

#include "sta/planned.hpp"
#include "sta/tensor.hpp"

namespace sta {

struct JacobiResult {
  Tensor<double> x;
  int iterations = 0;
  std::vector<double> residuals;  // ||b - A x||_2 after each sweep
};

/// Solves A x = b by Jacobi sweeps until the residual 2-norm is at most tol.
/// Throws std::invalid_argument for a zero diagonal entry and
/// std::runtime_error when max_iter sweeps do not converge.
JacobiResult jacobi(const Tensor<double>& A, const Tensor<double>& b, double tol = 1e-6, int max_iter = 10000,
                    Executor* ex = nullptr);

/// Single-source shortest paths by repeated min-plus relaxation P += A P.
/// A(i,j) is the weight of edge j -> i with a zero diagonal. Returns false if
/// P is still changing after n rounds (a negative cycle). When `history` is
/// given, P is appended after every round.
bool bellman_ford(const Tensor<std::int32_t>& A, Tensor<std::int32_t>& P, int n, Executor* ex = nullptr,
                  std::vector<std::vector<std::int32_t>>* history = nullptr);

/// (I + A)^n by repeated squaring A += A A.
Tensor<std::int32_t> apsp_dense_doubling(const Tensor<std::int32_t>& A, Executor* ex = nullptr);

struct TiskinResult {
  Tensor<std::int32_t> dist;
  std::vector<std::int64_t> pl_nnz;  // entries of the l-hop matrix per round
};

/// Path doubling that multiplies only by the shortest paths of exactly l hops.
TiskinResult apsp_tiskin(const Tensor<std::int32_t>& A, Executor* ex = nullptr);

/// Textbook triple loop; used as an oracle.
Tensor<std::int32_t> floyd_warshall_oracle(const Tensor<std::int32_t>& A);

struct MP3Inputs {
  Tensor<double> Ei, Ea;    // occupied (m) and virtual (n) orbital energies
  Tensor<double> Fab, Fij;  // n x n, m x m
  Tensor<double> Vabij;     // n n m m
  Tensor<double> Vijab;     // m m n n
  Tensor<double> Vabcd;     // n n n n
  Tensor<double> Vijkl;     // m m m m
  Tensor<double> Vaibj;     // n m n m
};

/// Seeded synthetic system: occupied energies in [-1,0], virtual energies in
/// [1,2], Fock blocks dense in [-0.1,0.1], two-electron blocks with the given
/// nonzero density and values in [-1,1].
MP3Inputs make_mp3_inputs(std::int64_t m, std::int64_t n, double density, std::uint64_t seed,
                          Storage v_storage = Storage::sparse);

/// Same logical values with every two-electron block stored as requested.
MP3Inputs with_v_storage(const MP3Inputs& in, Storage s);

/// Third-order energy correction. Throws std::domain_error on a zero
/// denominator.
double mp3_energy(const MP3Inputs& in, Executor* ex = nullptr);

/// Random digraph in the adjacency convention above: each off-diagonal edge
/// present with probability `density`, weights uniform in [wmin, wmax].
Tensor<std::int32_t> random_digraph(std::int64_t n, double density, std::int32_t wmin, std::int32_t wmax,
                                    std::uint64_t seed, Storage storage = Storage::dense);

}  // namespace sta
