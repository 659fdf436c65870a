#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sta {

/// Three-dimensional virtual processor grid. In a contraction C = A*B with A
/// of size m x k, p1 splits k, p2 splits m and p3 splits n; A is replicated
/// over p3, B over p2 and C over p1.
struct Grid {
  int p1 = 1;
  int p2 = 1;
  int p3 = 1;

  int size() const { return p1 * p2 * p3; }
  int rank(int a, int b, int c) const { return (a * p2 + b) * p3 + c; }
  int dimensionality() const { return (p1 > 1) + (p2 > 1) + (p3 > 1); }
  std::string str() const {
    return "(" + std::to_string(p1) + "," + std::to_string(p2) + "," + std::to_string(p3) + ")";
  }
  friend bool operator==(const Grid&, const Grid&) = default;
  friend auto operator<=>(const Grid&, const Grid&) = default;
};

/// A set of simulated processes. Tensors may refer to one; nothing is
/// physically distributed.
struct VirtualWorld {
  int p = 1;
  Grid grid{};
  std::uint64_t seed = 0;

  VirtualWorld() = default;
  explicit VirtualWorld(int procs, std::uint64_t seed_ = 0) : p(procs), grid{1, 1, procs}, seed(seed_) {
    if (procs < 1) throw std::invalid_argument("a world needs at least one process");
  }
};

}  // namespace sta
