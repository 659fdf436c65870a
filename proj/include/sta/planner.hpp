#pragma once

// Communication cost model for a contraction folded to C (m x n) = A (m x k,
// z nonzeros) * B (k x n), and selection of a virtual processor grid.

#include <cstdint>
#include <limits>
#include <vector>

#include "json.hpp"
#include "sta/world.hpp"

namespace sta {

struct ProblemShape {
  std::int64_t m = 1;
  std::int64_t k = 1;
  std::int64_t n = 1;
  double z = 1;  // nonzeros of A
  int p = 1;
  double memory = std::numeric_limits<double>::infinity();  // elements per process
  std::int64_t batch = 1;  // independent problems solved one after another
};

struct PlannerConfig {
  double h = 2.0;  // imbalance allowance on A's per-process share
  bool charge_redistribution = true;
  // Tunable prefactors for each cost term.
  double c_flops = 1.0;
  double c_redist = 1.0;
  double c_grid = 1.0;
};

struct CostRecord {
  Grid grid;
  double F = 0;
  double W_redist = 0;
  double W_1D = 0;  // min(z, kn, mn), independent of the grid
  double W_2D = 0;  // best two-dimensional SUMMA variant over p1*p2 = p
  double W_3D = 0;  // z/(p1p2) + kn/(p1p3) + mn/(p2p3) at this grid
  double W_grid = 0;  // words moved by the schedule actually run on this grid
  bool feasible = true;
};

struct LowerBoundInput {
  double z1, z2;
  double r1, r2, r3;
};

struct ContractionPlan {
  ProblemShape shape;
  Grid grid;
  CostRecord costs;
  double W_total = 0;       // W_redist + W_grid at the chosen grid
  double W_simplified = 0;  // min over feasible grids of the W_3D sum
  double lower_bound = 0;
};

/// All ordered (p1,p2,p3) with product p, lexicographically ascending.
std::vector<Grid> enumerate_grids(int p);

/// Per-grid cost of the replicated SUMMA schedule: a term is paid only along
/// grid dimensions larger than one.
double grid_words(const ProblemShape& s, const Grid& g);

CostRecord predict_costs(const ProblemShape& s, const Grid& g, const PlannerConfig& cfg = {});

/// Cheapest feasible grid. Ties on W_grid are broken by the W_3D sum and then
/// lexicographically. Throws std::runtime_error when no grid fits in memory.
ContractionPlan choose_plan(const ProblemShape& s, const PlannerConfig& cfg = {});

/// Plan for a caller-chosen grid. Throws std::invalid_argument if the grid
/// does not multiply to p.
ContractionPlan make_plan(const ProblemShape& s, const Grid& g, const PlannerConfig& cfg = {});

LowerBoundInput lower_bound_input(const ProblemShape& s);
double lower_bound(const ProblemShape& s);

nlohmann::json to_json(const ContractionPlan& plan);
nlohmann::json to_json(const Grid& g);

}  // namespace sta
