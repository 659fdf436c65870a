#include "sta/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace sta {

std::vector<Grid> enumerate_grids(int p) {
  if (p < 1) throw std::invalid_argument("process count must be positive");
  std::vector<Grid> grids;
  for (int p1 = 1; p1 <= p; ++p1) {
    if (p % p1) continue;
    for (int p2 = 1; p2 <= p / p1; ++p2) {
      if ((p / p1) % p2) continue;
      grids.push_back({p1, p2, p / (p1 * p2)});
    }
  }
  return grids;
}

namespace {

double sum_3d(const ProblemShape& s, const Grid& g) {
  const double kn = double(s.k) * double(s.n), mn = double(s.m) * double(s.n);
  return s.z / (g.p1 * g.p2) + kn / (g.p1 * g.p3) + mn / (g.p2 * g.p3);
}

bool fits(const ProblemShape& s, const Grid& g, double h) {
  if (std::isinf(s.memory)) return true;
  const double kn = double(s.k) * double(s.n), mn = double(s.m) * double(s.n);
  const double need = std::min({h * s.z / (g.p1 * g.p2), kn / (g.p1 * g.p3), mn / (g.p2 * g.p3)});
  return s.memory >= need;
}

void check_shape(const ProblemShape& s) {
  if (s.m < 1 || s.k < 1 || s.n < 1 || s.p < 1 || s.batch < 1)
    throw std::invalid_argument("problem dimensions and process count must be positive");
  if (s.z < 0 || s.z > double(s.m) * double(s.k)) throw std::invalid_argument("z must lie in [0, m*k]");
}

}  // namespace

double grid_words(const ProblemShape& s, const Grid& g) {
  const double kn = double(s.k) * double(s.n), mn = double(s.m) * double(s.n);
  double w = 0;
  if (g.p3 > 1) w += s.z / (g.p1 * g.p2);
  if (g.p2 > 1) w += kn / (g.p1 * g.p3);
  if (g.p1 > 1) w += mn / (g.p2 * g.p3);
  return w;
}

CostRecord predict_costs(const ProblemShape& s, const Grid& g, const PlannerConfig& cfg) {
  check_shape(s);
  if (g.size() != s.p) throw std::invalid_argument("grid " + g.str() + " does not multiply to p");
  const double b = double(s.batch);
  const double kn = double(s.k) * double(s.n), mn = double(s.m) * double(s.n);
  CostRecord r;
  r.grid = g;
  r.F = cfg.c_flops * b * double(s.n) * s.z / s.p;
  r.W_redist = cfg.charge_redistribution ? cfg.c_redist * b * (s.z + kn + mn) / s.p : 0.0;
  r.W_1D = cfg.c_grid * b * std::min({s.z, kn, mn});
  double best2 = std::numeric_limits<double>::infinity();
  for (int p1 = 1; p1 <= s.p; ++p1) {
    if (s.p % p1) continue;
    const int p2 = s.p / p1;
    best2 = std::min({best2, s.z / p1 + kn / p2, s.z / p1 + mn / p2, kn / p1 + mn / p2});
  }
  r.W_2D = cfg.c_grid * b * best2;
  r.W_3D = cfg.c_grid * b * sum_3d(s, g);
  r.W_grid = cfg.c_grid * b * grid_words(s, g);
  r.feasible = fits(s, g, cfg.h);
  return r;
}

ContractionPlan make_plan(const ProblemShape& s, const Grid& g, const PlannerConfig& cfg) {
  ContractionPlan plan;
  plan.shape = s;
  plan.grid = g;
  plan.costs = predict_costs(s, g, cfg);
  plan.W_total = plan.costs.W_redist + plan.costs.W_grid;
  double simplified = std::numeric_limits<double>::infinity();
  for (const Grid& h : enumerate_grids(s.p))
    if (fits(s, h, cfg.h)) simplified = std::min(simplified, cfg.c_grid * double(s.batch) * sum_3d(s, h));
  plan.W_simplified = simplified;
  plan.lower_bound = lower_bound(s);
  return plan;
}

ContractionPlan choose_plan(const ProblemShape& s, const PlannerConfig& cfg) {
  check_shape(s);
  const Grid* best = nullptr;
  std::tuple<double, double> best_key{};
  const auto grids = enumerate_grids(s.p);
  for (const Grid& g : grids) {
    if (!fits(s, g, cfg.h)) continue;
    const std::tuple<double, double> key{grid_words(s, g), sum_3d(s, g)};
    // Grids arrive in lexicographic order, so strict comparison keeps the
    // smallest among ties.
    if (!best || key < best_key) {
      best = &g;
      best_key = key;
    }
  }
  if (!best) throw std::runtime_error("no processor grid satisfies the memory limit");
  return make_plan(s, *best, cfg);
}

LowerBoundInput lower_bound_input(const ProblemShape& s) {
  LowerBoundInput in{};
  in.z1 = std::max(1.0, std::min(double(s.m), std::sqrt(s.z)));
  in.z2 = std::max(1.0, std::min(double(s.k), s.z / in.z1));
  double r[3] = {double(s.n), in.z1, in.z2};
  std::sort(r, r + 3);
  in.r1 = r[0];
  in.r2 = r[1];
  in.r3 = r[2];
  return in;
}

double lower_bound(const ProblemShape& s) {
  const LowerBoundInput in = lower_bound_input(s);
  const double p = s.p;
  const double vol = in.r1 * in.r2 * in.r3;
  double w;
  if (p > in.r2 * in.r3 / (in.r1 * in.r1)) {
    const double mem_term = std::isinf(s.memory) ? 0.0 : vol / (p * std::sqrt(s.memory));
    w = mem_term + std::pow(vol / p, 2.0 / 3.0);
  } else if (p > in.r3 / in.r2) {
    w = in.r1 * std::sqrt(in.r2 * in.r3 / p);
  } else {
    w = in.r1 * in.r2;
  }
  return w * double(s.batch);
}

nlohmann::json to_json(const Grid& g) { return nlohmann::json::array({g.p1, g.p2, g.p3}); }

nlohmann::json to_json(const ContractionPlan& plan) {
  const auto& c = plan.costs;
  return {
      {"grid", to_json(plan.grid)},
      {"F", c.F},
      {"W_redist", c.W_redist},
      {"W_1D", c.W_1D},
      {"W_2D", c.W_2D},
      {"W_3D", c.W_3D},
      {"W_grid", c.W_grid},
      {"W_total", plan.W_total},
      {"W_simplified", plan.W_simplified},
      {"feasible", c.feasible},
      {"lower_bound", plan.lower_bound},
      {"shape",
       {{"m", plan.shape.m},
        {"k", plan.shape.k},
        {"n", plan.shape.n},
        {"z", plan.shape.z},
        {"p", plan.shape.p},
        {"batch", plan.shape.batch},
        {"memory", std::isinf(plan.shape.memory) ? nlohmann::json(nullptr) : nlohmann::json(plan.shape.memory)}}},
  };
}

}  // namespace sta
