#include "sta/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>

#include "sta/apps.hpp"
#include "sta/kernels.hpp"
#include "sta/planned.hpp"
#include "sta/workers.hpp"

namespace sta {

namespace {

struct Timing {
  double median = 0, min = 0, max = 0;
};

Timing time_reps(int reps, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int r = 0; r < std::max(reps, 1); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  const std::size_t h = t.size() / 2;
  const double med = t.size() % 2 ? t[h] : 0.5 * (t[h - 1] + t[h]);
  return {med, t.front(), t.back()};
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double scale = 0, diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return scale > 0 ? diff / scale : diff;
}

nlohmann::json plan_summary(const std::vector<ContractionPlan>& plans) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : plans) arr.push_back(to_json(p));
  return arr;
}

nlohmann::json word_summary(const std::vector<SimReport>& reps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reps)
    arr.push_back({{"grid", to_json(r.grid)},
                   {"max_words", r.max_words},
                   {"max_a_words", r.max_a_words},
                   {"total_words", r.total_words},
                   {"predicted_W", r.predicted_W},
                   {"balance_ratio", r.balance_ratio}});
  return arr;
}

SimReport merged(const std::vector<SimReport>& reps, int p) {
  SimReport total;
  total.resize(p);
  for (const auto& r : reps) total.merge(r);
  total.finalize();
  if (!reps.empty()) total.grid = reps.front().grid;
  return total;
}

}  // namespace

std::vector<std::uint64_t> seed_list(const BenchConfig& cfg) {
  if (cfg.seeds < 1) throw std::invalid_argument("at least one seed is required");
  std::vector<std::uint64_t> s;
  for (int i = 0; i < cfg.seeds; ++i) s.push_back(cfg.seed + static_cast<std::uint64_t>(i));
  return s;
}

BenchRun run_spmm(const BenchConfig& cfg, std::uint64_t seed) {
  const std::int64_t n = cfg.n, k = cfg.k > 0 ? cfg.k : std::max<std::int64_t>(1, cfg.n / 8);
  const auto ring = standard_ring();
  const VirtualWorld world(cfg.procs, seed);
  Tensor<double> A({n, n}, ring, Storage::sparse, {}, &world);
  A.fill_random(cfg.density, seed, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(-1, 1)(g); });
  Tensor<double> B({n, k}, ring, Storage::dense, {}, &world);
  B.fill_random(1.0, seed + 7919, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(-1, 1)(g); });
  Tensor<double> C({n, k}, ring, Storage::dense, {}, &world);

  BenchRun run;
  run.seed = seed;
  run.nnz = A.nnz();
  const auto expr = contraction(C["ij"], A["il"], B["lj"]);
  ContractionPlan plan;
  const Timing t = time_reps(cfg.reps, [&] { run.report = execute_auto(expr, world, {}, cfg.memory, &plan); });
  run.median_s = t.median;
  run.min_s = t.min;
  run.max_s = t.max;

  if (cfg.verify && n <= 512) {
    Tensor<double> ref({n, k}, ring);
    contract(ref["ij"], A["il"], B["lj"]);
    const double err = max_rel_diff(C.dense_data(), ref.dense_data());
    if (err > 1e-12) throw std::runtime_error("spmm result differs from the reference by " + std::to_string(err));
    run.verified = true;
  }
  run.detail = {{"k", k}, {"plan", to_json(plan)}, {"isa", std::string(kernels::to_string(kernels::active_isa()))}};
  return run;
}

BenchRun run_mp3(const BenchConfig& cfg, std::uint64_t seed) {
  const VirtualWorld world(cfg.procs, seed);
  const MP3Inputs sparse = make_mp3_inputs(cfg.m, cfg.n, cfg.density, seed, Storage::sparse);
  BenchRun run;
  run.seed = seed;
  run.nnz = sparse.Vabij.nnz() + sparse.Vijab.nnz() + sparse.Vabcd.nnz() + sparse.Vijkl.nnz() + sparse.Vaibj.nnz();

  Executor ex = Executor::planned(world, {}, cfg.memory);
  double energy = 0;
  const Timing t = time_reps(cfg.reps, [&] {
    ex.clear_reports();
    energy = mp3_energy(sparse, &ex);
  });
  run.median_s = t.median;
  run.min_s = t.min;
  run.max_s = t.max;
  run.report = merged(ex.reports(), cfg.procs);

  nlohmann::json detail = {{"energy", energy}, {"contractions", word_summary(ex.reports())}};
  if (cfg.verify) {
    const double dense_energy = mp3_energy(with_v_storage(sparse, Storage::dense));
    const double rel = std::abs(energy - dense_energy) / std::max(std::abs(dense_energy), 1e-300);
    if (rel > 1e-10 && std::abs(energy - dense_energy) > 1e-300)
      throw std::runtime_error("mp3 sparse and dense energies differ by " + std::to_string(rel));
    detail["dense_energy"] = dense_energy;
    run.verified = true;
  }
  run.detail = detail;
  return run;
}

BenchRun run_apsp(const BenchConfig& cfg, std::uint64_t seed) {
  const std::int64_t n = cfg.n;
  const VirtualWorld world(cfg.procs, seed);
  const auto wmax = static_cast<std::int32_t>(std::min<std::int64_t>(n * n, 1 << 20));
  const Tensor<std::int32_t> A = random_digraph(n, cfg.density, 1, wmax, seed);
  BenchRun run;
  run.seed = seed;
  run.nnz = 0;
  for (auto v : A.dense_data()) run.nnz += v != A.structure().add_id();

  Executor tiskin_ex = Executor::planned(world, {}, cfg.memory);
  Executor dense_ex = Executor::planned(world, {}, cfg.memory);
  TiskinResult tiskin{Tensor<std::int32_t>({n, n}, A.structure()), {}};
  const Timing t = time_reps(cfg.reps, [&] {
    tiskin_ex.clear_reports();
    tiskin = apsp_tiskin(A, &tiskin_ex);
  });
  const Tensor<std::int32_t> doubled = apsp_dense_doubling(A, &dense_ex);
  run.median_s = t.median;
  run.min_s = t.min;
  run.max_s = t.max;
  run.report = merged(tiskin_ex.reports(), cfg.procs);

  auto same = [](const Tensor<std::int32_t>& x, const Tensor<std::int32_t>& y) {
    return std::equal(x.dense_data().begin(), x.dense_data().end(), y.dense_data().begin());
  };
  if (!same(tiskin.dist, doubled)) throw std::runtime_error("tiskin and dense path doubling disagree");
  if (cfg.verify && n <= 64) {
    if (!same(tiskin.dist, floyd_warshall_oracle(A))) throw std::runtime_error("apsp differs from Floyd-Warshall");
    run.verified = true;
  }
  run.detail = {{"pl_nnz", tiskin.pl_nnz},
                {"tiskin_words", word_summary(tiskin_ex.reports())},
                {"dense_doubling_words", word_summary(dense_ex.reports())}};
  return run;
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.n < 1 || cfg.m < 1 || cfg.procs < 1) throw std::invalid_argument("dimensions and procs must be positive");
  if (!(cfg.density > 0 && cfg.density <= 1)) throw std::invalid_argument("density must lie in (0, 1]");
  const auto seeds = seed_list(cfg);
  BenchReport rep;
  rep.config = cfg;
  for (auto s : seeds) {
    if (cfg.bench == "spmm") rep.runs.push_back(run_spmm(cfg, s));
    else if (cfg.bench == "mp3") rep.runs.push_back(run_mp3(cfg, s));
    else if (cfg.bench == "apsp") rep.runs.push_back(run_apsp(cfg, s));
    else throw std::invalid_argument("unknown benchmark '" + cfg.bench + "'");
  }
  return rep;
}

nlohmann::json to_json(const BenchReport& r) {
  const auto& c = r.config;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"seed", run.seed},
                    {"median_s", run.median_s},
                    {"min_s", run.min_s},
                    {"max_s", run.max_s},
                    {"verified", run.verified},
                    {"nnz", run.nnz},
                    {"sim", run.report.to_json()},
                    {"detail", run.detail}});
  return {{"config",
           {{"bench", c.bench},
            {"n", c.n},
            {"k", c.k},
            {"m", c.m},
            {"density", c.density},
            {"procs", c.procs},
            {"memory", std::isinf(c.memory) ? nlohmann::json(nullptr) : nlohmann::json(c.memory)},
            {"seed", c.seed},
            {"seeds", c.seeds},
            {"reps", c.reps},
            {"verify", c.verify},
            {"workers", worker_count()}}},
          {"runs", runs}};
}

std::string csv_header() {
  return "bench,n,k,m,density,procs,seed,nnz,p1,p2,p3,predicted_W,max_words,total_words,balance_ratio,"
         "median_s,min_s,max_s,verified";
}

void write_csv(const BenchReport& r, std::ostream& os) {
  const auto& c = r.config;
  os << csv_header() << '\n';
  for (const auto& run : r.runs) {
    const auto& s = run.report;
    os << c.bench << ',' << c.n << ',' << c.k << ',' << c.m << ',' << c.density << ',' << c.procs << ',' << run.seed
       << ',' << run.nnz << ',' << s.grid.p1 << ',' << s.grid.p2 << ',' << s.grid.p3 << ',' << s.predicted_W << ','
       << s.max_words << ',' << s.total_words << ',' << s.balance_ratio << ',' << run.median_s << ',' << run.min_s
       << ',' << run.max_s << ',' << (run.verified ? 1 : 0) << '\n';
  }
}

void emit_report(const BenchReport& r, const std::string& format, const std::string& path) {
  if (format != "json" && format != "csv") throw std::invalid_argument("unknown report format '" + format + "'");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  if (format == "json") os << to_json(r).dump(2) << '\n';
  else write_csv(r, os);
}

}  // namespace sta
