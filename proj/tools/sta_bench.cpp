// sta_bench: runs one benchmark configuration and writes a JSON or CSV report.
//
//   sta_bench --bench spmm --n 1024 --density 0.01 --procs 16 --out spmm.json
//
// STA_WORKERS sets the number of worker threads used for virtual processes.

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "sta/bench.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse tensor algebra benchmarks on simulated processor grids"};
  sta::BenchConfig cfg;
  std::string verify = "on";
  std::string out;
  std::string format = "json";
  double memory = -1;

  app.add_option("--bench", cfg.bench, "Benchmark")->check(CLI::IsMember({"spmm", "mp3", "apsp"}))->required();
  app.add_option("--n", cfg.n, "Matrix dimension (spmm, apsp) or virtual orbitals (mp3)")->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k, "Dense operand columns for spmm (default n/8)")->check(CLI::NonNegativeNumber);
  app.add_option("--m", cfg.m, "Occupied orbitals for mp3")->check(CLI::PositiveNumber);
  app.add_option("--density", cfg.density, "Nonzero fraction of the sparse operand")->check(CLI::Range(0.0, 1.0));
  app.add_option("--procs", cfg.procs, "Virtual process count")->check(CLI::PositiveNumber);
  app.add_option("--memory", memory, "Per-process memory in elements (default unlimited)");
  app.add_option("--seed", cfg.seed, "First seed");
  app.add_option("--seeds", cfg.seeds, "Number of seeds");
  app.add_option("--reps", cfg.reps, "Timed repetitions per seed (median reported)")->check(CLI::PositiveNumber);
  app.add_option("--verify", verify, "Check results against an oracle")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--out", out, "Report path (stdout when omitted)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  CLI11_PARSE(app, argc, argv);

  cfg.verify = verify == "on";
  cfg.memory = memory > 0 ? memory : std::numeric_limits<double>::infinity();
  try {
    const sta::BenchReport rep = sta::run_bench(cfg);
    if (out.empty()) {
      if (format == "json") std::cout << sta::to_json(rep).dump(2) << '\n';
      else sta::write_csv(rep, std::cout);
    } else {
      sta::emit_report(rep, format, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "sta_bench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
