#pragma once

// Desk-scale benchmark drivers behind the sta_bench tool.

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sta/simgrid.hpp"

namespace sta {

struct BenchConfig {
  std::string bench = "spmm";  // spmm | mp3 | apsp
  std::int64_t n = 256;
  std::int64_t k = 0;  // spmm: columns of the dense operand; 0 means n / 8
  std::int64_t m = 4;  // mp3: occupied orbitals
  double density = 0.01;
  int procs = 4;
  double memory = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  int seeds = 1;
  int reps = 10;
  bool verify = true;
};

struct BenchRun {
  std::uint64_t seed = 0;
  double median_s = 0, min_s = 0, max_s = 0;
  bool verified = false;  // an oracle comparison ran and passed
  std::int64_t nnz = 0;
  SimReport report;       // merged over the run's planned contractions
  nlohmann::json detail;  // benchmark-specific fields
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRun> runs;
};

/// Seeds seed, seed+1, ..., one per configured seed. Throws when empty.
std::vector<std::uint64_t> seed_list(const BenchConfig& cfg);

BenchRun run_spmm(const BenchConfig& cfg, std::uint64_t seed);
BenchRun run_mp3(const BenchConfig& cfg, std::uint64_t seed);
BenchRun run_apsp(const BenchConfig& cfg, std::uint64_t seed);

/// Validates the configuration and runs every seed. Oracle failures throw
/// std::runtime_error.
BenchReport run_bench(const BenchConfig& cfg);

nlohmann::json to_json(const BenchReport& r);
std::string csv_header();
void write_csv(const BenchReport& r, std::ostream& os);

/// Writes the report to `path` as json or csv. Nothing is written if the
/// format is unknown.
void emit_report(const BenchReport& r, const std::string& format, const std::string& path);

}  // namespace sta
