#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sta/bench.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(STA_BENCH_EXE) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sta_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("spmm json report") {
  const auto out = scratch("spmm.json");
  REQUIRE(run("--bench spmm --n 128 --density 0.05 --procs 4 --reps 2 --seeds 2 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["config"]["bench"] == "spmm");
  CHECK(j["config"]["k"] == 0);
  REQUIRE(j["runs"].size() == 2);
  for (const auto& r : j["runs"]) {
    CHECK(r["verified"] == true);
    CHECK(r["sim"]["received"].size() == 4);
    CHECK(r["detail"]["k"] == 16);
    CHECK(r["sim"]["max_words"].get<double>() <= 2 * r["sim"]["predicted_W"].get<double>() + 1e-9);
  }
  CHECK(j["runs"][0]["seed"] == 1);
  CHECK(j["runs"][1]["seed"] == 2);
}

TEST_CASE("deterministic report apart from timings") {
  const auto a = scratch("a.json"), b = scratch("b.json");
  const std::string args = "--bench apsp --n 24 --density 0.2 --procs 4 --reps 1 --seed 5 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  auto ja = nlohmann::json::parse(slurp(a)), jb = nlohmann::json::parse(slurp(b));
  for (auto* j : {&ja, &jb})
    for (auto& r : (*j)["runs"]) {
      r.erase("median_s");
      r.erase("min_s");
      r.erase("max_s");
    }
  CHECK(ja == jb);
}

TEST_CASE("csv report") {
  const auto out = scratch("mp3.csv");
  REQUIRE(run("--bench mp3 --m 2 --n 4 --density 0.5 --procs 2 --reps 1 --format csv --out " + out.string()) == 0);
  std::istringstream in(slurp(out));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == sta::csv_header());
  CHECK(header ==
        "bench,n,k,m,density,procs,seed,nnz,p1,p2,p3,predicted_W,max_words,total_words,balance_ratio,"
        "median_s,min_s,max_s,verified");
  CHECK(row.rfind("mp3,4,", 0) == 0);
}

TEST_CASE("errors leave no file") {
  const auto out = scratch("none.json");
  CHECK(run("--bench spmm --n 32 --seeds 0 --out " + out.string()) != 0);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("--bench nope --out " + out.string()) != 0);
  CHECK(run("--bench spmm --n 32 --format xml --out " + out.string()) != 0);
  CHECK(run("--bench spmm --n 32 --density 0 --out " + out.string()) != 0);
  CHECK_FALSE(fs::exists(out));
}
