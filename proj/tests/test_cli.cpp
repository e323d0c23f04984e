#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypar/io.hpp"
#include "hypar/rng.hpp"
#include "support/sets.hpp"

using namespace hypar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct RunOutput {
  int exit_code = 0;
  std::string stdout_text;
};

RunOutput run_cli(const std::string& args) {
  fs::path outfile = fs::temp_directory_path() / "hypar_cli_stdout.txt";
  std::string cmd = std::string(HYPAR_BIN) + " " + args + " > " + outfile.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunOutput out;
  out.exit_code = WEXITSTATUS(rc);
  out.stdout_text = slurp(outfile);
  return out;
}

fs::path scratch_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cell set json round trip and validation") {
  Rng rng(3);
  CellSet a = hypar::testing::random_cellset(4, 0.35, rng);
  std::stringstream ss;
  write_cellset(a, ss);
  CellSet back = read_cellset(ss);
  CHECK(back == a);

  // The writer emits sorted cells.
  std::string text = ss.str();
  (void)text;

  std::stringstream dup(R"({"resolution":2,"domain":"unit","cells":[[0,0],[0,0]]})");
  CHECK_THROWS_AS(read_cellset(dup), input_error);
  std::stringstream bad(R"({"resolution":2,"cells":[[0,0]]})");
  CHECK_THROWS_AS(read_cellset(bad), input_error);
  std::stringstream garbage("not json at all");
  CHECK_THROWS_AS(read_cellset(garbage), input_error);
}

TEST_CASE("tile cover serialization schema") {
  StructureConfig cfg;
  CellSet tile = cellset_from_tile(Tile{DyadicInterval(1, 0), DyadicInterval(2, 1)}, 4, Domain::Unit);
  TileCover cover = tile_cover(tile, cfg);
  std::stringstream ss;
  write_tile_cover(cover, ss);
  auto j = nlohmann::json::parse(ss.str());
  CHECK(j["J"] == 1);
  CHECK(j["K"] == 2);
  REQUIRE(j["entries"].size() == 1);
  CHECK(j["entries"][0]["delta_log2"] == 0);
  CHECK(j["entries"][0]["tiles"][0] == nlohmann::json::array({1, 0, 2, 1}));
  CHECK(j["entries"][0]["residual_cells"].size() == tile.size());

  std::stringstream csv;
  write_tile_cover_csv(cover, csv);
  CHECK(csv.str().substr(0, 40).find("delta,tile_count,residual_measure") == 0);
}

TEST_CASE("cli: happy paths and exit codes") {
  fs::path dir = scratch_dir("hypar_cli");

  // A tile fixture set file.
  CellSet tile = cellset_from_tile(Tile{DyadicInterval(1, 0), DyadicInterval(2, 1)}, 4, Domain::Unit);
  fs::path setfile = dir / "tile.json";
  write_cellset_file(tile, setfile.string());

  // decompose: one tile, delta = 1, count 1.
  RunOutput dec = run_cli("--out " + (dir / "dec").string() + " decompose --set " + setfile.string());
  CHECK(dec.exit_code == 0);
  std::string summary = slurp(dir / "dec" / "summary_K2.csv");
  CHECK(summary.find("delta,tile_count,residual_measure") == 0);
  CHECK(summary.find("1,1,") != std::string::npos);

  // empty set: exit 0, empty outputs.
  fs::path emptyfile = dir / "empty.json";
  write_cellset_file(CellSet(4, Domain::Unit, {}), emptyfile.string());
  RunOutput deco = run_cli("--out " + (dir / "dec0").string() + " decompose --set " +
                           emptyfile.string());
  CHECK(deco.exit_code == 0);

  // norm on the empty set prints 0.
  RunOutput n0 = run_cli("norm --set " + emptyfile.string());
  CHECK(n0.exit_code == 0);
  CHECK(std::stod(n0.stdout_text) == 0.0);

  // extend writes a parseable field dump.
  RunOutput ext = run_cli("--out " + (dir / "field").string() + " --grid 4,4,9,16 extend --set " +
                          setfile.string());
  CHECK(ext.exit_code == 0);
  {
    std::ifstream is(dir / "field" / "field.bin", std::ios::binary);
    REQUIRE(is.good());
    Field f = read_field(is);
    CHECK(f.grid().m_t == 9);
    CHECK(f.grid().m_x1 == 16);
  }

  // malformed set file -> 2.
  fs::path badfile = dir / "bad.json";
  std::ofstream(badfile) << "{\"resolution\": 3}";
  CHECK(run_cli("norm --set " + badfile.string()).exit_code == 2);

  // missing required flag -> 2.
  CHECK(run_cli("norm").exit_code == 2);

  // aliasing guard -> 4 (resolution-0 set on a very coarse lattice).
  CellSet coarse(0, Domain::Unit, {{0, 0}});
  fs::path coarsefile = dir / "coarse.json";
  write_cellset_file(coarse, coarsefile.string());
  CHECK(run_cli("--grid 8,8,4,4 norm --set " + coarsefile.string()).exit_code == 4);
}

TEST_CASE("cli: norm regression on the pinned square fixture") {
  fs::path dir = scratch_dir("hypar_norm");
  fs::path setfile = dir / "square3.json";
  write_cellset_file(hypar::testing::unit_square(3), setfile.string());
  RunOutput out = run_cli("norm --set " + setfile.string());
  CHECK(out.exit_code == 0);
  double v = std::stod(out.stdout_text);
  CHECK(std::abs(v - 4.9859863834965797) < 1e-10 * 4.9859863834965797);
}

TEST_CASE("cli: scan and sweep rerun byte-identically across thread counts") {
  fs::path dir = scratch_dir("hypar_det");
  std::ofstream(dir / "cfg.json")
      << R"({"grid":{"R_t":4,"R_x":4,"M_t":17,"M_x":24},"scan":{"rows":[[1,1],[2,1],[2,2]]},)"
      << R"("sweep":{"generator":"random-cells","count":2,"resolution":4},"seed":9})";

  auto run_with_threads = [&](const std::string& sub, const char* outdir, const char* threads) {
    std::string cmd = "THREADS=" + std::string(threads) + " " + HYPAR_BIN + " --config " +
                      (dir / "cfg.json").string() + " --out " + (dir / outdir).string() + " " + sub +
                      " > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  };

  run_with_threads("scan-bilinear", "a", "1");
  run_with_threads("scan-bilinear", "b", "4");
  CHECK(slurp(dir / "a" / "scan.csv") == slurp(dir / "b" / "scan.csv"));

  run_with_threads("sweep", "sa", "1");
  run_with_threads("sweep", "sb", "3");
  CHECK(slurp(dir / "sa" / "sweep.csv") == slurp(dir / "sb" / "sweep.csv"));

  // And rerunning with the same thread count reproduces bytes too.
  run_with_threads("scan-bilinear", "c", "1");
  CHECK(slurp(dir / "a" / "scan.csv") == slurp(dir / "c" / "scan.csv"));
}

TEST_CASE("cli: search emits a monotone trace and a valid best set") {
  fs::path dir = scratch_dir("hypar_search");
  std::ofstream(dir / "cfg.json")
      << R"({"search":{"budget_log2":4,"resolution":4,"iterations":25},"seed":5})";
  std::string cmd = std::string(HYPAR_BIN) + " --config " + (dir / "cfg.json").string() +
                    " --out " + dir.string() + " search > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CellSet best = read_cellset_file((dir / "best_config.json").string());
  CHECK(best.measure() == Rational(1, 16));
  std::string trace = slurp(dir / "search_trace.csv");
  CHECK(trace.find("iteration,move,accepted_ratio,best_ratio") == 0);
}
