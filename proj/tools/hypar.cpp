// hypar: batch interface to the extension-field laboratory.
//
// Subcommands: decompose, extend, norm, scan-bilinear, fit-decay,
// decouple-check, necessity, sweep, search.  Exit codes: 0 ok, 2 input
// error, 3 invariant breach, 4 numeric guard, 5 suite assertion failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypar/harness.hpp"
#include "hypar/io.hpp"
#include "hypar/report.hpp"
#include "hypar/search.hpp"

using namespace hypar;
using nlohmann::json;

namespace {

Rational parse_rational(const json& j, const char* what) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(s));
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
      throw input_error(std::string("config: bad rational for ") + what + ": " + s);
    }
  }
  throw input_error(std::string("config: rational fields are integers or \"a/b\": ") + what);
}

struct RunConfig {
  ExponentPair exponents{Rational(7, 4), Rational(2)};
  SpacetimeGrid grid{8.0, 8.0, 65, 128};
  StructureConfig structure;
  int a_sep = 4;
  std::uint64_t seed = 1;
  json raw;  // echoed into reports

  static RunConfig load(const std::string& path) {
    RunConfig c;
    if (path.empty()) {
      c.raw = json::object();
      return c;
    }
    std::ifstream is(path);
    if (!is) throw input_error("cannot open config: " + path);
    json j;
    try {
      is >> j;
    } catch (const json::exception& ex) {
      throw input_error(std::string("config: invalid json: ") + ex.what());
    }
    c.raw = j;
    if (j.contains("exponents")) {
      const json& e = j["exponents"];
      Rational s = e.contains("s") ? parse_rational(e["s"], "s") : Rational(7, 4);
      Rational r = e.contains("r") ? parse_rational(e["r"], "r") : Rational(2);
      c.exponents = ExponentPair(s, r);
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      c.grid = SpacetimeGrid(g.value("R_t", 8.0), g.value("R_x", 8.0), g.value("M_t", 65),
                             g.value("M_x", 128));
    }
    if (j.contains("structure")) {
      const json& st = j["structure"];
      if (st.contains("C")) c.structure.c = parse_rational(st["C"], "C");
      c.structure.eps_min_log2 = st.value("eps_min_log2", 10);
      c.structure.a_cover = st.value("A_cover", 16.0);
      c.a_sep = st.value("A", 4);
      c.structure.validate();
    }
    c.seed = j.value("seed", std::uint64_t{1});
    return c;
  }
};

SpacetimeGrid parse_grid_flag(const std::string& flag) {
  double rt, rx;
  int mt, mx;
  if (std::sscanf(flag.c_str(), "%lf,%lf,%d,%d", &rt, &rx, &mt, &mx) != 4)
    throw input_error("--grid expects Rt,Rx,Mt,Mx");
  return SpacetimeGrid(rt, rx, mt, mx);
}

json grid_json(const SpacetimeGrid& g) {
  return {{"R_t", g.r_t}, {"R_x1", g.r_x1}, {"R_x2", g.r_x2},
          {"M_t", g.m_t}, {"M_x1", g.m_x1}, {"M_x2", g.m_x2}};
}

json exponents_json(const ExponentPair& e) {
  return {{"s", e.s.str()}, {"r", e.r.str()}, {"s_prime", e.s_prime().str()}};
}

// Exact-inequality slack tolerated before a suite run is declared broken.
double exact_tol(double scale) { return 1e-12 * std::max(1.0, scale); }

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// --- subcommand bodies -------------------------------------------------------

int cmd_decompose(const std::string& set_path, const RunConfig& cfg, const std::string& out_dir) {
  CellSet omega = read_cellset_file(set_path);
  std::filesystem::create_directories(out_dir);
  if (omega.empty()) {
    Csv csv({"K", "delta", "tile_count", "residual_measure"});
    csv.write(out_dir + "/summary.csv");
    return 0;
  }
  FiberDecomposition fd = fiber_slice(omega);
  Csv overview({"K", "delta", "tile_count", "residual_measure"});
  for (const auto& [k, part] : fd.parts) {
    TileCover cover = tile_cover(part, cfg.structure);
    if (!tile_cover_is_partition(cover, part))
      throw invariant_error("decompose: cover does not partition the part");
    if (!tile_cover_contained(cover))
      throw invariant_error("decompose: residual escapes its tiles");
    {
      std::ofstream os(out_dir + "/cover_K" + std::to_string(k) + ".json");
      if (!os) throw input_error("cannot write cover file");
      write_tile_cover(cover, os);
    }
    {
      std::ofstream os(out_dir + "/summary_K" + std::to_string(k) + ".csv");
      if (!os) throw input_error("cannot write summary file");
      write_tile_cover_csv(cover, os);
    }
    for (const auto& [delta, entry] : cover.entries)
      overview.add_row({std::to_string(k), format_g17(std::ldexp(1.0, -delta)),
                        std::to_string(entry.tiles.size()),
                        format_g17(entry.residual.measure().to_double())});
  }
  overview.write(out_dir + "/summary.csv");
  std::printf("decomposed %zu cells into %zu fiber bins\n", omega.size(), fd.parts.size());
  return 0;
}

int cmd_extend(const std::string& set_path, const RunConfig& cfg, const std::string& out_dir) {
  CellSet omega = read_cellset_file(set_path);
  Field f = extend(Density(omega), cfg.grid);
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/field.bin", std::ios::binary);
  if (!os) throw input_error("cannot write field dump");
  write_field(f, os);
  std::ofstream slice(out_dir + "/slice_t0.csv");
  write_abs_slice_csv(f, f.grid().m_t / 2, slice);
  std::printf("field: %d x %d x %d samples -> %s/field.bin\n", f.grid().m_t, f.grid().m_x1,
              f.grid().m_x2, out_dir.c_str());
  return 0;
}

int cmd_norm(const std::string& set_path, const RunConfig& cfg) {
  CellSet omega = read_cellset_file(set_path);
  double p = cfg.exponents.two_s().to_double();
  double v = omega.empty() ? 0.0 : lp_norm(extend(Density(omega), cfg.grid), p);
  std::printf("%.12g\n", v);
  return 0;
}

int cmd_scan(const RunConfig& cfg, const std::string& out_dir, Timer& timer) {
  std::vector<std::pair<int, int>> range;
  if (cfg.raw.contains("scan") && cfg.raw["scan"].contains("rows")) {
    for (const auto& jk : cfg.raw["scan"]["rows"])
      range.emplace_back(jk[0].get<int>(), jk[1].get<int>());
  } else {
    for (int sum = 2; sum <= 8; ++sum) range.emplace_back((sum + 1) / 2, sum / 2);
  }
  ScanResult res = scan_bilinear_exponent(cfg.exponents, range, cfg.grid);

  std::filesystem::create_directories(out_dir);
  Csv csv({"j", "k", "norm", "log2_ratio", "cs_slack"});
  bool ok = true;
  for (const auto& row : res.rows) {
    csv.add_numeric_row({row.params[0], row.params[1], row.norm, row.ratio_log2, row.cs_slack});
    if (row.cs_slack < -exact_tol(row.norm)) ok = false;
  }
  csv.write(out_dir + "/scan.csv");

  Report rep;
  rep.command = "scan-bilinear";
  rep.config = {{"exponents", exponents_json(cfg.exponents)},
                {"grid", grid_json(cfg.grid)},
                {"rows", range.size()}};
  double predicted = -bilinear_scaling_exponent(cfg.exponents).to_double();
  rep.results = {{"slope", res.slope},
                 {"intercept", res.intercept},
                 {"residual", res.residual},
                 {"predicted_slope", predicted}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/scan.json");
  std::printf("slope %.6f (predicted %.6f), residual %.2e\n", res.slope, predicted, res.residual);
  if (!ok) throw suite_error("scan: a Cauchy-Schwarz slack went negative");
  return 0;
}

int cmd_fit_decay(const RunConfig& cfg, const std::string& out_dir, Timer& timer) {
  int max_gap = 5;
  if (cfg.raw.contains("decay")) max_gap = cfg.raw["decay"].value("max_gap", 5);
  std::vector<DecayPair> pairs;
  for (int gap = 0; gap <= max_gap; ++gap) pairs.push_back(make_hard_case_pair(gap));
  DecayFit fit = fit_decay_c0(pairs, cfg.exponents, cfg.grid);

  std::filesystem::create_directories(out_dir);
  Csv csv({"K", "Kp", "J", "Jp", "lhs", "rhs0", "normalized", "cs_slack"});
  bool ok = true;
  for (const auto& row : fit.pairs) {
    csv.add_numeric_row({double(row.k1), double(row.k2), double(row.j1), double(row.j2), row.lhs,
                         row.rhs0, row.lhs / row.rhs0, row.cs_slack});
    if (row.cs_slack < -exact_tol(row.lhs)) ok = false;
  }
  csv.write(out_dir + "/decay.csv");

  Report rep;
  rep.command = "fit-decay";
  rep.config = {{"exponents", exponents_json(cfg.exponents)},
                {"grid", grid_json(cfg.grid)},
                {"max_gap", max_gap}};
  rep.results = {{"c0_hat", fit.c0_hat}, {"monotone_steps", fit.monotone_steps}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/decay.json");
  std::printf("c0_hat %.4f, monotone steps %d\n", fit.c0_hat, fit.monotone_steps);
  if (!ok) throw suite_error("fit-decay: a Cauchy-Schwarz slack went negative");
  return 0;
}

int cmd_decouple(const RunConfig& cfg, const std::string& out_dir, Timer& timer) {
  int delta_log2 = 2, k0 = 0, k1 = 8;
  if (cfg.raw.contains("decouple")) {
    delta_log2 = cfg.raw["decouple"].value("delta_log2", 2);
    k0 = cfg.raw["decouple"].value("K0", 0);
    k1 = cfg.raw["decouple"].value("K1", 8);
  }
  std::map<int, CellSet> family;
  {
    DecayPair p = make_hard_case_pair(std::min(k1 - k0, kScaleMax - 1));
    family.emplace(k0, p.set1);
    family.emplace(k1, p.set2);
  }
  DecoupleReport rep0 =
      check_decoupling(family, DyadicParam(delta_log2), cfg.exponents, cfg.grid, cfg.a_sep);

  std::filesystem::create_directories(out_dir);
  Csv csv({"term", "value"});
  for (std::size_t i = 0; i < rep0.terms.size(); ++i)
    csv.add_row({rep0.terms[i], format_g17(rep0.term_values[i])});
  csv.write(out_dir + "/decouple.csv");

  Report rep;
  rep.command = "decouple-check";
  rep.config = {{"exponents", exponents_json(cfg.exponents)},
                {"grid", grid_json(cfg.grid)},
                {"delta_log2", delta_log2},
                {"K", {k0, k1}},
                {"A", cfg.a_sep}};
  rep.results = {{"lhs", rep0.lhs},
                 {"diag", rep0.diag},
                 {"offdiag", rep0.offdiag},
                 {"bound", rep0.bound},
                 {"within_bound", rep0.within_bound},
                 {"expansion_slack", rep0.expansion_slack},
                 {"min_holder_slack", rep0.min_holder_slack}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/decouple.json");
  std::printf("L=%.6g diag=%.6g offdiag=%.6g bound=%.6g within=%d\n", rep0.lhs, rep0.diag,
              rep0.offdiag, rep0.bound, rep0.within_bound ? 1 : 0);
  if (rep0.expansion_slack < -exact_tol(rep0.lhs) ||
      rep0.min_holder_slack < -exact_tol(rep0.lhs))
    throw suite_error("decouple: an exact inequality went negative");
  return 0;
}

int cmd_necessity(const RunConfig& cfg, const std::string& out_dir, Timer& timer) {
  int depth = 5;
  ExponentPair e{Rational(8, 5), Rational(2)};
  SpacetimeGrid grid(64.0, 8.0, 64.0, 129, 17, 129);
  if (cfg.raw.contains("necessity")) {
    depth = cfg.raw["necessity"].value("depth", 5);
    if (cfg.raw["necessity"].contains("s"))
      e = ExponentPair(parse_rational(cfg.raw["necessity"]["s"], "s"), Rational(2));
  }
  if (cfg.raw.contains("grid")) grid = cfg.grid;
  ScanResult main_run = necessity_experiment(depth, e, grid, false);
  ScanResult control = necessity_experiment(depth, e, grid, true);

  std::filesystem::create_directories(out_dir);
  Csv csv({"m", "main_ratio_log2", "control_ratio_log2", "main_norm", "control_norm"});
  for (std::size_t i = 0; i < main_run.rows.size(); ++i)
    csv.add_numeric_row({main_run.rows[i].params[0], main_run.rows[i].ratio_log2,
                         control.rows[i].ratio_log2, main_run.rows[i].norm,
                         control.rows[i].norm});
  csv.write(out_dir + "/necessity.csv");

  Report rep;
  rep.command = "necessity";
  rep.config = {{"s", e.s.str()}, {"depth", depth}, {"grid", grid_json(grid)}};
  rep.results = {{"main_slope", main_run.slope}, {"control_slope", control.slope}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/necessity.json");
  std::printf("main slope %.4f, control slope %.4f (log2 per step)\n", main_run.slope,
              control.slope);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, Timer& timer) {
  std::string gen_name = "random-cells";
  int count = 50, resolution = 6;
  if (cfg.raw.contains("sweep")) {
    gen_name = cfg.raw["sweep"].value("generator", gen_name);
    count = cfg.raw["sweep"].value("count", count);
    resolution = cfg.raw["sweep"].value("resolution", resolution);
  }
  SuiteReport rep0 = main_ratio_sweep(generator_from_name(gen_name), count, seed, resolution,
                                      cfg.exponents, cfg.grid, cfg.structure);

  std::filesystem::create_directories(out_dir);
  Csv csv({"case", "ratio", "fiber_bins", "cover_tiles", "worst_count_ratio"});
  for (const auto& c : rep0.cases)
    csv.add_row({c.descriptor, format_g17(c.ratio), std::to_string(c.parts),
                 std::to_string(c.tiles), format_g17(c.worst_count_ratio)});
  csv.write(out_dir + "/sweep.csv");

  Report rep;
  rep.command = "sweep";
  rep.config = {{"exponents", exponents_json(cfg.exponents)},
                {"grid", grid_json(cfg.grid)},
                {"generator", gen_name},
                {"count", count},
                {"resolution", resolution},
                {"seed", seed}};
  rep.results = {{"max_ratio", rep0.max_ratio}, {"reference_ratio", rep0.reference_ratio}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/sweep.json");
  std::printf("max ratio %.6g vs reference %.6g\n", rep0.max_ratio, rep0.reference_ratio);
  return 0;
}

int cmd_search(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, Timer& timer) {
  int budget_log2 = 4, resolution = 5, iterations = 150;
  if (cfg.raw.contains("search")) {
    budget_log2 = cfg.raw["search"].value("budget_log2", budget_log2);
    resolution = cfg.raw["search"].value("resolution", resolution);
    iterations = cfg.raw["search"].value("iterations", iterations);
  }
  if (budget_log2 > 2 * resolution) throw input_error("search: budget unrealizable at resolution");
  SearchParams params;
  params.seed = seed;
  params.iterations = iterations;
  Configuration start = Configuration::single_tile(resolution, Domain::Unit, (budget_log2 + 1) / 2,
                                                   budget_log2 / 2);
  SpacetimeGrid grid(4.0, 4.0, 17, 32);
  if (cfg.raw.contains("grid")) grid = cfg.grid;
  SearchResult res = search_extremizer(cfg.exponents, start, params, grid);

  std::filesystem::create_directories(out_dir);
  Csv csv({"iteration", "move", "accepted_ratio", "best_ratio"});
  bool monotone = true;
  double prev_best = 0.0;
  for (const auto& st : res.trace.steps) {
    csv.add_row({std::to_string(st.iteration), st.move, format_g17(st.accepted_ratio),
                 format_g17(st.best_ratio)});
    if (st.best_ratio < prev_best) monotone = false;
    prev_best = st.best_ratio;
  }
  csv.write(out_dir + "/search_trace.csv");
  write_cellset_file(res.best.cells(), out_dir + "/best_config.json");

  Report rep;
  rep.command = "search";
  rep.config = {{"exponents", exponents_json(cfg.exponents)},
                {"grid", grid_json(grid)},
                {"budget_log2", budget_log2},
                {"resolution", resolution},
                {"iterations", iterations},
                {"seed", seed}};
  rep.results = {{"best_ratio", res.best_ratio}, {"rects", res.best.rects().size()}};
  rep.wall_time_s = timer.seconds();
  rep.write(out_dir + "/search.json");
  std::printf("best ratio %.6g with %zu rects\n", res.best_ratio, res.best.rects().size());
  if (!monotone) throw suite_error("search: best-so-far trace decreased");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for a saddle-surface extension operator"};
  app.require_subcommand(1);

  std::string config_path, set_path, out_dir = ".", grid_flag;
  std::uint64_t seed_flag = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid", grid_flag, "grid as Rt,Rx,Mt,Mx");
  auto* seed_opt = app.add_option("--seed", seed_flag, "seed override");

  auto* c_decompose = app.add_subcommand("decompose", "fiber-slice a set and cover each bin");
  auto* c_extend = app.add_subcommand("extend", "evaluate the extension field and dump it");
  auto* c_norm = app.add_subcommand("norm", "print || E chi ||_2s on the grid");
  auto* c_scan = app.add_subcommand("scan-bilinear", "bilinear scaling-exponent scan");
  auto* c_decay = app.add_subcommand("fit-decay", "bilinear decay constant across fiber bins");
  auto* c_dec = app.add_subcommand("decouple-check", "quadrilinear decoupling check");
  auto* c_nec = app.add_subcommand("necessity", "two-bump separation necessity experiment");
  auto* c_sweep = app.add_subcommand("sweep", "ratio sweep over generated sets");
  auto* c_search = app.add_subcommand("search", "annealing search for extremizing tile unions");
  for (auto* c : {c_decompose, c_extend, c_norm})
    c->add_option("--set", set_path, "cell-set JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const bool have_seed = seed_opt->count() > 0;

  Timer timer;
  try {
    RunConfig cfg = RunConfig::load(config_path);
    if (!grid_flag.empty()) cfg.grid = parse_grid_flag(grid_flag);
    std::uint64_t seed = have_seed ? seed_flag : cfg.seed;

    if (c_decompose->parsed()) return cmd_decompose(set_path, cfg, out_dir);
    if (c_extend->parsed()) return cmd_extend(set_path, cfg, out_dir);
    if (c_norm->parsed()) return cmd_norm(set_path, cfg);
    if (c_scan->parsed()) return cmd_scan(cfg, out_dir, timer);
    if (c_decay->parsed()) return cmd_fit_decay(cfg, out_dir, timer);
    if (c_dec->parsed()) return cmd_decouple(cfg, out_dir, timer);
    if (c_nec->parsed()) return cmd_necessity(cfg, out_dir, timer);
    if (c_sweep->parsed()) return cmd_sweep(cfg, out_dir, seed, timer);
    if (c_search->parsed()) return cmd_search(cfg, out_dir, seed, timer);
  } catch (const input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const invariant_error& e) {
    std::fprintf(stderr, "invariant breach: %s\n", e.what());
    return 3;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric guard: %s\n", e.what());
    return 4;
  } catch (const suite_error& e) {
    std::fprintf(stderr, "suite failure: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
