#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "leaklab/svg.hpp"
#include "leaklab/sweep.hpp"
#include "leaklab/thresholds.hpp"

using namespace leaklab;
namespace fs = std::filesystem;

namespace {

SweepConfig tiny_config(const std::string& out_dir) {
  SweepConfig cfg = SweepConfig::from_json(json{
      {"dataset", {{"kind", "random_iid"}, {"d", 8}, {"c", 2}}},
      {"alpha_grid", {0.5, 1.5}},
      {"rho_grid", {0.5}},
      {"tau_grid", {2.0}},
      {"seeds", {0, 1}},
      {"teacher_train", {{"steps", 300}, {"lr", 1e-2}}},
      {"student_train", {{"steps", 300}, {"lr", 1e-2}}},
      {"output_dir", out_dir},
  });
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem) {
    path = fs::temp_directory_path() / (stem + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config json round-trips and hashes stably") {
  SweepConfig cfg = tiny_config("a");
  SweepConfig back = SweepConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.hash() == cfg.hash());

  // the output directory does not participate in cell identity
  SweepConfig moved = tiny_config("b");
  CHECK(moved.hash() == cfg.hash());
  CHECK(cell_key(moved, {0.5, 0.5, 2.0, 0}) == cell_key(cfg, {0.5, 0.5, 2.0, 0}));

  // changing the grid payload does change the hash
  SweepConfig other = cfg;
  other.tau_grid = {4.0};
  CHECK(other.hash() != cfg.hash());

  CHECK_THROWS(SweepConfig::from_json(json{{"alpha_grid", json::array()}}));
  CHECK_THROWS(SweepConfig::from_json(json{{"rho_grid", {1.5}}}));
  CHECK_THROWS(SweepConfig::from_json(json{{"mode", "explode"}}));
}

TEST_CASE("n_for_alpha respects the units convention") {
  SweepConfig cfg;
  cfg.dataset.d = 100;
  cfg.dataset.c = 10;
  cfg.alpha_units = AlphaUnits::n_over_d;
  CHECK(cfg.n_for_alpha(1.5) == 150);
  cfg.alpha_units = AlphaUnits::n_over_dc;
  CHECK(cfg.n_for_alpha(0.5) == 500);
  cfg.dataset.kind = DatasetKind::modular_addition;
  cfg.dataset.p = 113;
  CHECK(cfg.n_for_alpha(7.0) == 12769);
}

TEST_CASE("run_cell is deterministic and independent of the transform stream") {
  SweepConfig cfg = tiny_config("unused");
  CellCoords coords{1.5, 0.5, 2.0, 3};
  CellResult a = run_cell(cfg, coords);
  CellResult b = run_cell(cfg, coords);
  REQUIRE_FALSE(a.failed);
  CHECK(a.metrics.acc_T_star == b.metrics.acc_T_star);
  CHECK(a.metrics.acc_S_test == b.metrics.acc_S_test);
  CHECK(a.metrics.mse_test == b.metrics.mse_test);

  // shuffled and unshuffled runs share the data and teacher streams
  SweepConfig shuf = cfg;
  shuf.transform = Transform::parse("shuffle");
  CellResult c = run_cell(shuf, coords);
  REQUIRE_FALSE(c.failed);
  CHECK(c.metrics.acc_T_star == a.metrics.acc_T_star);
  CHECK(c.metrics.acc_T_val == a.metrics.acc_T_val);
  CHECK(c.n_train == a.n_train);
}

TEST_CASE("sweep writes a resumable store") {
  TempDir tmp("leaklab_sweep_");
  SweepConfig cfg = tiny_config((tmp.path / "out").string());
  ResultStore store = run_sweep(cfg, 2);
  CHECK(store.cells.size() == 4);  // 2 alphas x 1 rho x 1 tau x 2 seeds
  CHECK(fs::exists(tmp.path / "out" / "cells.csv"));
  CHECK(fs::exists(tmp.path / "out" / "manifest.json"));

  ResultStore loaded = ResultStore::load_csv((tmp.path / "out" / "cells.csv").string());
  REQUIRE(loaded.cells.size() == 4);
  // CSV round-trip preserves doubles bit-exactly via %.17g
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(loaded.cells[i].key == store.cells[i].key);
    CHECK(loaded.cells[i].metrics.acc_S_test == store.cells[i].metrics.acc_S_test);
    CHECK(loaded.cells[i].metrics.mse_test == store.cells[i].metrics.mse_test);
    CHECK(loaded.cells[i].regime == store.cells[i].regime);
  }

  // truncate to two rows, rerun: completed cells are skipped, the rest refill
  std::ifstream in((tmp.path / "out" / "cells.csv").string());
  std::string header, r1, r2;
  std::getline(in, header);
  std::getline(in, r1);
  std::getline(in, r2);
  in.close();
  {
    std::ofstream outf((tmp.path / "out" / "cells.csv").string(), std::ios::trunc);
    outf << header << "\n" << r1 << "\n" << r2 << "\n";
  }
  ResultStore resumed = run_sweep(cfg, 1);
  CHECK(resumed.cells.size() == 4);
  ResultStore reloaded = ResultStore::load_csv((tmp.path / "out" / "cells.csv").string());
  CHECK(reloaded.cells.size() == 4);
  // deterministic cells: resuming reproduces the identical rows
  for (const CellResult& c : reloaded.cells) {
    bool found = false;
    for (const CellResult& o : store.cells)
      if (o.key == c.key) {
        found = true;
        CHECK(o.metrics.acc_S_test == c.metrics.acc_S_test);
      }
    CHECK(found);
  }
}

TEST_CASE("duplicate keys with differing payloads are rejected") {
  ResultStore store;
  CellResult a;
  a.key = 42;
  a.metrics.acc_S_test = 0.5;
  store.append(a);
  store.append(a);  // identical duplicate is a no-op
  CHECK(store.cells.size() == 1);
  CellResult b = a;
  b.metrics.acc_S_test = 0.75;
  CHECK_THROWS(store.append(b));
}

TEST_CASE("named thresholds follow the metric conventions") {
  // synthetic store: accuracy falls and match rises along alpha
  ResultStore store;
  std::uint64_t key = 1;
  for (std::uint64_t seed : {0ull, 1ull}) {
    struct Pt { double alpha, acc_T, acc_S_train, match, mse; };
    std::vector<Pt> pts = {
        {1.0, 1.0, 1.0, 0.5, 3.0},
        {2.0, 1.0, 1.0, 0.8, 0.5},
        {3.0, 0.9, 0.9, 1.0, 0.01},
    };
    for (const Pt& p : pts) {
      CellResult c;
      c.key = key++;
      c.coords = {p.alpha, 0.8, 1.0, seed};
      c.metrics.acc_T_star = p.acc_T;
      c.metrics.acc_S_train = p.acc_S_train;
      c.metrics.acc_S_match_T = p.match;
      c.metrics.mse_test = p.mse;
      store.append(c);
    }
  }
  RegimeCutoffs cuts;
  ThresholdSummary t_label = named_threshold(store, "alpha_T_label", "ce", cuts);
  CHECK(t_label.n_crossed == 2);
  CHECK(t_label.alpha.mean == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(t_label.alpha.sem == doctest::Approx(0.0));

  ThresholdSummary s_label = named_threshold(store, "alpha_S_label", "ce", cuts);
  CHECK(s_label.alpha.mean == doctest::Approx(2.1).epsilon(1e-12));

  // ce mode: rising acc_S_match_T through 0.99; between 2.0 (0.8) and 3.0 (1.0)
  ThresholdSummary s_id = named_threshold(store, "alpha_S_id", "ce", cuts);
  CHECK(s_id.alpha.mean == doctest::Approx(2.0 + 0.19 / 0.2).epsilon(1e-9));

  // pinv mode: mse_test falling through 0.1; between 2.0 (0.5) and 3.0 (0.01)
  ThresholdSummary s_id_pinv = named_threshold(store, "alpha_S_id", "pinv", cuts);
  CHECK(s_id_pinv.alpha.mean ==
        doctest::Approx(2.0 + (0.1 - 0.5) / (0.01 - 0.5)).epsilon(1e-9));

  CHECK_THROWS(named_threshold(store, "alpha_wat", "ce", cuts));
}

TEST_CASE("threshold slices filter on rho and tau") {
  ResultStore store;
  std::uint64_t key = 1;
  for (double rho : {0.5, 0.8}) {
    for (double alpha : {1.0, 2.0}) {
      CellResult c;
      c.key = key++;
      c.coords = {alpha, rho, 1.0, 0};
      // rho 0.5 crosses late, rho 0.8 crosses early
      c.metrics.acc_T_star = rho == 0.5 ? (alpha < 1.5 ? 1.0 : 0.98) : 0.5;
      store.append(c);
    }
  }
  ThresholdSummary a = threshold_over_seeds(store, "acc_T_star", 0.99,
                                            CrossDirection::falling, 0.5, std::nullopt);
  CHECK(a.n_seeds == 1);
  CHECK(a.alpha.mean > 1.0);
  ThresholdSummary b = threshold_over_seeds(store, "acc_T_star", 0.99,
                                            CrossDirection::falling, 0.8, std::nullopt);
  CHECK(b.alpha.mean == doctest::Approx(1.0));  // already below at the first point
}

TEST_CASE("svg plots are emitted") {
  TempDir tmp("leaklab_svg_");
  ResultStore store;
  std::uint64_t key = 1;
  for (double alpha : {1.0, 2.0})
    for (double rho : {0.4, 0.8})
      for (std::uint64_t seed : {0ull, 1ull}) {
        CellResult c;
        c.key = key++;
        c.coords = {alpha, rho, 1.0, seed};
        c.metrics.acc_S_test = 0.25 * alpha + 0.5 * rho;
        c.regime = alpha > 1.5 ? Regime::full_recovery : Regime::trivial_leakage;
        store.append(c);
      }
  std::string heat = (tmp.path / "heat.svg").string();
  emit_heatmap(store, "acc_S_test", "alpha", "rho", heat);
  std::ifstream in(heat);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("</svg>") != std::string::npos);

  std::string regime_path = (tmp.path / "regime.svg").string();
  emit_heatmap(store, "regime", "alpha", "rho", regime_path);
  CHECK(fs::exists(regime_path));

  // decision boundary wants a 2-input model
  RngState rng(600);
  Dataset toy = gen_toy_2d(rng, 12, 3);
  RngState mrng(601);
  Model m = init_params(mrng, Arch::linear, 2, {}, 3, false);
  std::string bpath = (tmp.path / "boundary.svg").string();
  emit_decision_boundary(m, toy, -3.0, 3.0, 20, bpath);
  CHECK(fs::exists(bpath));

  Model wide = init_params(mrng, Arch::linear, 5, {}, 3, false);
  CHECK_THROWS_AS(boundary_raster(wide, -1.0, 1.0, 4), DimensionError);
}
