#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leaklab/dataset.hpp"
#include "leaklab/metrics.hpp"
#include "leaklab/serialize.hpp"
#include "leaklab/train.hpp"

namespace leaklab {

struct DatasetSpec {
  DatasetKind kind = DatasetKind::random_iid;
  Index d = 100;
  int c = 2;
  int p = 0;  // modular_addition modulus
};

struct ArchSpec {
  Arch arch = Arch::linear;
  std::vector<Index> hidden;
  bool bias = true;
};

enum class AlphaUnits { n_over_d, n_over_dc };

struct SweepConfig {
  DatasetSpec dataset;
  std::vector<double> alpha_grid{1.0};
  std::vector<double> rho_grid{0.8};
  std::vector<double> tau_grid{1.0};
  AlphaUnits alpha_units = AlphaUnits::n_over_d;
  double teacher_frac = 1.0;
  ArchSpec teacher_arch;
  ArchSpec student_arch;
  TrainConfig teacher_train;
  TrainConfig student_train;
  std::string mode = "ce";  // ce | pinv
  Transform transform;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  RegimeCutoffs cutoffs;
  bool record_traces = false;
  std::string output_dir = "out";

  static SweepConfig from_json(const json& j);
  json to_json() const;
  std::uint64_t hash() const;

  // sample count at a grid point (ignored for modular_addition)
  Index n_for_alpha(double alpha) const;
};

struct CellCoords {
  double alpha = 1.0;
  double rho = 0.8;
  double tau = 1.0;
  std::uint64_t seed = 0;
};

struct CellResult {
  CellCoords coords;
  std::uint64_t key = 0;
  bool failed = false;
  std::string error;
  Index n = 0, d = 0, n_train = 0, n_test = 0;
  int c = 0;
  MetricsRecord metrics;
  Regime regime = Regime::trivial_leakage;
  double duration_s = 0.0;
  std::vector<TracePoint> student_trace;
};

std::uint64_t cell_key(const SweepConfig& cfg, const CellCoords& coords);

CellResult run_cell(const SweepConfig& cfg, const CellCoords& coords);

struct ResultStore {
  std::vector<CellResult> cells;

  void append(const CellResult& cell);  // rejects duplicate keys with differing payloads
  void save_csv(const std::string& path) const;
  static ResultStore load_csv(const std::string& path);
  static const char* csv_header();
};

// Runs all grid x seed cells on a bounded worker pool, appending to
// output_dir/cells.csv as results arrive. Cells already present in an
// existing store are skipped, so interrupted sweeps resume.
ResultStore run_sweep(const SweepConfig& cfg, int workers = 0, bool verbose = false);

int default_worker_count();  // LEAKLAB_WORKERS env var, else hardware concurrency

}  // namespace leaklab
