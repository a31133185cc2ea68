#pragma once

#include <optional>
#include <vector>

#include "leaklab/linalg.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

enum class DatasetKind { random_iid, modular_addition, toy2d };

const char* dataset_kind_name(DatasetKind k);
DatasetKind dataset_kind_from_name(const std::string& s);

struct Dataset {
  Matrix inputs;            // n x d
  std::vector<int> labels;  // n entries in [0, c)
  int c = 0;
  DatasetKind kind = DatasetKind::random_iid;
  std::uint64_t seed = 0;

  Index n() const { return inputs.rows(); }
  Index d() const { return inputs.cols(); }
};

struct Partition {
  IndexSet teacher_idx;
  IndexSet student_train_idx;  // subset of teacher_idx
  IndexSet student_test_idx;   // teacher_idx minus student_train_idx
  IndexSet val_idx;            // into the base dataset; empty when val_data is set
  std::optional<Dataset> val_data;  // fresh sample (random_iid-style validation)
  double teacher_frac = 1.0;
  double rho = 0.5;
};

Dataset sample_random_dataset(RngState& rng, Index n, Index d, int c);

// All p^2 pairs (a, b); row index a*p + b; inputs are three one-hot blocks
// of width p (a, b, and a constant third token); label (a + b) mod p.
Dataset gen_modular_addition(int p);

Dataset gen_toy_2d(RngState& rng, Index n, int c);

// Uniform split without replacement. |teacher| = floor(teacher_frac * n),
// |student_train| = round(rho * |teacher|). Validation: complement of the
// teacher set when one exists, otherwise (i.i.d.-generable kinds at
// teacher_frac = 1) a fresh sample of size |student_test|.
Partition make_partition(RngState& rng, const Dataset& data, double teacher_frac, double rho);

// row / label gathers
Matrix take_rows(const Matrix& m, const IndexSet& idx);
std::vector<int> take_labels(const std::vector<int>& labels, const IndexSet& idx);

}  // namespace leaklab
