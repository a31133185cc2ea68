#include "leaklab/dataset.hpp"

#include <algorithm>
#include <numeric>

namespace leaklab {

const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::random_iid: return "random_iid";
    case DatasetKind::modular_addition: return "modular_addition";
    case DatasetKind::toy2d: return "toy2d";
  }
  return "?";
}

DatasetKind dataset_kind_from_name(const std::string& s) {
  if (s == "random_iid") return DatasetKind::random_iid;
  if (s == "modular_addition") return DatasetKind::modular_addition;
  if (s == "toy2d") return DatasetKind::toy2d;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

Dataset sample_random_dataset(RngState& rng, Index n, Index d, int c) {
  Dataset ds;
  // independent streams for inputs and labels
  RngState xrng = rng.fork(1);
  RngState yrng = rng.fork(2);
  ds.inputs = gaussian_matrix(xrng, n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (auto& y : ds.labels) y = static_cast<int>(yrng.uniform_int(static_cast<std::uint64_t>(c)));
  ds.c = c;
  ds.kind = DatasetKind::random_iid;
  ds.seed = rng.key();
  return ds;
}

Dataset gen_modular_addition(int p) {
  Dataset ds;
  Index n = static_cast<Index>(p) * p;
  Index d = 3 * static_cast<Index>(p);
  ds.inputs = Matrix::Zero(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      Index row = static_cast<Index>(a) * p + b;
      ds.inputs(row, a) = 1.0;
      ds.inputs(row, p + b) = 1.0;
      ds.inputs(row, 2 * p) = 1.0;  // constant third token
      ds.labels[static_cast<std::size_t>(row)] = (a + b) % p;
    }
  }
  ds.c = p;
  ds.kind = DatasetKind::modular_addition;
  return ds;
}

Dataset gen_toy_2d(RngState& rng, Index n, int c) {
  Dataset ds = sample_random_dataset(rng, n, 2, c);
  ds.kind = DatasetKind::toy2d;
  return ds;
}

Partition make_partition(RngState& rng, const Dataset& data, double teacher_frac, double rho) {
  const Index n = data.n();
  const Index n_teacher = static_cast<Index>(std::floor(teacher_frac * static_cast<double>(n)));
  const Index n_train = round_count(rho * static_cast<double>(n_teacher));
  const Index n_test = n_teacher - n_train;
  if (n_teacher < 1 || n_train < 1 || n_test < 1)
    throw InvalidSplit("make_partition: empty teacher/train/test set");

  IndexSet perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  rng.shuffle(perm);

  Partition part;
  part.teacher_frac = teacher_frac;
  part.rho = rho;
  part.teacher_idx.assign(perm.begin(), perm.begin() + n_teacher);
  // reshuffled so the train/test split is independent of the teacher draw order
  IndexSet within(part.teacher_idx);
  rng.shuffle(within);
  part.student_train_idx.assign(within.begin(), within.begin() + n_train);
  part.student_test_idx.assign(within.begin() + n_train, within.end());

  if (n_teacher < n) {
    part.val_idx.assign(perm.begin() + n_teacher, perm.end());
  } else if (data.kind == DatasetKind::modular_addition) {
    throw InvalidSplit("make_partition: no validation rows left for a finite dataset");
  } else {
    RngState vrng = rng.fork(3);
    part.val_data = data.kind == DatasetKind::toy2d
                        ? gen_toy_2d(vrng, n_test, data.c)
                        : sample_random_dataset(vrng, n_test, data.d(), data.c);
  }

  std::sort(part.teacher_idx.begin(), part.teacher_idx.end());
  std::sort(part.student_train_idx.begin(), part.student_train_idx.end());
  std::sort(part.student_test_idx.begin(), part.student_test_idx.end());
  std::sort(part.val_idx.begin(), part.val_idx.end());
  return part;
}

Matrix take_rows(const Matrix& m, const IndexSet& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

std::vector<int> take_labels(const std::vector<int>& labels, const IndexSet& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[static_cast<std::size_t>(idx[i])];
  return out;
}

}  // namespace leaklab
