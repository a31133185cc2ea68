#pragma once

#include <optional>
#include <vector>

#include "leaklab/model.hpp"
#include "leaklab/softlabels.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

struct TrainConfig {
  int steps = 10000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  // early stop once train accuracy is 1 and mean CE drops below this
  double stop_loss = 1e-4;
  bool early_stop = true;
  int record_every = 100;
  bool bias = true;
};

struct TracePoint {
  int step = 0;
  double loss = 0.0;  // mean CE over the training rows
  double acc_train = 0.0;
  double acc_test = -1.0;  // -1 when no evaluation set was attached
  double acc_val = -1.0;
  double loss_test = -1.0;
};

// optional held-out rows evaluated along the trace
struct EvalSets {
  const Matrix* X_test = nullptr;
  const std::vector<int>* y_test = nullptr;
  const Matrix* X_val = nullptr;
  const std::vector<int>* y_val = nullptr;
};

struct TrainResult {
  Model model;
  std::vector<TracePoint> trace;
  int steps_run = 0;
};

// Full-batch Adam on one-hot CE at tau = 1.
TrainResult train_teacher(RngState& rng, const Matrix& X, const std::vector<int>& labels,
                          int c, Arch arch, const std::vector<Index>& hidden,
                          const TrainConfig& cfg, const EvalSets& eval = {});

// Full-batch Adam on the soft-label CE at the set's own tau. acc_train in
// the trace is measured against the ground-truth labels y_train.
TrainResult train_student(RngState& rng, const Matrix& X, const SoftLabelSet& soft,
                          const std::vector<int>& y_train, int c, Arch arch,
                          const std::vector<Index>& hidden, const TrainConfig& cfg,
                          const EvalSets& eval = {});

// Closed-form linear student: min-norm least squares of teacher logits per
// class column.
Model pinv_student(const Matrix& X_train, const Matrix& teacher_logits,
                   double rank_tol = 1e-10);

}  // namespace leaklab
