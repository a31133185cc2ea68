#pragma once

#include <string>
#include <utility>
#include <vector>

#include "leaklab/model.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

struct MetricsRecord {
  double acc_T_star = 0.0;
  double acc_S_train = 0.0;
  double acc_S_test = 0.0;
  double acc_T_val = 0.0;
  double acc_S_val = 0.0;
  double acc_S_match_T = 0.0;
  double mse_train = 0.0;
  double mse_test = 0.0;
};

// argmax ties broken by lowest class index
Index argmax_row(const Matrix& Z, Index row);

double accuracy_logits(const Matrix& Z, const std::vector<int>& labels);
double accuracy(const Model& model, const Matrix& X, const std::vector<int>& labels);

// fraction of rows where student argmax equals teacher argmax
double match_accuracy(const Model& student, const Model& teacher, const Matrix& X);

// mean over samples of the squared logit-vector distance (summed over classes)
double logit_mse(const Model& student, const Model& teacher, const Matrix& X);
double logit_mse_vs(const Matrix& Z_student, const Matrix& Z_teacher);

enum class Regime {
  trivial_leakage,
  weak_leakage_memorizing,
  weak_leakage_nonmemorizing,
  full_recovery,
  teacher_fail_student_matches,
  teacher_fail_no_match,
};

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& s);

struct RegimeCutoffs {
  double fit = 0.99;   // memorization / full-recovery accuracy cutoff
  double weak = 0.55;  // weak-leakage test accuracy cutoff
  double mse = 0.1;    // teacher-matching logit MSE cutoff
};

Regime classify_regime(const MetricsRecord& rec, const RegimeCutoffs& cutoffs = {});

enum class CrossDirection { falling, rising };

struct ThresholdEstimate {
  std::string name;
  double alpha_star = 0.0;
  bool crossed = false;
  double rho = 0.0;
  double tau = 0.0;
  std::string criterion;
};

// Linear interpolation of the first crossing of `cutoff` along a curve of
// (alpha, metric) points sorted by alpha.
ThresholdEstimate estimate_threshold(const std::vector<std::pair<double, double>>& curve,
                                     double cutoff, CrossDirection direction);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
  int n = 0;
};

MeanSem mean_sem(const std::vector<double>& xs);

}  // namespace leaklab
