#pragma once

#include <string>
#include <vector>

#include "leaklab/model.hpp"
#include "leaklab/rng.hpp"
#include "leaklab/types.hpp"

namespace leaklab {

struct Transform {
  enum class Kind { none, shuffled_within_class, smallest_k_zeroed, class_column_zeroed };
  Kind kind = Kind::none;
  int k = 0;    // smallest_k_zeroed
  int cls = 0;  // class_column_zeroed

  std::string tag() const;
  static Transform parse(const std::string& s);  // none | shuffle | topk:K | zerocol:C
};

struct SoftLabelSet {
  Matrix probs;  // n x c
  double tau = 1.0;
  Transform transform;
};

// exp((z_k - max z) / tau), normalized
Vector softmax_with_temperature(const Vector& z, double tau);
Matrix softmax_rows(const Matrix& Z, double tau);

SoftLabelSet make_soft_labels(const Model& teacher, const Matrix& X, double tau);

// Uniformly random permutation of rows that fixes ground-truth class
// membership: sample mu receives a soft label from some sample of the same
// class. labels[i] is the ground-truth class of row i.
SoftLabelSet shuffle_within_class(RngState& rng, const SoftLabelSet& soft,
                                  const std::vector<int>& labels);

// Per row, zero the k smallest entries (ties broken by lower class index);
// no renormalization.
SoftLabelSet ablate_smallest_k(const SoftLabelSet& soft, int k);

// Zero entry `cls` in every row whose ground-truth label differs from cls.
SoftLabelSet zero_class_column(const SoftLabelSet& soft, int cls,
                               const std::vector<int>& labels);

SoftLabelSet apply_transform(RngState& rng, const SoftLabelSet& soft, const Transform& t,
                             const std::vector<int>& labels);

}  // namespace leaklab
