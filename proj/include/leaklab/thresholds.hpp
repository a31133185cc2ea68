#pragma once

#include <optional>
#include <string>

#include "leaklab/sweep.hpp"

namespace leaklab {

struct ThresholdSummary {
  std::string name;
  std::string metric;
  double cutoff = 0.0;
  CrossDirection direction = CrossDirection::falling;
  MeanSem alpha;           // over seeds whose curve crossed
  std::vector<double> per_seed;
  int n_seeds = 0;
  int n_crossed = 0;
};

// Per-seed crossing of `metric` vs alpha, then mean +- standard error over
// the seeds that crossed. rho/tau filters select one slice of the store.
ThresholdSummary threshold_over_seeds(const ResultStore& store, const std::string& metric,
                                      double cutoff, CrossDirection direction,
                                      std::optional<double> rho = std::nullopt,
                                      std::optional<double> tau = std::nullopt);

// Named-threshold conventions: alpha_T_label / alpha_S_label /
// alpha_S_shuffle_label are falling accuracy crossings at `fit`;
// alpha_S_id falls through the mse cutoff in pinv mode and rises through
// `fit` on acc_S_match_T for CE-trained students.
ThresholdSummary named_threshold(const ResultStore& store, const std::string& name,
                                 const std::string& mode, const RegimeCutoffs& cutoffs,
                                 std::optional<double> rho = std::nullopt,
                                 std::optional<double> tau = std::nullopt);

}  // namespace leaklab
