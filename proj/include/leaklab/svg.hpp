#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leaklab/dataset.hpp"
#include "leaklab/metrics.hpp"
#include "leaklab/sweep.hpp"

namespace leaklab {

// Seed-averaged heatmap over a rectangular (x_axis, y_axis) grid taken from
// the store. axis names: alpha | rho | tau. Missing grid cells render as
// hatched; metric "regime" uses the six-regime palette, anything else the
// continuous colormap clipped to [lo, hi].
void emit_heatmap(const ResultStore& store, const std::string& metric,
                  const std::string& x_axis, const std::string& y_axis,
                  const std::string& path,
                  std::optional<double> tau_filter = std::nullopt,
                  std::optional<double> rho_filter = std::nullopt);

// Argmax-class raster for a 2-input model with the dataset points overlaid
// (circle = correctly classified, cross = misclassified).
void emit_decision_boundary(const Model& model, const Dataset& data, double lo, double hi,
                            int resolution, const std::string& path);

// class raster only, used to diff teacher vs student boundaries
std::vector<int> boundary_raster(const Model& model, double lo, double hi, int resolution);

}  // namespace leaklab
