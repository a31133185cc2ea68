#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaklab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};
struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct DivergedTraining : std::runtime_error {
  explicit DivergedTraining(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidSplit : std::runtime_error {
  explicit InvalidSplit(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidCurve : std::runtime_error {
  explicit InvalidCurve(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// round-half-up used for all fraction-of-count splits
inline Index round_count(double x) { return static_cast<Index>(std::floor(x + 0.5)); }

}  // namespace leaklab
