#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace stc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Ternary codes stored dense, one column per item, entries in {-1, 0, +1}.
using CodeMatrix = Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Execution policy for the batch kernels. The serial path is a separate
// plain-loop reference implementation kept for testing; both paths must
// produce bit-identical results.
enum class Exec { serial, parallel };

// Enrollment vectors (one per column) with per-vector cluster labels.
struct FeatureMatrix {
  Matrix X;                     // N x M
  std::vector<int32_t> labels;  // size M
};

struct NoiseModel {
  double sigma_z_sq = 0.0;  // per-coordinate query noise variance, >= 0
  double sigma_x_sq = 1.0;  // per-coordinate data variance, > 0
};

// Closed interval for squared distances between two ternary codes of given
// sparsities, plus the inner-product magnitude cap.
struct DistanceBound {
  int lower = 0;
  int upper = 0;
  int dot_cap = 0;
};

}  // namespace stc
