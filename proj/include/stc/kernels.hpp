#pragma once
#include <cstdint>
#include <vector>

#include "stc/types.hpp"

namespace stc {

// Batch primitives behind the pipeline and the analysis experiments. Every
// routine takes an Exec policy: Exec::parallel runs the OpenMP path,
// Exec::serial a plain-loop reference. The two are bit-identical by
// construction (per-column work is independent and reductions are summed in
// fixed index order), which the test suite checks.

// column m = ternary code of X.col(m): sign of the top-S magnitudes of W x
CodeMatrix encode_columns(const Matrix& W, const Matrix& X, int S, Exec exec = Exec::parallel);

// per-column ambiguization; column m uses seed base_seed ^ m. Throws
// "ambiguization overflow" if any column lacks room.
CodeMatrix ambiguize_columns(const CodeMatrix& codes, int S_ns, uint64_t base_seed,
                             Exec exec = Exec::parallel);

// squared Euclidean distance from probe to every column
std::vector<int> sqdist_to_all(const CodeMatrix& db, const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>& probe,
                               Exec exec = Exec::parallel);

// Euclidean distance from probe to every column, both restricted to positions
Vector restricted_distances(const CodeMatrix& db, const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>& probe,
                            const std::vector<int>& positions, Exec exec = Exec::parallel);

// all-pairs squared distances (i < j, lexicographic), split by label equality
struct PairDistances {
  std::vector<int> intra;
  std::vector<int> inter;
};
PairDistances pairwise_sqdist_by_label(const CodeMatrix& codes, const std::vector<int32_t>& labels,
                                       Exec exec = Exec::parallel);

// one Lloyd assignment sweep: nearest centroid per column (ties to the lower
// centroid index); fills assign, returns the summed squared error
double assign_to_centroids(const Matrix& points, const Matrix& centroids, std::vector<int>& assign,
                           Exec exec = Exec::parallel);

}  // namespace stc
