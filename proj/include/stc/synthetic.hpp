#pragma once

#include <cstdint>

#include "stc/types.hpp"

namespace stc {

// k Gaussian clusters: centers ~ N(0, center_var I), members = center + N(0,
// within_var I). Column-major, cluster-contiguous, deterministic in seed.
FeatureMatrix gen_clustered(int k, int per_cluster, int n_dim, double center_var,
                            double within_var, uint64_t seed);

// i.i.d. N(0, 1) matrix, deterministic in seed.
Matrix gaussian_matrix(int rows, int cols, uint64_t seed);

// Matrix with orthonormal rows (rows <= cols), from Householder QR of a seeded
// Gaussian draw. Deterministic in seed.
Matrix random_row_orthonormal(int rows, int cols, uint64_t seed);

// Uniform direction scaled to length r, added to x.
Vector point_at_distance(const Vector& x, double r, class Rng& rng);

}  // namespace stc
