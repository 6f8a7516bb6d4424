#include "stc/synthetic.hpp"

#include <stdexcept>

#include "stc/rng.hpp"

namespace stc {

FeatureMatrix gen_clustered(int k, int per_cluster, int n_dim, double center_var,
                            double within_var, uint64_t seed) {
  if (k < 1 || per_cluster < 1 || n_dim < 1)
    throw std::invalid_argument("gen_clustered: bad shape");
  if (center_var < 0 || within_var < 0)
    throw std::invalid_argument("gen_clustered: negative variance");

  Rng rng(seed);
  Matrix centers(n_dim, k);
  double cs = std::sqrt(center_var);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n_dim; ++i) centers(i, c) = cs * rng.gaussian();

  FeatureMatrix out;
  out.X.resize(n_dim, static_cast<Eigen::Index>(k) * per_cluster);
  out.labels.resize(static_cast<size_t>(k) * per_cluster);
  double ws = std::sqrt(within_var);
  Eigen::Index m = 0;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < per_cluster; ++j, ++m) {
      for (int i = 0; i < n_dim; ++i)
        out.X(i, m) = centers(i, c) + ws * rng.gaussian();
      out.labels[static_cast<size_t>(m)] = c;
    }
  }
  return out;
}

Matrix gaussian_matrix(int rows, int cols, uint64_t seed) {
  Rng rng(seed);
  Matrix A(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) A(i, j) = rng.gaussian();
  return A;
}

Matrix random_row_orthonormal(int rows, int cols, uint64_t seed) {
  if (rows > cols)
    throw std::invalid_argument("random_row_orthonormal: rows > cols");
  // QR of a cols x rows Gaussian; thin Q has orthonormal columns.
  Matrix G = gaussian_matrix(cols, rows, seed);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(cols, rows);
  // Fix each column's sign so the draw is canonical (largest entry positive).
  for (int j = 0; j < rows; ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < cols; ++i) {
      double a = std::abs(Q(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (Q(arg, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q.transpose();
}

Vector point_at_distance(const Vector& x, double r, Rng& rng) {
  Vector u(x.size());
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.gaussian();
    norm = u.norm();
  } while (norm == 0.0);
  return x + (r / norm) * u;
}

}  // namespace stc
