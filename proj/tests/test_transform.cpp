#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

#include "stc/rng.hpp"
#include "stc/synthetic.hpp"
#include "stc/transform.hpp"

using namespace stc;

namespace {

// Independent SVD oracle: one-sided Jacobi (Hestenes). Rotates column pairs of
// a working copy until all columns are mutually orthogonal; the normalized
// columns are then the left singular vectors. Shares no code with the library.
Matrix jacobi_left_singular_vectors(const Matrix& K) {
  const int n = static_cast<int>(K.rows());
  Matrix B = K;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double alpha = B.col(p).squaredNorm();
        double beta = B.col(q).squaredNorm();
        double gamma = B.col(p).dot(B.col(q));
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        if (gamma == 0.0) continue;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double cs = 1.0 / std::sqrt(1.0 + t * t);
        double sn = cs * t;
        Vector bp = B.col(p), bq = B.col(q);
        B.col(p) = cs * bp - sn * bq;
        B.col(q) = sn * bp + cs * bq;
      }
    if (off < 1e-15) break;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) sv[j] = B.col(j).norm();
  std::sort(order.begin(), order.end(), [&](int a, int b) { return sv[a] > sv[b]; });
  Matrix U(n, n);
  for (int j = 0; j < n; ++j) U.col(j) = B.col(order[j]) / sv[order[j]];
  // same sign convention as the library: largest-magnitude entry positive
  for (int j = 0; j < n; ++j) {
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(U(i, j)) > std::abs(U(arg, j))) arg = i;
    if (U(arg, j) < 0) U.col(j) = -U.col(j);
  }
  return U;
}

struct Planted {
  Matrix X;   // N x M
  Matrix Q;   // L x N, planted transform
  Matrix A0;  // L x M, exactly S-sparse columns
};

Planted make_planted(int L, int N, int M, int S, uint64_t seed) {
  Rng rng(seed);
  Matrix A0 = Matrix::Zero(L, M);
  std::vector<int> pos(L);
  for (int m = 0; m < M; ++m) {
    std::iota(pos.begin(), pos.end(), 0);
    for (int s = 0; s < S; ++s) {
      int r = s + static_cast<int>(rng.below(L - s));
      std::swap(pos[s], pos[r]);
      A0(pos[s], m) = rng.coin_sign() * (0.5 + rng.unit());
    }
  }
  Matrix Q = random_row_orthonormal(L, N, seed + 1);
  return Planted{Q.transpose() * A0, Q, A0};
}

}  // namespace

TEST_CASE("init_transform identity and orthogonal keys") {
  KeyMatrix id{Matrix::Identity(5, 5)};
  Matrix W0 = init_transform(id);
  CHECK((W0 - Matrix::Identity(5, 5)).norm() < 1e-12);

  Matrix Q = random_row_orthonormal(6, 6, 17);
  Matrix W1 = init_transform(KeyMatrix{Q});
  CHECK((W1 * W1.transpose() - Matrix::Identity(6, 6)).norm() < 1e-9);
}

TEST_CASE("init_transform matches an independent svd oracle") {
  KeyMatrix key = key_from_seed(8, 42);
  Matrix got = init_transform(key);
  Matrix want = jacobi_left_singular_vectors(key.K);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("init_transform rejects a rank-deficient key") {
  Matrix K = Matrix::Zero(4, 4);
  K(0, 0) = 1;
  K(1, 1) = 1;
  K(2, 2) = 1;  // last singular value 0
  CHECK_THROWS_WITH(init_transform(KeyMatrix{K}), "degenerate key");
}

TEST_CASE("sparse_code_step keeps top magnitudes with values") {
  Matrix W = Matrix::Identity(4, 4);
  Matrix X(4, 1);
  X << 3, -1, 0.5, -4;
  Matrix A = sparse_code_step(W, X, 2);
  Matrix want(4, 1);
  want << 3, 0, 0, -4;
  CHECK(A == want);

  // S = L keeps everything, S = 0 zeroes everything
  CHECK(sparse_code_step(W, X, 4) == W * X);
  CHECK(sparse_code_step(W, X, 0).isZero(0.0));
}

TEST_CASE("sparse_code_step breaks magnitude ties toward the lower index") {
  Matrix W = Matrix::Identity(4, 4);
  Matrix X(4, 1);
  X << -2, 5, 2, 1;  // |x0| == |x2|, keep index 0
  Matrix A = sparse_code_step(W, X, 2);
  CHECK(A(0, 0) == -2);
  CHECK(A(1, 0) == 5);
  CHECK(A(2, 0) == 0);
  CHECK(A(3, 0) == 0);
}

TEST_CASE("sparse_code_step serial and parallel agree bit for bit") {
  Matrix W = random_row_orthonormal(16, 16, 3);
  Matrix X = gaussian_matrix(16, 40, 4);
  Matrix As = sparse_code_step(W, X, 5, Exec::serial);
  Matrix Ap = sparse_code_step(W, X, 5, Exec::parallel);
  CHECK(As == Ap);
}

TEST_CASE("transform_update identity and exact-rotation cases") {
  Matrix X = gaussian_matrix(5, 20, 9);
  CHECK((transform_update(X, X) - Matrix::Identity(5, 5)).norm() < 1e-9);

  Matrix Q = random_row_orthonormal(5, 5, 10);
  Matrix W = transform_update(X, Q * X);
  CHECK((W - Q).norm() < 1e-9);
  CHECK((W * X - Q * X).norm() < 1e-9);

  CHECK_THROWS_WITH(transform_update(X, Matrix::Zero(5, 20)), "degenerate update");
}

TEST_CASE("transform_update beats 1000 random orthogonal matrices") {
  Matrix X = gaussian_matrix(4, 6, 31);
  Matrix A = sparse_code_step(Matrix::Identity(4, 4), gaussian_matrix(4, 6, 32), 2);
  Matrix W = transform_update(X, A);
  CHECK((W * W.transpose() - Matrix::Identity(4, 4)).norm() < 1e-9);
  double best = (W * X - A).squaredNorm();
  for (uint64_t s = 0; s < 1000; ++s) {
    Matrix R = random_row_orthonormal(4, 4, 1000 + s);
    CHECK((R * X - A).squaredNorm() >= best - 1e-9);
  }
}

TEST_CASE("transform_update rejects non-square systems") {
  // the closed form is only the minimizer for square orthogonal W
  CHECK_THROWS(transform_update(gaussian_matrix(6, 10, 2), gaussian_matrix(4, 10, 3)));
  CHECK_THROWS(transform_update(gaussian_matrix(4, 10, 2), gaussian_matrix(6, 10, 3)));
  CHECK_THROWS(transform_update(gaussian_matrix(4, 10, 2), gaussian_matrix(4, 9, 3)));
}

TEST_CASE("learn_transform solves a planted instance") {
  auto p = make_planted(16, 16, 160, 3, 77);
  KeyMatrix key = key_from_seed(16, 5);
  LearnOptions opts;
  opts.max_iters = 50;
  opts.rel_tol = 1e-14;
  auto t = learn_transform(p.X, key, 3, opts);
  Matrix A = sparse_code_step(t.W, p.X, 3);
  CHECK((t.W * p.X - A).norm() < 1e-6);
}

TEST_CASE("learn_transform trace contract and monotonicity") {
  auto fm = gen_clustered(4, 30, 12, 1.0, 0.05, 13);
  KeyMatrix key = key_from_seed(12, 6);

  LearnOptions one;
  one.max_iters = 1;
  auto t1 = learn_transform(fm.X, key, 4, one);
  CHECK(t1.objective_trace.size() == 2);
  CHECK(t1.iterations == 1);

  LearnOptions opts;
  opts.max_iters = 40;
  opts.rel_tol = 1e-10;
  auto t = learn_transform(fm.X, key, 4, opts);
  REQUIRE(t.objective_trace.size() >= 2);
  for (size_t i = 1; i < t.objective_trace.size(); ++i)
    CHECK(t.objective_trace[i] <= t.objective_trace[i - 1] + 1e-12);
  CHECK((t.W * t.W.transpose() - Matrix::Identity(12, 12)).norm() < 1e-9);
  // square case: columns orthonormal too, so transform inverts by transpose
  CHECK((t.W.transpose() * t.W - Matrix::Identity(12, 12)).norm() < 1e-9);
  Vector x = gaussian_matrix(12, 1, 50).col(0);
  CHECK((t.W.transpose() * (t.W * x) - x).norm() < 1e-9);
}

TEST_CASE("learn_transform is deterministic and key sensitive") {
  auto fm = gen_clustered(3, 20, 10, 1.0, 0.05, 19);
  KeyMatrix key = key_from_seed(10, 8);
  auto a = learn_transform(fm.X, key, 3);
  auto b = learn_transform(fm.X, key, 3);
  CHECK(a.W == b.W);
  CHECK(a.objective_trace == b.objective_trace);

  KeyMatrix other = key_from_seed(10, 9);
  auto c = learn_transform(fm.X, other, 3);
  CHECK((a.W - c.W).norm() > 1e-6);
}

TEST_CASE("transform persistence roundtrip preserves every bit") {
  auto fm = gen_clustered(3, 15, 9, 1.0, 0.05, 23);
  KeyMatrix key = key_from_seed(9, 12);
  auto t = learn_transform(fm.X, key, 3);
  const std::string path = "transform_roundtrip.bin";
  save_transform(t, path);

  // fixed layout: magic(4) + version(2) + dims(8) + entries + key id(16)
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  REQUIRE(is.good());
  CHECK(static_cast<long>(is.tellg()) == 4 + 2 + 8 + 9 * 9 * 8 + 16);

  auto r = load_transform(path);
  CHECK(r.W == t.W);
  CHECK(r.key_id == t.key_id);
  std::remove(path.c_str());
}

TEST_CASE("load_transform rejects foreign and truncated files") {
  const std::string path = "transform_bad.bin";
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE garbage";
  }
  CHECK_THROWS(load_transform(path));
  {
    std::ofstream os(path, std::ios::binary);
    os.write("STCW", 4);
    char v[2] = {1, 0};
    os.write(v, 2);
  }
  CHECK_THROWS(load_transform(path));
  std::remove(path.c_str());
  CHECK_THROWS(load_transform("no_such_file.bin"));
}

TEST_CASE("key fingerprint distinguishes keys and is stable") {
  KeyMatrix a = key_from_seed(6, 1);
  KeyMatrix b = key_from_seed(6, 2);
  CHECK(key_fingerprint(a.K) == key_fingerprint(a.K));
  CHECK(key_fingerprint(a.K) != key_fingerprint(b.K));
}
