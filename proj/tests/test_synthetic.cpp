#include <doctest.h>

#include "stc/rng.hpp"
#include "stc/synthetic.hpp"

using namespace stc;

TEST_CASE("rng draws are deterministic and in range") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.raw() == b.raw());
  }
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    double u = c.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    uint64_t v = c.below(17);
    CHECK(v < 17);
    int s = c.coin_sign();
    CHECK((s == 1 || s == -1));
  }
}

TEST_CASE("rng gaussian has roughly standard moments") {
  Rng r(99);
  const int n = 20000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    double g = r.gaussian();
    sum += g;
    sum2 += g * g;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("gen_clustered shapes, labels and determinism") {
  auto fm = gen_clustered(4, 25, 16, 1.0, 0.01, 7);
  CHECK(fm.X.rows() == 16);
  CHECK(fm.X.cols() == 100);
  REQUIRE(fm.labels.size() == 100);
  for (int m = 0; m < 100; ++m) CHECK(fm.labels[m] == m / 25);

  auto fm2 = gen_clustered(4, 25, 16, 1.0, 0.01, 7);
  CHECK(fm.X == fm2.X);
  auto fm3 = gen_clustered(4, 25, 16, 1.0, 0.01, 8);
  CHECK(fm.X != fm3.X);

  CHECK_THROWS(gen_clustered(0, 25, 16, 1.0, 0.01, 7));
  CHECK_THROWS(gen_clustered(4, 0, 16, 1.0, 0.01, 7));
  CHECK_THROWS(gen_clustered(4, 25, 16, -1.0, 0.01, 7));
}

TEST_CASE("cluster members stay near their center") {
  // within-variance far below center variance: intra distances should be
  // much smaller than inter distances
  auto fm = gen_clustered(3, 10, 32, 1.0, 1e-6, 21);
  double intra_max = 0, inter_min = 1e300;
  for (int a = 0; a < 30; ++a)
    for (int b = a + 1; b < 30; ++b) {
      double d = (fm.X.col(a) - fm.X.col(b)).norm();
      if (fm.labels[a] == fm.labels[b])
        intra_max = std::max(intra_max, d);
      else
        inter_min = std::min(inter_min, d);
    }
  CHECK(intra_max < inter_min);
}

TEST_CASE("random_row_orthonormal has orthonormal rows") {
  for (auto [r, c] : {std::pair{4, 8}, std::pair{8, 8}, std::pair{3, 5}}) {
    Matrix Q = random_row_orthonormal(r, c, 11);
    Matrix G = Q * Q.transpose();
    CHECK((G - Matrix::Identity(r, r)).norm() < 1e-12);
  }
  Matrix A = random_row_orthonormal(4, 8, 1);
  Matrix B = random_row_orthonormal(4, 8, 1);
  CHECK(A == B);
  Matrix C = random_row_orthonormal(4, 8, 2);
  CHECK((A - C).norm() > 1e-6);
  CHECK_THROWS(random_row_orthonormal(9, 8, 1));
}

TEST_CASE("point_at_distance hits the requested radius") {
  Rng r(3);
  Vector x(6);
  x << 1, -2, 0.5, 3, 0, -1;
  for (double rad : {0.0, 0.5, 4.0}) {
    Vector y = point_at_distance(x, rad, r);
    CHECK((y - x).norm() == doctest::Approx(rad).epsilon(1e-12));
  }
}
