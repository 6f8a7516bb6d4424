#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stc/kernels.hpp"
#include "stc/privacy.hpp"
#include "stc/rng.hpp"
#include "stc/synthetic.hpp"

using namespace stc;

namespace {

// independent route: composite Simpson over the density
double simpson_mass(double lo, double hi, double mean, double sd) {
  const int n = 20000;  // even
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    double t = (x - mean) / sd;
    return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * M_PI));
  };
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

Histogram gaussian_histogram(double mean, double sd, int bins, double span_sd) {
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i)
    h.edges[i] = mean - span_sd * sd + 2.0 * span_sd * sd * i / bins;
  h.mass.resize(bins);
  double z = 0.0;
  for (int i = 0; i < bins; ++i) {
    h.mass[i] = gaussian_bin_mass(h.edges[i], h.edges[i + 1], mean, sd);
    z += h.mass[i];
  }
  for (double& m : h.mass) m /= z;
  return h;
}

// exhaustive best-bijection accuracy, k small
double brute_accuracy(const std::vector<int>& pred, const std::vector<int32_t>& truth, int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    int hit = 0;
    for (size_t i = 0; i < pred.size(); ++i)
      if (perm[pred[i]] == truth[i]) ++hit;
    best = std::max(best, static_cast<double>(hit));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("gaussian_bin_mass matches quadrature") {
  struct Case {
    double lo, hi, mean, sd;
  } cases[] = {
      {-1.0, 1.0, 0.0, 1.0},   {0.3, 2.7, 1.0, 0.8},     {-5.0, -2.0, 1.0, 2.0},
      {10.0, 14.0, 12.0, 0.5}, {100.0, 104.0, 90.0, 3.0},
  };
  for (const auto& c : cases) {
    double got = gaussian_bin_mass(c.lo, c.hi, c.mean, c.sd);
    double want = simpson_mass(c.lo, c.hi, c.mean, c.sd);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("gaussian_bin_mass: far tails positive, symmetric, partition sums to one") {
  // erfc route keeps relative accuracy where naive cdf differences cancel
  double tail = gaussian_bin_mass(8.0, 9.0, 0.0, 1.0);
  CHECK(tail > 0.0);
  CHECK(tail < 1e-14);
  double left = gaussian_bin_mass(-3.7, -1.2, 0.5, 1.3);
  double right = gaussian_bin_mass(2.0 * 0.5 + 1.2, 2.0 * 0.5 + 3.7, 0.5, 1.3);
  CHECK(left == doctest::Approx(right).epsilon(1e-14));

  double total = 0.0;
  const int bins = 400;
  for (int i = 0; i < bins; ++i) {
    double a = -20.0 + 40.0 * i / bins, b = -20.0 + 40.0 * (i + 1) / bins;
    total += gaussian_bin_mass(a, b, 0.0, 2.0);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_bin_mass(1.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("permutation_accuracy agrees with exhaustive search") {
  Rng rng(515);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(4));  // 2..5
    const int n = 30;
    std::vector<int> pred(n);
    std::vector<int32_t> truth(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(k));
      truth[i] = static_cast<int32_t>(rng.below(k));
    }
    // make sure every label appears so the index maps are k wide
    for (int c = 0; c < k; ++c) {
      pred[c] = c;
      truth[n - 1 - c] = c;
    }
    CHECK(permutation_accuracy(pred, truth) == doctest::Approx(brute_accuracy(pred, truth, k)));
  }
}

TEST_CASE("permutation_accuracy: naming-invariance and matching output") {
  std::vector<int> pred{7, 7, 2, 2, 2, 9};
  std::vector<int32_t> truth{1, 1, 0, 0, 0, 5};
  std::vector<int> matching;
  CHECK(permutation_accuracy(pred, truth, &matching) == doctest::Approx(1.0));
  // predicted labels sort to {2,7,9}; matched true labels follow the data
  CHECK(matching == std::vector<int>{0, 1, 5});
  CHECK_THROWS_AS(permutation_accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("distance_pdfs: shared edges, unit mass, parameter echo") {
  Matrix W = random_row_orthonormal(32, 48, 621);
  auto data = gen_clustered(3, 15, 48, 1.0, 0.05, 622);
  CodeMatrix codes = encode_columns(W, data.X, 5);
  DistancePDFs pdfs = distance_pdfs(codes, data.labels, 5, 3, 40);
  CHECK(pdfs.intra.edges == pdfs.inter.edges);
  CHECK(pdfs.intra.mass.size() == 40);
  double si = 0, se = 0;
  for (double m : pdfs.intra.mass) si += m;
  for (double m : pdfs.inter.mass) se += m;
  CHECK(si == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(se == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pdfs.alpha_x == doctest::Approx(5.0 / 32));
  CHECK(pdfs.beta_x == doctest::Approx(3.0 / 32));

  CHECK_THROWS_AS(distance_pdfs(codes, data.labels, 5, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(distance_pdfs(codes, data.labels, 30, 5, 10), std::invalid_argument);
  std::vector<int32_t> one_cluster(data.labels.size(), 0);
  CHECK_THROWS_AS(distance_pdfs(codes, one_cluster, 5, 3, 10), std::invalid_argument);
}

TEST_CASE("kld_leak: moment-matched Gaussian input scores ~zero") {
  DistancePDFs pdfs;
  pdfs.intra = gaussian_histogram(10.0, 2.0, 64, 8.0);
  pdfs.inter = pdfs.intra;
  pdfs.alpha_x = 0.3;
  LeakReport rep = kld_leak(pdfs, 0.01);
  CHECK(rep.kld >= -1e-12);
  CHECK(rep.kld < 1e-3);
  CHECK(rep.passed);
  CHECK(rep.gaussian_fit.mean == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("kld_leak: alpha one collapses to the intra divergence") {
  DistancePDFs pdfs;
  pdfs.intra = gaussian_histogram(4.0, 1.0, 48, 6.0);
  pdfs.inter = gaussian_histogram(9.0, 1.5, 48, 6.0);
  // force shared edges: rebin inter onto intra's axis by reusing edges
  pdfs.inter.edges = pdfs.intra.edges;
  pdfs.alpha_x = 1.0;
  LeakReport rep = kld_leak(pdfs, 1.0);
  CHECK(rep.kld == doctest::Approx(rep.kld_components).epsilon(1e-12));
  // with alpha = 1 the reference is fit to intra alone, so the leak is small
  CHECK(rep.kld < 1e-3);
}

TEST_CASE("kld_leak on real codes: dual accumulation routes agree") {
  Matrix W = random_row_orthonormal(64, 96, 301);
  auto data = gen_clustered(3, 40, 96, 1.0, 0.02, 302);
  CodeMatrix codes = encode_columns(W, data.X, 6);
  DistancePDFs pdfs = distance_pdfs(codes, data.labels, 6, 0, 25);
  LeakReport rep = kld_leak(pdfs, 0.5);
  CHECK(std::abs(rep.kld - rep.kld_components) < 1e-9);
  CHECK(rep.kld >= -1e-12);
  // mixture divergence can only be smaller (Jensen)
  CHECK(rep.kld_mixture <= rep.kld + 1e-12);
  CHECK_FALSE(rep.passed);  // clustered, unambiguized: leak well above 0.5
}

TEST_CASE("kld_leak frozen fixture") {
  Matrix W = random_row_orthonormal(64, 96, 301);
  auto data = gen_clustered(3, 40, 96, 1.0, 0.02, 302);
  CodeMatrix codes = encode_columns(W, data.X, 6);
  LeakReport rep = kld_leak(distance_pdfs(codes, data.labels, 6, 0, 25), 0.5);
  CHECK(rep.kld == doctest::Approx(2.30038579456967).epsilon(1e-12));
  CHECK(rep.gaussian_fit.mean == doctest::Approx(11.4725338942308).epsilon(1e-12));
  CHECK(rep.gaussian_fit.variance == doctest::Approx(8.73742480213644).epsilon(1e-12));
}

TEST_CASE("kld_leak: degenerate one-point distribution throws") {
  DistancePDFs pdfs;
  pdfs.intra.edges = {0.0, 1.0, 2.0};
  pdfs.intra.mass = {1.0, 0.0};
  pdfs.inter = pdfs.intra;
  pdfs.alpha_x = 0.5;
  CHECK_THROWS_WITH(kld_leak(pdfs, 1.0), "degenerate distribution");
}

TEST_CASE("kmeans_attack: recovers well-separated clusters, deterministic") {
  Matrix W = random_row_orthonormal(64, 96, 301);
  auto data = gen_clustered(3, 40, 96, 1.0, 0.02, 302);
  CodeMatrix codes = encode_columns(W, data.X, 6);
  ClusterAttackResult a = kmeans_attack(codes, 3, data.labels, 8, 404);
  CHECK(a.accuracy == doctest::Approx(1.0));
  CHECK(a.permutation == std::vector<int>{1, 0, 2});
  ClusterAttackResult b = kmeans_attack(codes, 3, data.labels, 8, 404);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.permutation == b.permutation);
}

TEST_CASE("kmeans_attack: edge cases") {
  Matrix W = random_row_orthonormal(16, 16, 711);
  auto data = gen_clustered(2, 5, 16, 1.0, 0.1, 712);
  CodeMatrix codes = encode_columns(W, data.X, 3);
  CHECK(kmeans_attack(codes, 1, data.labels, 4, 1).accuracy == doctest::Approx(1.0));
  CHECK_THROWS_AS(kmeans_attack(codes, 0, data.labels, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_attack(codes, 11, data.labels, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_attack(codes, 2, data.labels, 0, 1), std::invalid_argument);
  std::vector<int32_t> short_labels(3, 0);
  CHECK_THROWS_AS(kmeans_attack(codes, 2, short_labels, 4, 1), std::invalid_argument);
  double acc = kmeans_attack(codes, 2, data.labels, 4, 9).accuracy;
  CHECK(acc <= 1.0);
  CHECK(acc >= 0.5);  // best bijection on 2 clusters can't do worse than half
}

TEST_CASE("ratio_table: identical members, no noise, no decoys -> zero diagonal") {
  Matrix W = random_row_orthonormal(32, 48, 801);
  auto data = gen_clustered(3, 10, 48, 1.0, 0.0, 802);  // within_var 0: clones
  NoiseModel quiet{0.0};
  auto tab = ratio_table(data, W, 5, 5, quiet, {{0.0, 0.0}}, 4, 803);
  REQUIRE(tab.size() == 1);
  CHECK(tab[0].d_diag == doctest::Approx(0.0));
  CHECK(tab[0].d_off > 1.0);
  for (int i = 0; i < 3; ++i) CHECK(tab[0].means(i, i) == doctest::Approx(0.0));
}

TEST_CASE("ratio_table: full query disclosure makes the matrix symmetric") {
  Matrix W = random_row_orthonormal(32, 48, 811);
  auto data = gen_clustered(3, 12, 48, 1.0, 0.05, 812);
  NoiseModel noise{0.1};
  // S_y + S_ny = L: every position disclosed, so the cell no longer depends
  // on which cluster queried
  auto tab = ratio_table(data, W, 5, 5, noise, {{0.2, 27.0 / 32}}, 6, 813);
  REQUIRE(tab.size() == 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(tab[0].means(i, j) == doctest::Approx(tab[0].means(j, i)).epsilon(1e-9));
}

TEST_CASE("ratio_table: aggregates recompute from the matrix") {
  Matrix W = random_row_orthonormal(32, 48, 821);
  auto data = gen_clustered(4, 8, 48, 1.0, 0.05, 822);
  NoiseModel noise{0.05};
  auto tab = ratio_table(data, W, 5, 6, noise, {{0.1, 0.1}}, 3, 823);
  const auto& e = tab[0];
  double diag = 0, off = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      (i == j ? diag : off) += e.means(i, j);
  CHECK(e.d_diag == doctest::Approx(diag / 4).epsilon(1e-12));
  CHECK(e.d_off == doctest::Approx(off / 12).epsilon(1e-12));
  CHECK(e.ratio == doctest::Approx(e.d_off / e.d_diag).epsilon(1e-12));
  CHECK(e.S_ns == 3);
  CHECK(e.S_ny == 3);
}

TEST_CASE("ratio_table: oversized decoy budget is an error") {
  Matrix W = random_row_orthonormal(32, 48, 831);
  auto data = gen_clustered(2, 6, 48, 1.0, 0.05, 832);
  NoiseModel noise{0.0};
  CHECK_THROWS_WITH(ratio_table(data, W, 5, 10, noise, {{0.0, 0.9}}, 2, 833),
                    "query overflow");
  std::vector<int32_t> mono(data.labels.size(), 0);
  FeatureMatrix solo{data.X, mono};
  CHECK_THROWS_AS(ratio_table(solo, W, 5, 5, noise, {{0.0, 0.0}}, 2, 833),
                  std::invalid_argument);
}

TEST_CASE("ratio_table frozen fixture") {
  Matrix W = random_row_orthonormal(64, 96, 301);
  auto data = gen_clustered(3, 40, 96, 1.0, 0.02, 302);
  NoiseModel noise{0.1};
  std::vector<RatioSetting> st = {{6.0 / 64, 6.0 / 64}, {6.0 / 64, 20.0 / 64},
                                  {58.0 / 64, 58.0 / 64}};
  auto tab = ratio_table(data, W, 6, 6, noise, st, 8, 303);
  REQUIRE(tab.size() == 3);
  CHECK(tab[0].S_ns == 6);
  CHECK(tab[0].S_ny == 6);
  CHECK(tab[0].d_diag == doctest::Approx(1.6484509784544).epsilon(1e-12));
  CHECK(tab[0].d_off == doctest::Approx(2.6403546313684).epsilon(1e-12));
  CHECK(tab[0].means(0, 1) == doctest::Approx(2.5946158193459).epsilon(1e-12));
  CHECK(tab[1].S_ny == 20);
  CHECK(tab[1].d_diag == doctest::Approx(2.44963320063336).epsilon(1e-12));
  CHECK(tab[1].ratio == doctest::Approx(1.41697349633442).epsilon(1e-12));
  CHECK(tab[2].d_diag == doctest::Approx(10.8866770389836).epsilon(1e-12));
  CHECK(tab[2].d_off == doctest::Approx(11.3309893814652).epsilon(1e-12));
  // heavier two-sided ambiguization flattens the contrast
  CHECK(tab[2].ratio < tab[0].ratio);
}

TEST_CASE("ratio_table: serial and parallel identical") {
  Matrix W = random_row_orthonormal(32, 48, 841);
  auto data = gen_clustered(3, 10, 48, 1.0, 0.05, 842);
  NoiseModel noise{0.1};
  std::vector<RatioSetting> st = {{0.1, 0.2}};
  auto s = ratio_table(data, W, 5, 6, noise, st, 4, 843, Exec::serial);
  auto p = ratio_table(data, W, 5, 6, noise, st, 4, 843, Exec::parallel);
  CHECK(s[0].means == p[0].means);
  CHECK(s[0].d_diag == p[0].d_diag);
}

TEST_CASE("kmeans_attack and distance_pdfs: serial and parallel identical") {
  Matrix W = random_row_orthonormal(32, 48, 851);
  auto data = gen_clustered(3, 12, 48, 1.0, 0.05, 852);
  CodeMatrix codes = encode_columns(W, data.X, 5);
  auto ks = kmeans_attack(codes, 3, data.labels, 6, 853, 300, Exec::serial);
  auto kp = kmeans_attack(codes, 3, data.labels, 6, 853, 300, Exec::parallel);
  CHECK(ks.accuracy == kp.accuracy);
  CHECK(ks.permutation == kp.permutation);
  auto ps = distance_pdfs(codes, data.labels, 5, 2, 30, Exec::serial);
  auto pp = distance_pdfs(codes, data.labels, 5, 2, 30, Exec::parallel);
  CHECK(ps.intra.mass == pp.intra.mass);
  CHECK(ps.inter.mass == pp.inter.mass);
}
