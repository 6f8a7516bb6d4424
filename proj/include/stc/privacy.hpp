#pragma once
#include <cstdint>
#include <vector>

#include "stc/types.hpp"

namespace stc {

struct Histogram {
  std::vector<double> edges;  // bins + 1, shared between intra and inter
  std::vector<double> mass;   // bins, sums to 1
};

// Pairwise squared-distance histograms of the public codes, split by cluster
// label. alpha_x = S_x/L doubles as the mixture weight of the leak measure.
struct DistancePDFs {
  Histogram intra;
  Histogram inter;
  double alpha_x = 0.0;
  double beta_x = 0.0;
};

struct GaussianFit {
  double mean = 0.0;
  double variance = 0.0;
};

// The leak is measured against a moment-matched Gaussian reference P2:
//   kld = alpha_x D(intra || P2) + (1 - alpha_x) D(inter || P2)
// computed in one pass; kld_components is the same quantity assembled from
// the two component divergences and must agree to 1e-9. kld_mixture is
// D(mixture || P2), kept as a diagnostic (it is smaller by the mean
// component-to-mixture divergence). Natural log throughout.
struct LeakReport {
  double kld = 0.0;
  double kld_components = 0.0;
  double kld_mixture = 0.0;
  double delta = 0.0;
  bool passed = false;
  GaussianFit gaussian_fit;
};

struct ClusterAttackResult {
  double accuracy = 0.0;
  int k = 0;
  std::vector<int> permutation;  // predicted cluster -> matched true label
};

// One row of the disclosure table: database ambiguization beta_x against
// query-side decoy rate beta_y.
struct RatioSetting {
  double beta_x = 0.0;
  double beta_y = 0.0;
};

struct RatioEntry {
  double beta_x = 0.0;
  double beta_y = 0.0;
  int S_ns = 0;
  int S_ny = 0;
  Matrix means;  // k x k, rows = query's cluster, cols = database cluster
  double d_diag = 0.0;
  double d_off = 0.0;
  double ratio = 0.0;  // d_off / d_diag
};

// Mass a N(mean, sd^2) Gaussian puts on [lo, hi], erfc-based so far tails
// keep relative accuracy.
double gaussian_bin_mass(double lo, double hi, double mean, double sd);

DistancePDFs distance_pdfs(const CodeMatrix& codes, const std::vector<int32_t>& labels, int S_x,
                           int S_ns, int bins = 200, Exec exec = Exec::parallel);

LeakReport kld_leak(const DistancePDFs& pdfs, double delta);

// Best-bijection agreement between two labelings (Hungarian assignment on the
// contingency table). Optionally reports the matching per predicted cluster.
double permutation_accuracy(const std::vector<int>& predicted, const std::vector<int32_t>& truth,
                            std::vector<int>* matching = nullptr);

// Lloyd's k-means on the public codes as real vectors, best SSE over
// restarts, all restarts fed by one seeded stream. Empty clusters are
// re-seeded with the point farthest from its assigned centroid. k = 1 scores
// 1 by definition.
ClusterAttackResult kmeans_attack(const CodeMatrix& codes, int k,
                                  const std::vector<int32_t>& true_labels, int restarts,
                                  uint64_t seed, int max_iters = 300, Exec exec = Exec::parallel);

// The curious server's view. For seeded noisy queries drawn from cluster i,
// cell (i, j) is the RMS distance over all pairs of stored public codes
// (one from cluster i, one from cluster j) restricted to the positions the
// query disclosed (support of the noisy probe plus S_ny decoys), averaged
// over queries. Rows are the querying cluster; diagonal cells skip
// self-pairs. d_diag / d_off average the diagonal / off-diagonal cells.
std::vector<RatioEntry> ratio_table(const FeatureMatrix& data, const Matrix& W, int S_x, int S_y,
                                    const NoiseModel& noise,
                                    const std::vector<RatioSetting>& settings,
                                    int queries_per_cluster, uint64_t seed,
                                    Exec exec = Exec::parallel);

}  // namespace stc
