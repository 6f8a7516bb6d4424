#include "stc/privacy.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "stc/ambiguization.hpp"
#include "stc/coding.hpp"
#include "stc/kernels.hpp"
#include "stc/rng.hpp"

namespace stc {

double gaussian_bin_mass(double lo, double hi, double mean, double sd) {
  if (hi < lo) throw std::invalid_argument("gaussian_bin_mass: empty interval");
  const double s = sd * std::sqrt(2.0);
  double m;
  if (0.5 * (lo + hi) >= mean)
    m = 0.5 * (std::erfc((lo - mean) / s) - std::erfc((hi - mean) / s));
  else
    m = 0.5 * (std::erfc((mean - hi) / s) - std::erfc((mean - lo) / s));
  return m > 0.0 ? m : 0.0;
}

namespace {

Histogram bin_counts(const std::vector<int>& values, const std::vector<double>& edges) {
  Histogram h;
  h.edges = edges;
  const int bins = static_cast<int>(edges.size()) - 1;
  h.mass.assign(bins, 0.0);
  const double lo = edges.front(), hi = edges.back();
  const double width = (hi - lo) / bins;
  for (int v : values) {
    int b = static_cast<int>((v - lo) / width);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    h.mass[b] += 1.0;
  }
  for (double& m : h.mass) m /= static_cast<double>(values.size());
  return h;
}

}  // namespace

DistancePDFs distance_pdfs(const CodeMatrix& codes, const std::vector<int32_t>& labels, int S_x,
                           int S_ns, int bins, Exec exec) {
  const int L = static_cast<int>(codes.rows());
  if (bins < 1) throw std::invalid_argument("distance_pdfs: bins must be positive");
  if (S_x < 0 || S_ns < 0 || S_x + S_ns > L)
    throw std::invalid_argument("distance_pdfs: sparsity out of range");
  PairDistances pairs = pairwise_sqdist_by_label(codes, labels, exec);
  if (pairs.inter.empty()) throw std::invalid_argument("distance_pdfs: need at least two clusters");
  if (pairs.intra.empty()) throw std::invalid_argument("distance_pdfs: no intra-cluster pairs");

  int lo = pairs.intra.front(), hi = lo;
  for (const auto* v : {&pairs.intra, &pairs.inter})
    for (int d : *v) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  std::vector<double> edges(bins + 1);
  double a = lo, b = hi;
  if (a == b) {
    a -= 0.5;
    b += 0.5;
  }
  for (int i = 0; i <= bins; ++i) edges[i] = a + (b - a) * i / bins;

  DistancePDFs out;
  out.intra = bin_counts(pairs.intra, edges);
  out.inter = bin_counts(pairs.inter, edges);
  out.alpha_x = static_cast<double>(S_x) / L;
  out.beta_x = static_cast<double>(S_ns) / L;
  return out;
}

LeakReport kld_leak(const DistancePDFs& pdfs, double delta) {
  const auto& edges = pdfs.intra.edges;
  if (edges != pdfs.inter.edges) throw std::invalid_argument("kld_leak: histograms share no bins");
  const int bins = static_cast<int>(pdfs.intra.mass.size());
  const double alpha = pdfs.alpha_x;

  std::vector<double> center(bins), p1(bins);
  double mu = 0.0;
  for (int i = 0; i < bins; ++i) {
    center[i] = 0.5 * (edges[i] + edges[i + 1]);
    p1[i] = alpha * pdfs.intra.mass[i] + (1.0 - alpha) * pdfs.inter.mass[i];
    mu += p1[i] * center[i];
  }
  double var = 0.0;
  for (int i = 0; i < bins; ++i) var += p1[i] * (center[i] - mu) * (center[i] - mu);
  if (!(var > 1e-30)) throw std::runtime_error("degenerate distribution");
  const double sd = std::sqrt(var);

  std::vector<double> p2(bins);
  double z = 0.0;
  for (int i = 0; i < bins; ++i) {
    p2[i] = gaussian_bin_mass(edges[i], edges[i + 1], mu, sd);
    z += p2[i];
  }
  if (!(z > 0.0)) throw std::runtime_error("degenerate distribution");
  for (int i = 0; i < bins; ++i) {
    p2[i] /= z;
    if (p2[i] < DBL_MIN) p2[i] = DBL_MIN;
  }

  LeakReport rep;
  rep.delta = delta;
  rep.gaussian_fit = {mu, var};
  double d_intra = 0.0, d_inter = 0.0;
  for (int i = 0; i < bins; ++i) {
    double qa = pdfs.intra.mass[i], qb = pdfs.inter.mass[i];
    if (qa > 0.0) d_intra += qa * std::log(qa / p2[i]);
    if (qb > 0.0) d_inter += qb * std::log(qb / p2[i]);
    double t = 0.0;
    if (qa > 0.0) t += alpha * qa * std::log(qa / p2[i]);
    if (qb > 0.0) t += (1.0 - alpha) * qb * std::log(qb / p2[i]);
    rep.kld += t;
    if (p1[i] > 0.0) rep.kld_mixture += p1[i] * std::log(p1[i] / p2[i]);
  }
  rep.kld_components = alpha * d_intra + (1.0 - alpha) * d_inter;
  rep.passed = rep.kld <= delta;
  return rep;
}

namespace {

// Hungarian assignment maximizing the matched counts; square matrix,
// potentials + shortest augmenting paths.
std::vector<int> max_assignment(const std::vector<std::vector<double>>& gain) {
  const int n = static_cast<int>(gain.size());
  double top = 0.0;
  for (const auto& row : gain)
    for (double g : row) top = std::max(top, g);
  // minimize cost = top - gain
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double d = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          double cur = (top - gain[i0 - 1][j - 1]) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < d) {
            d = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j)
        if (used[j]) {
          u[p[j]] += d;
          v[j] -= d;
        } else
          minv[j] -= d;
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

double permutation_accuracy(const std::vector<int>& predicted, const std::vector<int32_t>& truth,
                            std::vector<int>* matching) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("permutation_accuracy: size mismatch");
  std::map<int, int> pred_ix, true_ix;
  for (int p : predicted) pred_ix.emplace(p, 0);
  for (int32_t t : truth) true_ix.emplace(t, 0);
  int np = 0, nt = 0;
  for (auto& [key, ix] : pred_ix) ix = np++;
  for (auto& [key, ix] : true_ix) ix = nt++;
  const int n = std::max(np, nt);
  std::vector<std::vector<double>> gain(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < predicted.size(); ++i)
    gain[pred_ix[predicted[i]]][true_ix[truth[i]]] += 1.0;

  std::vector<int> pred_to_true = max_assignment(gain);
  double matched = 0.0;
  for (int p = 0; p < n; ++p)
    if (pred_to_true[p] >= 0) matched += gain[p][pred_to_true[p]];
  if (matching) {
    matching->assign(np, -1);
    std::vector<int> true_keys(nt);
    for (auto& [key, ix] : true_ix) true_keys[ix] = key;
    for (int p = 0; p < np; ++p)
      if (pred_to_true[p] >= 0 && pred_to_true[p] < nt) (*matching)[p] = true_keys[pred_to_true[p]];
  }
  return matched / static_cast<double>(predicted.size());
}

ClusterAttackResult kmeans_attack(const CodeMatrix& codes, int k,
                                  const std::vector<int32_t>& true_labels, int restarts,
                                  uint64_t seed, int max_iters, Exec exec) {
  const int M = static_cast<int>(codes.cols());
  if (k < 1) throw std::invalid_argument("kmeans_attack: k must be positive");
  if (static_cast<size_t>(M) != true_labels.size())
    throw std::invalid_argument("kmeans_attack: label count mismatch");
  if (k == 1) return {1.0, 1, {true_labels.empty() ? 0 : true_labels[0]}};
  if (k > M) throw std::invalid_argument("kmeans_attack: more clusters than points");
  if (restarts < 1) throw std::invalid_argument("kmeans_attack: need a restart");

  Matrix points = codes.cast<double>();
  const int N = static_cast<int>(points.rows());
  Rng rng(seed);

  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  std::vector<int> pick(M);
  for (int r = 0; r < restarts; ++r) {
    for (int i = 0; i < M; ++i) pick[i] = i;
    Matrix centroids(N, k);
    for (int c = 0; c < k; ++c) {
      int j = c + static_cast<int>(rng.below(static_cast<uint64_t>(M - c)));
      std::swap(pick[c], pick[j]);
      centroids.col(c) = points.col(pick[c]);
    }
    std::vector<int> assign(M, -1), prev;
    double sse = 0.0;
    for (int it = 0; it < max_iters; ++it) {
      prev = assign;
      sse = assign_to_centroids(points, centroids, assign, exec);
      if (assign == prev) break;
      Matrix sums = Matrix::Zero(N, k);
      std::vector<int> count(k, 0);
      for (int m = 0; m < M; ++m) {
        sums.col(assign[m]) += points.col(m);
        ++count[assign[m]];
      }
      std::vector<char> moved(M, 0);
      for (int c = 0; c < k; ++c) {
        if (count[c] > 0) {
          centroids.col(c) = sums.col(c) / count[c];
        } else {
          // farthest point from its assigned centroid restarts the cluster
          int far = -1;
          double far_d = -1.0;
          for (int m = 0; m < M; ++m) {
            if (moved[m] || count[assign[m]] <= 1) continue;
            double d = (points.col(m) - centroids.col(assign[m])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = m;
            }
          }
          if (far >= 0) {
            --count[assign[far]];
            ++count[c];
            centroids.col(c) = points.col(far);
            moved[far] = 1;
          }
        }
      }
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_assign = assign;
    }
  }

  ClusterAttackResult res;
  res.k = k;
  res.accuracy = permutation_accuracy(best_assign, true_labels, &res.permutation);
  return res;
}

std::vector<RatioEntry> ratio_table(const FeatureMatrix& data, const Matrix& W, int S_x, int S_y,
                                    const NoiseModel& noise,
                                    const std::vector<RatioSetting>& settings,
                                    int queries_per_cluster, uint64_t seed, Exec exec) {
  const int L = static_cast<int>(W.rows());
  const int N = static_cast<int>(W.cols());
  const int M = static_cast<int>(data.X.cols());
  if (data.X.rows() != N) throw std::invalid_argument("ratio_table: dimension mismatch");
  if (queries_per_cluster < 1) throw std::invalid_argument("ratio_table: need queries");

  std::map<int32_t, std::vector<int>> by_label;
  for (int m = 0; m < M; ++m) by_label[data.labels[m]].push_back(m);
  const int k = static_cast<int>(by_label.size());
  if (k < 2) throw std::invalid_argument("ratio_table: need at least two clusters");
  for (const auto& [lbl, members] : by_label)
    if (members.size() < 2)
      throw std::invalid_argument("ratio_table: need at least two items per cluster");
  std::map<int32_t, int> label_ix;
  int next = 0;
  for (const auto& [lbl, members] : by_label) label_ix[lbl] = next++;

  const CodeMatrix base = encode_columns(W, data.X, S_x, exec);
  const double sz = std::sqrt(noise.sigma_z_sq);
  std::vector<double> cluster_size(k, 0.0);
  for (const auto& [lbl, members] : by_label)
    cluster_size[label_ix[lbl]] = static_cast<double>(members.size());

  std::vector<RatioEntry> out;
  out.reserve(settings.size());
  for (size_t si = 0; si < settings.size(); ++si) {
    const auto& st = settings[si];
    RatioEntry e;
    e.beta_x = st.beta_x;
    e.beta_y = st.beta_y;
    e.S_ns = static_cast<int>(std::lround(st.beta_x * L));
    e.S_ny = static_cast<int>(std::lround(st.beta_y * L));
    if (S_y + e.S_ny > L) throw std::runtime_error("query overflow");

    CodeMatrix public_codes =
        ambiguize_columns(base, e.S_ns, seed + 7919 * (si + 1), exec);

    // Per-position sign census of the stored codes, split by cluster. Every
    // pairwise sum below reads only these marginals, so a query costs
    // O(|I| k) instead of touching all M columns.
    Matrix plus = Matrix::Zero(L, k), minus = Matrix::Zero(L, k);
    for (int m = 0; m < M; ++m) {
      const int c = label_ix[data.labels[m]];
      for (int l = 0; l < L; ++l) {
        const int8_t v = public_codes(l, m);
        if (v > 0)
          plus(l, c) += 1.0;
        else if (v < 0)
          minus(l, c) += 1.0;
      }
    }

    Matrix sums = Matrix::Zero(k, k);
    Matrix counts = Matrix::Zero(k, k);
    Rng rng(seed + 0x9E3779B97F4A7C15ull * (si + 1));

    std::vector<int> complement;
    for (const auto& [lbl, members] : by_label) {
      const int qi = label_ix[lbl];
      for (int q = 0; q < queries_per_cluster; ++q) {
        const int m = members[rng.below(members.size())];
        Vector y = data.X.col(m);
        for (int j = 0; j < N; ++j) y[j] += sz * rng.gaussian();
        TernaryCode b = ternary_encode(W, y, S_y);

        std::vector<int> positions = b.support;
        complement.clear();
        for (int l = 0; l < L; ++l)
          if (b.values[l] == 0) complement.push_back(l);
        const int n = static_cast<int>(complement.size());
        for (int s = 0; s < e.S_ny && s < n; ++s) {
          int r = s + static_cast<int>(rng.below(static_cast<uint64_t>(n - s)));
          std::swap(complement[s], complement[r]);
          positions.push_back(complement[s]);
        }
        std::sort(positions.begin(), positions.end());

        // Sum of squared distances over all ordered pairs (a in cluster qi,
        // b in cluster cj) restricted to the disclosed positions, from the
        // sign marginals: opposite signs contribute 4, sign against zero 1.
        const double ni = cluster_size[qi];
        for (int cj = 0; cj < k; ++cj) {
          const double nj = cluster_size[cj];
          double s2 = 0.0;
          for (int l : positions) {
            const double pi = plus(l, qi), mi = minus(l, qi), zi = ni - pi - mi;
            const double pj = plus(l, cj), mj = minus(l, cj), zj = nj - pj - mj;
            s2 += pi * zj + zi * pj + mi * zj + zi * mj + 4.0 * (pi * mj + mi * pj);
          }
          // same-cluster cells skip the zero-distance self pairs
          const double pairs = ni * nj - (qi == cj ? ni : 0.0);
          sums(qi, cj) += s2 / pairs;
          counts(qi, cj) += 1.0;
        }
      }
    }

    // root-mean-square over pairs and queries
    e.means = (sums.array() / counts.array()).sqrt();
    double diag = 0.0, off = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        (i == j ? diag : off) += e.means(i, j);
    e.d_diag = diag / k;
    e.d_off = off / (static_cast<double>(k) * k - k);
    e.ratio = e.d_off / e.d_diag;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace stc
