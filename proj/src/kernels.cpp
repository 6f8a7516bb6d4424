#include "stc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stc/ambiguization.hpp"
#include "stc/coding.hpp"
#include "stc/rng.hpp"

namespace stc {

namespace {

void encode_one(const double* f, int8_t* out, int L, int S, std::vector<int>& idx) {
  idx.resize(L);
  std::iota(idx.begin(), idx.end(), 0);
  auto cmp = [f](int a, int b) {
    double fa = std::abs(f[a]), fb = std::abs(f[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  };
  if (S < L) std::nth_element(idx.begin(), idx.begin() + S, idx.end(), cmp);
  std::fill(out, out + L, int8_t{0});
  for (int r = 0; r < std::min(S, L); ++r) {
    double v = f[idx[r]];
    out[idx[r]] = v > 0 ? int8_t{1} : (v < 0 ? int8_t{-1} : int8_t{0});
  }
}

void ambiguize_one(const int8_t* in, int8_t* out, int L, int S_ns, uint64_t seed, bool& overflow) {
  std::vector<int> zeros;
  zeros.reserve(L);
  for (int i = 0; i < L; ++i) {
    out[i] = in[i];
    if (in[i] == 0) zeros.push_back(i);
  }
  if (S_ns > static_cast<int>(zeros.size())) {
    overflow = true;
    return;
  }
  Rng rng(seed);
  const int n = static_cast<int>(zeros.size());
  for (int s = 0; s < S_ns; ++s) {
    int r = s + static_cast<int>(rng.below(static_cast<uint64_t>(n - s)));
    std::swap(zeros[s], zeros[r]);
    out[zeros[s]] = static_cast<int8_t>(rng.coin_sign());
  }
}

}  // namespace

CodeMatrix encode_columns(const Matrix& W, const Matrix& X, int S, Exec exec) {
  if (W.cols() != X.rows()) throw std::invalid_argument("encode_columns: dimension mismatch");
  if (S < 0) throw std::invalid_argument("encode_columns: negative sparsity");
  const int L = static_cast<int>(W.rows());
  const Eigen::Index M = X.cols();
  Matrix F = W * X;
  CodeMatrix C(L, M);
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<int> idx;
#pragma omp for schedule(static)
      for (Eigen::Index m = 0; m < M; ++m)
        encode_one(F.col(m).data(), C.col(m).data(), L, S, idx);
    }
  } else {
    std::vector<int> idx;
    for (Eigen::Index m = 0; m < M; ++m)
      encode_one(F.col(m).data(), C.col(m).data(), L, S, idx);
  }
  return C;
}

CodeMatrix ambiguize_columns(const CodeMatrix& codes, int S_ns, uint64_t base_seed, Exec exec) {
  if (S_ns < 0) throw std::invalid_argument("ambiguize_columns: negative noise count");
  const int L = static_cast<int>(codes.rows());
  const Eigen::Index M = codes.cols();
  CodeMatrix out(L, M);
  bool overflow = false;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < M; ++m) {
      bool of = false;
      ambiguize_one(codes.col(m).data(), out.col(m).data(), L, S_ns,
                    base_seed ^ static_cast<uint64_t>(m), of);
      if (of) {
#pragma omp atomic write
        overflow = true;
      }
    }
  } else {
    for (Eigen::Index m = 0; m < M; ++m)
      ambiguize_one(codes.col(m).data(), out.col(m).data(), L, S_ns,
                    base_seed ^ static_cast<uint64_t>(m), overflow);
  }
  if (overflow) throw std::runtime_error("ambiguization overflow");
  return out;
}

std::vector<int> sqdist_to_all(const CodeMatrix& db,
                               const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>& probe, Exec exec) {
  if (db.rows() != probe.size()) throw std::invalid_argument("sqdist_to_all: dimension mismatch");
  const int L = static_cast<int>(db.rows());
  const Eigen::Index M = db.cols();
  std::vector<int> out(static_cast<size_t>(M));
  auto one = [&](Eigen::Index m) {
    const int8_t* c = db.col(m).data();
    int acc = 0;
    for (int i = 0; i < L; ++i) {
      int d = static_cast<int>(c[i]) - static_cast<int>(probe[i]);
      acc += d * d;
    }
    out[static_cast<size_t>(m)] = acc;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  } else {
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  }
  return out;
}

Vector restricted_distances(const CodeMatrix& db,
                            const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>& probe,
                            const std::vector<int>& positions, Exec exec) {
  if (db.rows() != probe.size())
    throw std::invalid_argument("restricted_distances: dimension mismatch");
  for (int l : positions)
    if (l < 0 || l >= db.rows()) throw std::out_of_range("restricted_distances: bad position");
  const Eigen::Index M = db.cols();
  Vector out(M);
  auto one = [&](Eigen::Index m) {
    const int8_t* c = db.col(m).data();
    int acc = 0;
    for (int l : positions) {
      int d = static_cast<int>(c[l]) - static_cast<int>(probe[l]);
      acc += d * d;
    }
    out[m] = std::sqrt(static_cast<double>(acc));
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  } else {
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  }
  return out;
}

PairDistances pairwise_sqdist_by_label(const CodeMatrix& codes, const std::vector<int32_t>& labels,
                                       Exec exec) {
  const Eigen::Index M = codes.cols();
  if (static_cast<Eigen::Index>(labels.size()) != M)
    throw std::invalid_argument("pairwise_sqdist_by_label: label count mismatch");
  const int L = static_cast<int>(codes.rows());
  const size_t pairs = static_cast<size_t>(M) * (M - 1) / 2;
  std::vector<int> flat(pairs);
  // pairs (i, j), i < j, laid out lexicographically; row i starts after the
  // (M-1) + (M-2) + ... pairs of earlier rows
  auto row = [&](Eigen::Index i) {
    size_t base = static_cast<size_t>(i) * (M - 1) - static_cast<size_t>(i) * (i - 1) / 2;
    const int8_t* a = codes.col(i).data();
    for (Eigen::Index j = i + 1; j < M; ++j) {
      const int8_t* b = codes.col(j).data();
      int acc = 0;
      for (int l = 0; l < L; ++l) {
        int d = static_cast<int>(a[l]) - static_cast<int>(b[l]);
        acc += d * d;
      }
      flat[base + static_cast<size_t>(j - i - 1)] = acc;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < M - 1; ++i) row(i);
  } else {
    for (Eigen::Index i = 0; i < M - 1; ++i) row(i);
  }
  PairDistances out;
  size_t t = 0;
  for (Eigen::Index i = 0; i < M - 1; ++i)
    for (Eigen::Index j = i + 1; j < M; ++j, ++t) {
      if (labels[i] == labels[j])
        out.intra.push_back(flat[t]);
      else
        out.inter.push_back(flat[t]);
    }
  return out;
}

double assign_to_centroids(const Matrix& points, const Matrix& centroids, std::vector<int>& assign,
                           Exec exec) {
  if (points.rows() != centroids.rows())
    throw std::invalid_argument("assign_to_centroids: dimension mismatch");
  const Eigen::Index M = points.cols();
  const Eigen::Index k = centroids.cols();
  assign.resize(static_cast<size_t>(M));
  std::vector<double> err(static_cast<size_t>(M));
  auto one = [&](Eigen::Index m) {
    int best = 0;
    double bd = (points.col(m) - centroids.col(0)).squaredNorm();
    for (Eigen::Index c = 1; c < k; ++c) {
      double d = (points.col(m) - centroids.col(c)).squaredNorm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(c);
      }
    }
    assign[static_cast<size_t>(m)] = best;
    err[static_cast<size_t>(m)] = bd;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  } else {
    for (Eigen::Index m = 0; m < M; ++m) one(m);
  }
  double sse = 0.0;
  for (double e : err) sse += e;
  return sse;
}

}  // namespace stc
