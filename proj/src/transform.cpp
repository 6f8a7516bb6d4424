#include "stc/transform.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "stc/rng.hpp"

namespace stc {

KeyMatrix key_from_seed(int n_dim, uint64_t seed) {
  Rng rng(seed);
  Matrix K(n_dim, n_dim);
  for (int j = 0; j < n_dim; ++j)
    for (int i = 0; i < n_dim; ++i) K(i, j) = rng.gaussian();
  return KeyMatrix{std::move(K)};
}

std::array<uint8_t, 16> key_fingerprint(const Matrix& K) {
  // Two FNV-1a 64 streams with distinct offset bases over the raw bytes.
  const uint64_t prime = 1099511628211ull;
  uint64_t h1 = 14695981039346656037ull;
  uint64_t h2 = 0x6c62272e07bb0142ull;
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
      uint64_t bits;
      double v = K(i, j);
      std::memcpy(&bits, &v, 8);
      for (int b = 0; b < 8; ++b) {
        uint8_t byte = static_cast<uint8_t>(bits >> (8 * b));
        h1 = (h1 ^ byte) * prime;
        h2 = (h2 ^ byte) * prime;
      }
    }
  }
  std::array<uint8_t, 16> id{};
  for (int b = 0; b < 8; ++b) {
    id[b] = static_cast<uint8_t>(h1 >> (8 * b));
    id[8 + b] = static_cast<uint8_t>(h2 >> (8 * b));
  }
  return id;
}

static void canonicalize_columns(Matrix& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      double a = std::abs(U(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (U(arg, j) < 0) U.col(j) = -U.col(j);
  }
}

Matrix init_transform(const KeyMatrix& key) {
  if (key.K.rows() != key.K.cols() || key.K.rows() == 0)
    throw std::invalid_argument("init_transform: key must be square");
  Eigen::BDCSVD<Matrix> svd(key.K, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0))
    throw std::runtime_error("degenerate key");
  Matrix U = svd.matrixU();
  canonicalize_columns(U);
  return U;
}

// Keep the S largest |f| entries of one column; ties keep the lower index.
static void threshold_column(const double* f, double* out, int L, int S,
                             std::vector<int>& idx) {
  idx.resize(L);
  std::iota(idx.begin(), idx.end(), 0);
  auto cmp = [f](int a, int b) {
    double fa = std::abs(f[a]), fb = std::abs(f[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  };
  if (S < L) {
    std::nth_element(idx.begin(), idx.begin() + S, idx.end(), cmp);
  }
  std::fill(out, out + L, 0.0);
  for (int r = 0; r < std::min(S, L); ++r) out[idx[r]] = f[idx[r]];
}

Matrix sparse_code_step(const Matrix& W, const Matrix& X, int S, Exec exec) {
  if (W.cols() != X.rows()) throw std::invalid_argument("sparse_code_step: dimension mismatch");
  if (S < 0) throw std::invalid_argument("sparse_code_step: negative sparsity");
  const int L = static_cast<int>(W.rows());
  const Eigen::Index M = X.cols();
  Matrix F = W * X;
  Matrix A(L, M);
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<int> idx;
#pragma omp for schedule(static)
      for (Eigen::Index m = 0; m < M; ++m)
        threshold_column(F.col(m).data(), A.col(m).data(), L, S, idx);
    }
  } else {
    std::vector<int> idx;
    for (Eigen::Index m = 0; m < M; ++m)
      threshold_column(F.col(m).data(), A.col(m).data(), L, S, idx);
  }
  return A;
}

Matrix transform_update(const Matrix& X, const Matrix& A) {
  if (X.cols() != A.cols()) throw std::invalid_argument("transform_update: dimension mismatch");
  // The closed form W = UV' minimizes ||WX - A|| only when tr(W XX' W') is
  // invariant, i.e. for square orthogonal W. Rectangular transforms are
  // generated, never learned.
  if (A.rows() != X.rows())
    throw std::invalid_argument("transform_update: transform must be square");
  Matrix P = A * X.transpose();
  if (P.isZero(0.0)) throw std::runtime_error("degenerate update");
  Eigen::BDCSVD<Matrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double coding_objective(const Matrix& W, const Matrix& X, const Matrix& A) {
  // Columnwise partials summed in index order so the value is independent of
  // the parallel schedule.
  const Eigen::Index M = X.cols();
  std::vector<double> part(static_cast<size_t>(M));
  Matrix R = W * X - A;
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < M; ++m) part[static_cast<size_t>(m)] = R.col(m).squaredNorm();
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

SparsifyingTransform learn_transform(const Matrix& X, const KeyMatrix& key, int S_x,
                                     const LearnOptions& opts) {
  if (X.rows() != key.K.rows())
    throw std::invalid_argument("learn_transform: key and data dimension mismatch");
  SparsifyingTransform t;
  t.W = init_transform(key);
  t.key_id = key_fingerprint(key.K);
  Matrix A = sparse_code_step(t.W, X, S_x, opts.exec);
  double obj = coding_objective(t.W, X, A);
  t.objective_trace.push_back(obj);
  for (int it = 0; it < opts.max_iters; ++it) {
    t.W = transform_update(X, A);
    A = sparse_code_step(t.W, X, S_x, opts.exec);
    double next = coding_objective(t.W, X, A);
    t.objective_trace.push_back(next);
    t.iterations = it + 1;
    if (obj == 0.0 || obj - next <= opts.rel_tol * obj) {
      t.converged = true;
      break;
    }
    obj = next;
  }
  return t;
}

static void put_u16(std::ostream& os, uint16_t v) {
  uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}
static void put_u32(std::ostream& os, uint32_t v) {
  uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 4);
}
static uint16_t get_u16(std::istream& is) {
  uint8_t b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}
static uint32_t get_u32(std::istream& is) {
  uint8_t b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void save_transform(const SparsifyingTransform& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_transform: cannot open " + path);
  os.write("STCW", 4);
  put_u16(os, 1);
  put_u32(os, static_cast<uint32_t>(t.W.rows()));
  put_u32(os, static_cast<uint32_t>(t.W.cols()));
  for (Eigen::Index i = 0; i < t.W.rows(); ++i)
    for (Eigen::Index j = 0; j < t.W.cols(); ++j) {
      double v = t.W(i, j);
      uint64_t bits;
      std::memcpy(&bits, &v, 8);
      uint8_t b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<uint8_t>(bits >> (8 * k));
      os.write(reinterpret_cast<char*>(b), 8);
    }
  os.write(reinterpret_cast<const char*>(t.key_id.data()), 16);
  if (!os) throw std::runtime_error("save_transform: write failed");
}

SparsifyingTransform load_transform(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_transform: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "STCW", 4) != 0)
    throw std::runtime_error("load_transform: bad magic");
  uint16_t ver = get_u16(is);
  if (ver != 1) throw std::runtime_error("load_transform: unsupported version");
  uint32_t L = get_u32(is), N = get_u32(is);
  SparsifyingTransform t;
  t.W.resize(L, N);
  for (uint32_t i = 0; i < L; ++i)
    for (uint32_t j = 0; j < N; ++j) {
      uint8_t b[8];
      is.read(reinterpret_cast<char*>(b), 8);
      uint64_t bits = 0;
      for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(b[k]) << (8 * k);
      double v;
      std::memcpy(&v, &bits, 8);
      t.W(i, j) = v;
    }
  is.read(reinterpret_cast<char*>(t.key_id.data()), 16);
  if (!is) throw std::runtime_error("load_transform: truncated file");
  return t;
}

}  // namespace stc
