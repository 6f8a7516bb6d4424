#include "stc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stc/rng.hpp"

namespace stc {

Vector hard_threshold(const Vector& f, int S) {
  const int L = static_cast<int>(f.size());
  if (S < 0) throw std::invalid_argument("hard_threshold: negative sparsity");
  if (S >= L) return f;
  std::vector<int> idx(L);
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + S, idx.end(), [&f](int a, int b) {
    double fa = std::abs(f[a]), fb = std::abs(f[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  Vector out = Vector::Zero(L);
  for (int r = 0; r < S; ++r) out[idx[r]] = f[idx[r]];
  return out;
}

TernaryCode ternary_encode(const Matrix& W, const Vector& x, int S) {
  if (W.cols() != x.size()) throw std::invalid_argument("ternary_encode: dimension mismatch");
  Vector h = hard_threshold(W * x, S);
  TernaryCode c;
  c.values.setZero(h.size());
  for (int i = 0; i < h.size(); ++i) {
    if (h[i] > 0) {
      c.values[i] = 1;
      c.support.push_back(i);
    } else if (h[i] < 0) {
      c.values[i] = -1;
      c.support.push_back(i);
    }
  }
  c.sparsity = static_cast<int>(c.support.size());
  return c;
}

Vector reconstruct(const Matrix& W, const TernaryCode& a) {
  if (W.rows() != W.cols()) throw std::invalid_argument("reconstruct: square transform required");
  if (W.rows() != a.values.size()) throw std::invalid_argument("reconstruct: dimension mismatch");
  return W.transpose() * a.values.cast<double>();
}

double distortion(const Matrix& X, const Matrix& Xhat) {
  if (X.rows() != Xhat.rows() || X.cols() != Xhat.cols())
    throw std::invalid_argument("distortion: shape mismatch");
  const double N = static_cast<double>(X.rows());
  double acc = 0.0;
  for (Eigen::Index m = 0; m < X.cols(); ++m) acc += (X.col(m) - Xhat.col(m)).norm();
  return acc / (N * static_cast<double>(X.cols()));
}

double distortion_mse(const Matrix& X, const Matrix& Xhat) {
  if (X.rows() != Xhat.rows() || X.cols() != Xhat.cols())
    throw std::invalid_argument("distortion: shape mismatch");
  return (X - Xhat).squaredNorm() / static_cast<double>(X.size());
}

int dot(const TernaryCode& a, const TernaryCode& b) {
  int s = 0;
  for (int i : a.support) s += static_cast<int>(a.values[i]) * static_cast<int>(b.values[i]);
  return s;
}

int squared_distance(const TernaryCode& a, const TernaryCode& b) {
  // entries are ternary, so ||a-b||^2 = S_a + S_b - 2<a,b>
  return a.sparsity + b.sparsity - 2 * dot(a, b);
}

SparsityResult required_sparsity(const Matrix& W, const Vector& x, const NoiseModel& noise,
                                 int S_x, int max_rounds, uint64_t seed) {
  if (max_rounds < 1) throw std::invalid_argument("required_sparsity: max_rounds must be >= 1");
  if (noise.sigma_z_sq < 0) throw std::invalid_argument("required_sparsity: negative variance");
  const int L = static_cast<int>(W.rows());
  const double N = static_cast<double>(W.cols());
  TernaryCode a = ternary_encode(W, x, S_x);
  Rng rng(seed);
  double sd = std::sqrt(noise.sigma_z_sq);
  SparsityResult r;
  r.S_y = S_x;
  for (int round = 0; round < max_rounds; ++round) {
    Vector y = x;
    for (int i = 0; i < y.size(); ++i) y[i] += sd * rng.gaussian();
    TernaryCode b = ternary_encode(W, y, r.S_y);
    int next = static_cast<int>(
        std::floor(N * noise.sigma_z_sq + 2.0 * dot(a, b) - static_cast<double>(S_x)));
    next = std::clamp(next, 1, L);
    r.rounds = round + 1;
    if (next == r.S_y) {
      r.converged = true;
      break;
    }
    r.S_y = next;
  }
  return r;
}

DistanceBound ternary_distance_bounds(int S_x, int S_y) {
  if (S_x < 0 || S_y < 0) throw std::invalid_argument("ternary_distance_bounds: negative sparsity");
  int mn = std::min(S_x, S_y);
  return DistanceBound{S_x + S_y - 2 * mn, S_x + S_y + 2 * mn, mn};
}

Eigen::Matrix<int8_t, Eigen::Dynamic, 1> binary_embed_baseline(const Matrix& R, const Vector& x,
                                                               const Vector& dither) {
  if (R.cols() != x.size()) throw std::invalid_argument("binary_embed_baseline: dimension mismatch");
  if (dither.size() != R.rows())
    throw std::invalid_argument("binary_embed_baseline: dither length mismatch");
  Vector f = R * x + dither;
  Eigen::Matrix<int8_t, Eigen::Dynamic, 1> out(f.size());
  for (int i = 0; i < f.size(); ++i) out[i] = f[i] >= 0 ? 1 : -1;
  return out;
}

}  // namespace stc
