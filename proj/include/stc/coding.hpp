#pragma once
#include <cstdint>
#include <vector>

#include "stc/types.hpp"

namespace stc {

// Length-L code over {-1, 0, +1}. sparsity is the actual support size, which
// can fall short of the requested S when the projection has fewer nonzeros.
struct TernaryCode {
  Eigen::Matrix<int8_t, Eigen::Dynamic, 1> values;
  std::vector<int> support;  // sorted indices of the nonzero entries
  int sparsity = 0;
};

struct SparsityResult {
  int S_y = 0;
  bool converged = false;
  int rounds = 0;
};

// Keep the S largest-magnitude entries, zero the rest. Ties keep the lower
// index. S >= length passes f through unchanged.
Vector hard_threshold(const Vector& f, int S);

// sign(hard_threshold(W x, S))
TernaryCode ternary_encode(const Matrix& W, const Vector& x, int S);

// x_hat = W' a; square transforms only (transpose is the pseudoinverse there)
Vector reconstruct(const Matrix& W, const TernaryCode& a);

// mean over columns of ||x - x_hat||_2 / N (canonical form), and the
// mean-squared variant kept as a diagnostic
double distortion(const Matrix& X, const Matrix& Xhat);
double distortion_mse(const Matrix& X, const Matrix& Xhat);

// Smallest query sparsity that keeps a noisy probe decodable, found by the
// fixed point S_y <- floor(N sigma_z^2 + 2 <a,b> - S_x) with a fresh noise
// draw per round. Clamped to [1, L]; converged=false when max_rounds runs out
// before two consecutive rounds agree.
SparsityResult required_sparsity(const Matrix& W, const Vector& x, const NoiseModel& noise,
                                 int S_x, int max_rounds, uint64_t seed);

// ||a - b||^2 range implied by the two sparsity levels alone
DistanceBound ternary_distance_bounds(int S_x, int S_y);

int dot(const TernaryCode& a, const TernaryCode& b);
int squared_distance(const TernaryCode& a, const TernaryCode& b);

// Dense {-1,+1} baseline: sign(R x + dither), sign(0) = +1
Eigen::Matrix<int8_t, Eigen::Dynamic, 1> binary_embed_baseline(const Matrix& R, const Vector& x,
                                                               const Vector& dither);

}  // namespace stc
