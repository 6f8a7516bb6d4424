#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stc/types.hpp"

namespace stc {

// Secret key material: a full-rank N x N real matrix. The smallest singular
// value must exceed 1e-10 times the largest or the key is rejected.
struct KeyMatrix {
  Matrix K;
};

KeyMatrix key_from_seed(int n_dim, uint64_t seed);

// 16-byte fingerprint of the key entries; identifies which key produced a
// stored transform without revealing it.
std::array<uint8_t, 16> key_fingerprint(const Matrix& K);

struct SparsifyingTransform {
  Matrix W;  // L x N, rows orthonormal (W W^T = I)
  std::array<uint8_t, 16> key_id{};
  std::vector<double> objective_trace;  // ||W X - A||_F^2 per iteration, non-increasing
  bool converged = false;
  int iterations = 0;
};

struct LearnOptions {
  int max_iters = 50;
  double rel_tol = 1e-6;  // stop when the relative objective decrease falls below
  Exec exec = Exec::parallel;
};

// W0 = left singular vectors of the key, columns sign-canonicalized so each
// column's largest-magnitude entry is positive. Throws "degenerate key" when
// the key fails the rank check.
Matrix init_transform(const KeyMatrix& key);

// Columnwise hard thresholding of W X: keep the S largest-magnitude entries
// of each column, with their values. Ties at the cutoff keep the lower index.
Matrix sparse_code_step(const Matrix& W, const Matrix& X, int S, Exec exec = Exec::parallel);

// Orthogonal Procrustes update: argmin_{W W^T = I} ||W X - A||_F via the SVD
// of A X^T. Square systems only: the closed form stops being the distance
// minimizer for rectangular W. Throws "degenerate update" when A X^T is
// identically zero.
Matrix transform_update(const Matrix& X, const Matrix& A);

// Alternate sparse_code_step / transform_update from the key-derived start.
// objective_trace[0] is the objective after the initial coding step, one more
// entry per iteration; max_iters = 1 yields exactly two entries.
SparsifyingTransform learn_transform(const Matrix& X, const KeyMatrix& key, int S_x,
                                     const LearnOptions& opts = {});

double coding_objective(const Matrix& W, const Matrix& X, const Matrix& A);

// Binary persistence: magic "STCW", version u16, L and N as u32 LE, row-major
// f64 entries, then the 16-byte key id.
void save_transform(const SparsifyingTransform& t, const std::string& path);
SparsifyingTransform load_transform(const std::string& path);

}  // namespace stc
