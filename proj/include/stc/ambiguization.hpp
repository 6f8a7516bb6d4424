#pragma once
#include <cstdint>
#include <vector>

#include "stc/coding.hpp"
#include "stc/types.hpp"

namespace stc {

// Public code plus the owner-held secret of where the real entries live.
// public_values restricted to true_support always equals the original code.
struct AmbiguizedCode {
  Eigen::Matrix<int8_t, Eigen::Dynamic, 1> public_values;
  std::vector<int> true_support;  // sorted; never serialized into the public db
  int S_x = 0;
  int S_ns = 0;
};

struct AmbiguityBudget {
  double bits = 0.0;
};

// Scatter S_ns coin-sign entries over positions drawn uniformly without
// replacement from the zero positions of a. Draw protocol per entry: position
// pick (partial Fisher-Yates), then sign. Throws "ambiguization overflow" when
// S_ns exceeds the number of zeros.
AmbiguizedCode ambiguize(const TernaryCode& a, int S_ns, uint64_t seed);

// log2 C(S_x + S_ns, S_x), evaluated with exact integer arithmetic before the
// conversion to double: the number of equally likely true-support placements
// an observer of the public code must consider.
AmbiguityBudget ambiguity_entropy(int S_x, int S_ns);

}  // namespace stc
