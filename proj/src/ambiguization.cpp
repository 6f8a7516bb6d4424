#include "stc/ambiguization.hpp"

#include <gmp.h>

#include <cmath>
#include <stdexcept>

#include "stc/rng.hpp"

namespace stc {

AmbiguizedCode ambiguize(const TernaryCode& a, int S_ns, uint64_t seed) {
  if (S_ns < 0) throw std::invalid_argument("ambiguize: negative noise count");
  const int L = static_cast<int>(a.values.size());
  std::vector<int> zeros;
  zeros.reserve(L);
  for (int i = 0; i < L; ++i)
    if (a.values[i] == 0) zeros.push_back(i);
  if (S_ns > static_cast<int>(zeros.size())) throw std::runtime_error("ambiguization overflow");

  AmbiguizedCode out;
  out.public_values = a.values;
  out.true_support = a.support;
  out.S_x = a.sparsity;
  out.S_ns = S_ns;
  Rng rng(seed);
  const int n = static_cast<int>(zeros.size());
  for (int s = 0; s < S_ns; ++s) {
    int r = s + static_cast<int>(rng.below(static_cast<uint64_t>(n - s)));
    std::swap(zeros[s], zeros[r]);
    out.public_values[zeros[s]] = static_cast<int8_t>(rng.coin_sign());
  }
  return out;
}

AmbiguityBudget ambiguity_entropy(int S_x, int S_ns) {
  if (S_x < 0 || S_ns < 0) throw std::invalid_argument("ambiguity_entropy: negative count");
  mpz_t c;
  mpz_init(c);
  mpz_bin_uiui(c, static_cast<unsigned long>(S_x) + static_cast<unsigned long>(S_ns),
               static_cast<unsigned long>(S_x));
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, c);
  mpz_clear(c);
  return AmbiguityBudget{static_cast<double>(exp2) + std::log2(mant)};
}

}  // namespace stc
