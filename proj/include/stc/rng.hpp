#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace stc {

// Deterministic random layer on top of mt19937_64. The std distribution
// adaptors are implementation-defined, so regression fixtures and the
// byte-identical CSV contract go through these explicit draws instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n), rejection sampled
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: empty range");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  int coin_sign() { return (gen_() & 1u) ? 1 : -1; }

  // standard normal, Box-Muller with cached second draw
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = unit(), u2 = unit();
    while (u1 <= 0.0) u1 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace stc
