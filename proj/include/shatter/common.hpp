#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shatter {

// ----- error taxonomy --------------------------------------------------
//
// The CLI maps these onto its exit-code contract: bad parameters ->
// std::invalid_argument (exit 2), enumeration budget overruns ->
// BudgetError (exit 3), guarantee thresholds -> PreconditionError (exit 4).

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// Randomized construction failed to verify within the retry allowance.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what) {}
};

// An algorithm reached a state its own invariants rule out.
class StructuralAnomaly : public std::runtime_error {
 public:
  explicit StructuralAnomaly(const std::string& what)
      : std::runtime_error(what) {}
};

// ----- deterministic rng -----------------------------------------------
//
// Hand-rolled so that seeded runs reproduce bit-for-bit across standard
// libraries; std::uniform_int_distribution gives no such promise.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {
    // warm up so tiny seeds do not correlate
    splitmix64(state_);
    splitmix64(state_);
  }

  uint64_t next() { return splitmix64(state_); }

  // uniform in [0, bound), bound >= 1; rejection keeps it exactly uniform
  uint64_t bounded(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::bounded: bound 0");
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double unit() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// independent stream for the i-th item of a seeded batch
inline Rng derived_rng(uint64_t seed, uint64_t index) {
  uint64_t s = seed;
  uint64_t a = splitmix64(s);
  return Rng(a ^ (index * 0x9e3779b97f4a7c15ULL) ^ (index >> 3));
}

// ----- small numeric helpers -------------------------------------------

constexpr uint64_t kU64Sat = std::numeric_limits<uint64_t>::max();

// n choose k, saturating at kU64Sat instead of overflowing
inline uint64_t binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  uint64_t result = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    uint64_t num = n - k + i;
    if (result > kU64Sat / num) return kU64Sat;
    result = result * num / i;  // product of i consecutive ints divides by i!
  }
  return result;
}

inline uint64_t factorial(uint64_t k) {
  uint64_t r = 1;
  for (uint64_t i = 2; i <= k; ++i) {
    if (r > kU64Sat / i) return kU64Sat;
    r *= i;
  }
  return r;
}

inline int ceil_log2(uint64_t x) {
  if (x <= 1) return 0;
  int bits = 64 - __builtin_clzll(x - 1);
  return bits;
}

// bit length of base^exp, computed exactly with limb arithmetic so that
// large color counts never round through a double
inline int64_t bit_length_pow(uint64_t base, uint64_t exp) {
  if (base == 0) return 0;
  std::vector<uint32_t> limbs{1};  // little-endian base 2^32
  for (uint64_t e = 0; e < exp; ++e) {
    uint64_t carry = 0;
    for (auto& limb : limbs) {
      uint64_t v = uint64_t(limb) * base + carry;
      limb = uint32_t(v);
      carry = v >> 32;
    }
    while (carry) {
      limbs.push_back(uint32_t(carry));
      carry >>= 32;
    }
  }
  uint32_t top = limbs.back();
  int64_t bits = int64_t(limbs.size() - 1) * 32;
  while (top) {
    ++bits;
    top >>= 1;
  }
  return bits;
}

}  // namespace shatter
