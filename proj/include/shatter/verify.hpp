#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shatter/perm.hpp"

namespace shatter {

// ----- subset enumeration ----------------------------------------------
// k-subsets of {1..n} in lexicographic order of the sorted element lists.

uint64_t unrank_combination(int n, int k, uint64_t r, std::span<int32_t> out);
// advances comb (ascending, 1-based) to its lex successor; false at the end
bool next_combination(std::span<int32_t> comb, int n);

struct VerifyOptions {
  uint64_t subset_budget = 10'000'000;  // cap on exhaustive C(n, k) scans
  uint64_t samples = 100'000;           // sampled mode only
  uint64_t seed = 0;                    // sampled mode only
  int jobs = 0;                         // 0 = all available workers
};

// number of distinct orders the family induces on one subset
int64_t count_induced(const PermFamily& fam, std::span<const int32_t> subset);

struct MinShatterResult {
  int64_t min_count = 0;
  std::vector<int32_t> witness;  // lexicographically least subset attaining it
  uint64_t scanned = 0;
};

// exhaustive scan over all k-subsets; parallel kernel with pruning
MinShatterResult min_shatter(const PermFamily& fam, int k,
                             const VerifyOptions& opt = {});
// plain single-thread reference used by tests and the kernel benchmark
MinShatterResult min_shatter_serial(const PermFamily& fam, int k,
                                    uint64_t subset_budget = 10'000'000);

enum class VerifyMode { Exhaustive, Sampled };

struct ShatterCertificate {
  int k = 0;
  int64_t t = 0;
  VerifyMode mode = VerifyMode::Exhaustive;
  uint64_t samples = 0;  // sampled mode
  uint64_t seed = 0;     // sampled mode
  int64_t min_count = 0;
  std::vector<int32_t> witness;
  bool passed = false;
};

ShatterCertificate verify_t_shattering(const PermFamily& fam, int k, int64_t t,
                                       VerifyMode mode,
                                       const VerifyOptions& opt = {});

// draws one uniform k-subset of {1..n}, ascending
std::vector<int32_t> sample_subset(int n, int k, Rng& rng);

}  // namespace shatter
