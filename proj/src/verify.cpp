#include "shatter/verify.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shatter {

uint64_t unrank_combination(int n, int k, uint64_t r, std::span<int32_t> out) {
  // lex rank r over ascending k-subsets of {1..n}
  uint64_t rem = r;
  int x = 1;
  for (int i = 0; i < k; ++i) {
    for (;;) {
      uint64_t block = binomial(uint64_t(n - x), uint64_t(k - i - 1));
      if (rem < block) break;
      rem -= block;
      ++x;
    }
    out[size_t(i)] = x;
    ++x;
  }
  return rem;
}

bool next_combination(std::span<int32_t> comb, int n) {
  const int k = int(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[size_t(i)] == n - (k - 1 - i)) --i;
  if (i < 0) return false;
  ++comb[size_t(i)];
  for (int j = i + 1; j < k; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
  return true;
}

namespace {

// family ranks flattened row-major so the subset scan stays cache-friendly
struct RankMatrix {
  int n = 0;
  int m = 0;
  std::vector<int32_t> flat;

  explicit RankMatrix(const PermFamily& fam) : n(fam.n()), m(fam.size()) {
    flat.reserve(size_t(n) * size_t(m));
    for (int i = 0; i < m; ++i) {
      const auto& r = fam[i].ranks();
      flat.insert(flat.end(), r.begin(), r.end());
    }
  }
  const int32_t* row(int i) const { return flat.data() + size_t(i) * size_t(n); }
};

// induced order packed 4 bits per element; requires k <= 16
inline uint64_t pattern_code(const int32_t* ranks, const int32_t* subset, int k) {
  int32_t r[16];
  for (int j = 0; j < k; ++j) r[j] = ranks[subset[j] - 1];
  uint64_t code = 0;
  for (int j = 0; j < k; ++j) {
    int cnt = 0;
    for (int l = 0; l < k; ++l) cnt += int(r[l] <= r[j]);
    code |= uint64_t(cnt - 1) << (4 * j);
  }
  return code;
}

// Distinct induced orders on one subset.  Returns -1 as soon as the count
// exceeds `prune`: a pruned subset cannot attain the running minimum, and
// partial counts must never be reported as totals.
inline int64_t distinct_patterns(const RankMatrix& mat, const int32_t* subset,
                                 int k, int64_t prune,
                                 std::vector<uint64_t>& scratch) {
  scratch.clear();
  for (int i = 0; i < mat.m; ++i) {
    uint64_t code = pattern_code(mat.row(i), subset, k);
    auto it = std::lower_bound(scratch.begin(), scratch.end(), code);
    if (it == scratch.end() || *it != code) {
      scratch.insert(it, code);
      if (int64_t(scratch.size()) > prune) return -1;
    }
  }
  return int64_t(scratch.size());
}

void validate_subset(const PermFamily& fam, std::span<const int32_t> subset) {
  if (subset.empty()) throw std::invalid_argument("subset is empty");
  for (size_t j = 0; j < subset.size(); ++j) {
    if (subset[j] < 1 || subset[j] > fam.n())
      throw std::invalid_argument("subset element out of range");
    if (j > 0 && subset[j] <= subset[j - 1])
      throw std::invalid_argument("subset must be strictly ascending");
  }
}

void validate_scan(const PermFamily& fam, int k) {
  if (fam.size() < 1) throw std::invalid_argument("family is empty");
  if (k < 1 || k > fam.n()) throw std::invalid_argument("k out of range");
  if (k > 16) throw std::invalid_argument("k > 16 unsupported");
}

struct Best {
  int64_t count = std::numeric_limits<int64_t>::max();
  std::vector<int32_t> witness;

  void offer(int64_t c, const int32_t* subset, int k) {
    if (c < count) {
      count = c;
      witness.assign(subset, subset + k);
    } else if (c == count) {
      std::vector<int32_t> w(subset, subset + k);
      if (w < witness) witness = std::move(w);
    }
  }
  void merge(const Best& other) {
    if (other.count < count ||
        (other.count == count && !other.witness.empty() &&
         (witness.empty() || other.witness < witness)))
      *this = other;
  }
};

}  // namespace

int64_t count_induced(const PermFamily& fam, std::span<const int32_t> subset) {
  if (fam.size() < 1) throw std::invalid_argument("family is empty");
  validate_subset(fam, subset);
  if (subset.size() > 16) throw std::invalid_argument("subset larger than 16 unsupported");
  RankMatrix mat(fam);
  std::vector<uint64_t> scratch;
  return distinct_patterns(mat, subset.data(), int(subset.size()),
                           std::numeric_limits<int64_t>::max(), scratch);
}

MinShatterResult min_shatter_serial(const PermFamily& fam, int k,
                                    uint64_t subset_budget) {
  validate_scan(fam, k);
  uint64_t total = binomial(uint64_t(fam.n()), uint64_t(k));
  if (total > subset_budget)
    throw BudgetError("min_shatter: C(n,k) exceeds subset budget; use sampled verification");

  RankMatrix mat(fam);
  std::vector<uint64_t> scratch;
  std::vector<int32_t> comb(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) comb[size_t(i)] = i + 1;

  Best best;
  do {
    int64_t d = distinct_patterns(mat, comb.data(), k,
                                  std::min<int64_t>(best.count, mat.m), scratch);
    if (d >= 0) best.offer(d, comb.data(), k);
  } while (next_combination(comb, fam.n()));

  return MinShatterResult{best.count, best.witness, total};
}

MinShatterResult min_shatter(const PermFamily& fam, int k,
                             const VerifyOptions& opt) {
  validate_scan(fam, k);
  uint64_t total = binomial(uint64_t(fam.n()), uint64_t(k));
  if (total > opt.subset_budget)
    throw BudgetError("min_shatter: C(n,k) exceeds subset budget; use sampled verification");

  RankMatrix mat(fam);
  std::atomic<int64_t> global_min{int64_t(mat.m)};

  int threads = 1;
#ifdef _OPENMP
  threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#endif
  uint64_t nchunks = std::min<uint64_t>(total, uint64_t(threads) * 16);
  if (nchunks == 0) nchunks = 1;

  Best best;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
  {
    Best local;
    std::vector<uint64_t> scratch;
    std::vector<int32_t> comb(static_cast<size_t>(k));
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (int64_t c = 0; c < int64_t(nchunks); ++c) {
      uint64_t lo = total * uint64_t(c) / nchunks;
      uint64_t hi = total * (uint64_t(c) + 1) / nchunks;
      if (lo >= hi) continue;
      unrank_combination(fam.n(), k, lo, comb);
      for (uint64_t r = lo; r < hi; ++r) {
        int64_t prune = std::min<int64_t>(
            global_min.load(std::memory_order_relaxed), local.count);
        int64_t d = distinct_patterns(mat, comb.data(), k, prune, scratch);
        if (d >= 0) {
          local.offer(d, comb.data(), k);
          int64_t seen = global_min.load(std::memory_order_relaxed);
          while (d < seen &&
                 !global_min.compare_exchange_weak(seen, d,
                                                   std::memory_order_relaxed)) {
          }
        }
        if (r + 1 < hi) next_combination(comb, fam.n());
      }
    }
#ifdef _OPENMP
#pragma omp critical(shatter_min_merge)
#endif
    best.merge(local);
  }

  return MinShatterResult{best.count, best.witness, total};
}

std::vector<int32_t> sample_subset(int n, int k, Rng& rng) {
  // Floyd's algorithm: uniform without replacement
  std::vector<int32_t> chosen;
  chosen.reserve(size_t(k));
  for (int j = n - k + 1; j <= n; ++j) {
    int32_t t = int32_t(rng.bounded(uint64_t(j))) + 1;
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end())
      chosen.push_back(int32_t(j));
    else
      chosen.push_back(t);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

ShatterCertificate verify_t_shattering(const PermFamily& fam, int k, int64_t t,
                                       VerifyMode mode,
                                       const VerifyOptions& opt) {
  if (t < 1) throw std::invalid_argument("verify_t_shattering: t < 1");
  ShatterCertificate cert;
  cert.k = k;
  cert.t = t;
  cert.mode = mode;

  if (mode == VerifyMode::Exhaustive) {
    MinShatterResult r = min_shatter(fam, k, opt);
    cert.min_count = r.min_count;
    cert.witness = r.witness;
  } else {
    validate_scan(fam, k);
    if (opt.samples == 0)
      throw std::invalid_argument("sampled verification needs samples > 0");
    cert.samples = opt.samples;
    cert.seed = opt.seed;

    RankMatrix mat(fam);
    std::atomic<int64_t> global_min{int64_t(mat.m)};
    Best best;
#ifdef _OPENMP
#pragma omp parallel num_threads(opt.jobs > 0 ? opt.jobs : omp_get_max_threads())
#endif
    {
      Best local;
      std::vector<uint64_t> scratch;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (int64_t i = 0; i < int64_t(opt.samples); ++i) {
        Rng rng = derived_rng(opt.seed, uint64_t(i));
        std::vector<int32_t> subset = sample_subset(fam.n(), k, rng);
        int64_t prune = std::min<int64_t>(
            global_min.load(std::memory_order_relaxed), local.count);
        int64_t d = distinct_patterns(mat, subset.data(), k, prune, scratch);
        if (d >= 0) {
          local.offer(d, subset.data(), k);
          int64_t seen = global_min.load(std::memory_order_relaxed);
          while (d < seen &&
                 !global_min.compare_exchange_weak(seen, d,
                                                   std::memory_order_relaxed)) {
          }
        }
      }
#ifdef _OPENMP
#pragma omp critical(shatter_sample_merge)
#endif
      best.merge(local);
    }
    cert.min_count = best.count;
    cert.witness = best.witness;
  }

  cert.passed = cert.min_count >= t;
  return cert;
}

}  // namespace shatter
