#pragma once

#include <cstdint>
#include <vector>

#include "shatter/lex.hpp"
#include "shatter/verify.hpp"

namespace shatter {

// A family of lex-permutations is k-lex-shattering when for every choice of
// at most k positions, of a value set of size at most k per position, and of
// an order per value set, some member's components realize all the chosen
// orders simultaneously.
//
// Verification has two modes:
//   Exhaustive: the literal definition, enumerated constraint by constraint.
//     Chosen when the constraint count fits the budget (always for b = 2).
//   Sampled: seeded random constraints drawn from the demandable subspace,
//     i.e. width vectors with sum (|Y_i| - 1) <= k - 1.  A set of k points
//     can never force more: its split positions come from the k - 1 gaps of
//     its natural order, and each gap feeds one slice-width unit.  Large b
//     makes the literal space astronomically larger than what any k-subset
//     uses, and only the demandable part matters for shattering bounds.

struct LexCheckOptions {
  uint64_t constraint_budget = 10'000'000;  // exhaustive iff count <= budget
  int64_t samples = 100'000;                // sampled mode draw count
  uint64_t seed = 0;                        // sampled mode constraint stream
  bool allow_sampling = true;
  int jobs = 0;                             // 0 = all hardware threads
};

enum class LexCheckMode { Exhaustive, Sampled };

struct LexShatterCertificate {
  int b = 0, d = 0, k = 0;
  LexCheckMode mode = LexCheckMode::Exhaustive;
  uint64_t space = 0;    // size of the constraint space the mode covers
  uint64_t checked = 0;  // constraints actually evaluated
  uint64_t seed = 0;
  bool passed = false;
  // first unrealized constraint in evaluation order, when not passed
  std::vector<int> fail_positions;
  std::vector<std::vector<int32_t>> fail_orders;
};

// number of constraints of the literal definition (saturating):
// sum over 1 <= j <= min(k,d) of C(d,j) * A^j where A counts the
// per-position (value set, order) pairs with 2 <= |Y| <= min(k,b)
uint64_t lex_constraint_count(int b, int d, int k);

LexShatterCertificate check_k_lex_shattering(
    const std::vector<LexPermutation>& fam, int k,
    const LexCheckOptions& opt = {});

struct LexBuildResult {
  std::vector<LexPermutation> family;
  LexShatterCertificate certificate;
  int rounds = 0;  // sampling batches used (1 = first batch verified)
};

// Repeatedly samples batches of uniform random lex-permutations until the
// family verifies; batch sizing follows the coupon-collector estimate for
// the hardest constraint.  Deterministic in (seed, options).
LexBuildResult build_k_lex_random(int b, int d, int k, uint64_t seed,
                                  const LexCheckOptions& opt = {});

// Lex-permutation whose i-th component is the order tau induces on the
// value block {(i-1)b + 1, ..., ib}.  A family shattering all k^2-subsets
// of [b*d] transforms member-by-member into a k-lex-shattering family.
LexPermutation scrambling_to_lex(const Permutation& tau, int b, int d);
std::vector<LexPermutation> scrambling_to_lex_family(const PermFamily& q,
                                                     int b, int d);

// Classical log-n regime: seeded random permutations of [n], grown in batches
// until every k-subset is fully shattered (min induced-order count reaches
// k!).  Verification is always exhaustive, so C(n,k) must fit the subset
// budget; the first batch follows the coupon-collector estimate
// k! * ln(C(n,k) * k!).
struct ScramblingResult {
  PermFamily family{1};
  ShatterCertificate certificate;
  int rounds = 0;  // verification attempts (1 = first batch passed)
};

ScramblingResult build_scrambling_family(int n, int k, uint64_t seed,
                                         const VerifyOptions& opt = {});

// A construction over the ground set [n], kept in cube form so that huge n
// stays representable; materialize with ground_family when n * size fits.
struct Construction {
  uint64_t n = 0;
  int k = 0;
  int b = 0, d = 0;
  int guarantee = 0;      // certified induced-count floor for every k-subset
  int lex_core_size = 0;  // members[0..core) are the k-lex-shattering core
  uint64_t seed = 0;
  CubeFamily cube;
  LexShatterCertificate core_certificate;
};

// b = 2, d = ceil(log2 n): every k-subset is 2^ceil(log2 k)-shattered.
Construction build_loglog_family(uint64_t n, int k, uint64_t seed,
                                 const LexCheckOptions& opt = {});

// d = ceil(sqrt(log2 n)), b = 2^d, plus the 4d pivot orders: every k-subset
// is min{2k, 2^ceil(log2 k) + 4}-shattered.
Construction build_sqrtlog_family(uint64_t n, int k, uint64_t seed,
                                  const LexCheckOptions& opt = {});

PermFamily ground_family(const Construction& c,
                         uint64_t element_budget = 200'000'000);

// Seeded spot-check of a construction on random k-subsets of [n], evaluated
// at cube level so n never has to be materialized.
struct SampledPointCertificate {
  int k = 0;
  int64_t t = 0;
  int64_t samples = 0;
  uint64_t seed = 0;
  int64_t min_count = 0;
  std::vector<uint64_t> witness;  // elements of [n], ascending
  bool passed = false;
};

SampledPointCertificate verify_construction_sampled(const Construction& c,
                                                    int64_t t, int64_t samples,
                                                    uint64_t seed,
                                                    int jobs = 0);

}  // namespace shatter
