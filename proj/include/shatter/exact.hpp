#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shatter/common.hpp"
#include "shatter/perm.hpp"

namespace shatter {

// Exact minimum family sizes at desk scale.  f_exact(n, k, t) finds the
// least m such that some family of m permutations of [n] induces at least t
// orders on every k-subset, by iterative deepening on m with a
// branch-and-bound search per level.  Factorial growth confines this to
// tiny n; the point is ground truth to test everything else against.

struct ExactOptions {
  int cap = 7;              // refuse n beyond this
  bool fix_identity = true;  // pin the first member to the identity
                             // (sound under ground-set relabeling); turning
                             // it off gives the slow unreduced search used
                             // to cross-check the reduction
  int jobs = 0;              // 0 = all cores
};

struct ExactResult {
  int n = 0;
  int k = 0;
  int64_t t = 0;
  int value = 0;             // f_k(n, t)
  PermFamily optimal_family{1};  // witness of size value, lex-least
  std::string note;          // search space and reduction used
};

// Requires 1 <= k <= n <= opt.cap (and n <= 8 absolutely), 1 <= t <= k!.
// The witness is re-verified against the subset scanner before returning.
ExactResult f_exact(int n, int k, int64_t t, const ExactOptions& opt = {});

// ----- growth regimes ------------------------------------------------------

// Asymptotic class of f_k(n, t) as a function of n for fixed k and t.
enum class Regime { ExactT, LogLog, SqrtLog, Log, Unknown };

const char* regime_name(Regime r);

struct RegimeAnswer {
  int k = 0;
  int64_t t = 0;
  Regime regime = Regime::Unknown;
};

// Classification for k >= 3, 1 <= t <= k!:
//   k = 3:  t <= 2 exact-t, t in {3,4} loglog, t in {5,6} log.
//   k >= 4: t <= 2 exact-t; 3 <= t <= 2^ceil(log2 k) loglog;
//           up to min(2k, 2^ceil(log2 k) + 4) sqrtlog; above 2^{k-1} log;
//           the gap in between is open.
RegimeAnswer regime(int k, int64_t t);

// The two adversary bounds at concrete n: any family below these sizes has
// a k-subset with too few induced orders.  chain = log2(n)/k - 1,
// tree = sqrt(log2 n)/ceil(log2 k) - 1.  Requires n >= 2, k >= 3.
struct LowerBoundThresholds {
  double chain = 0.0;
  double tree = 0.0;
};

LowerBoundThresholds lower_bound_thresholds(uint64_t n, int k);

// n,k,t,m rows for external plotting
std::string solved_table_csv(const std::vector<ExactResult>& rows);

}  // namespace shatter
