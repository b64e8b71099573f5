#include "shatter/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>
#include <utility>

#include "shatter/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shatter {

namespace {

// ----- precomputed search tables ----------------------------------------

int64_t small_factorial(int k) {
  int64_t r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Lehmer index of a pattern given as 1-based positions, lex rank in [0, k!)
int lehmer_rank(const std::vector<int32_t>& ranks) {
  int k = int(ranks.size());
  int64_t id = 0;
  for (int i = 0; i < k; ++i) {
    int smaller_later = 0;
    for (int j = i + 1; j < k; ++j)
      if (ranks[size_t(j)] < ranks[size_t(i)]) ++smaller_later;
    id = id * (k - i) + smaller_later;
  }
  return int(id);
}

struct SearchTables {
  int n = 0, k = 0;
  int64_t kfact = 0;
  std::vector<Permutation> perms;                 // ascending by order vector
  std::vector<std::vector<int32_t>> subsets;      // ascending k-subsets
  std::vector<std::vector<uint16_t>> pattern_id;  // [perm rank][subset index]
};

SearchTables build_tables(int n, int k) {
  SearchTables tab;
  tab.n = n;
  tab.k = k;
  tab.kfact = small_factorial(k);

  std::vector<int32_t> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[size_t(i)] = i + 1;
  do {
    tab.perms.push_back(Permutation::from_order(order));
  } while (std::next_permutation(order.begin(), order.end()));

  std::vector<int32_t> comb(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) comb[size_t(i)] = i + 1;
  do {
    tab.subsets.push_back(comb);
  } while (next_combination(comb, n));

  tab.pattern_id.resize(tab.perms.size());
  for (size_t r = 0; r < tab.perms.size(); ++r) {
    tab.pattern_id[r].resize(tab.subsets.size());
    for (size_t s = 0; s < tab.subsets.size(); ++s) {
      Pattern p = induced_pattern(tab.perms[r], tab.subsets[s]);
      tab.pattern_id[r][s] = uint16_t(lehmer_rank(p.ranks));
    }
  }
  return tab;
}

// ----- per-level depth-first search --------------------------------------

// One pattern bitmask per subset plus running distinct counts; add/remove
// keep an undo list so the search backtracks in O(new patterns).
struct Dfs {
  const SearchTables* tab = nullptr;
  int m = 0;
  int64_t t = 0;
  int words = 0;
  std::vector<uint64_t> bits;
  std::vector<int> counts;
  std::vector<int32_t> chosen;

  Dfs(const SearchTables& tables, int target_m, int64_t target_t)
      : tab(&tables), m(target_m), t(target_t) {
    words = int((tables.kfact + 63) / 64);
    bits.assign(tables.subsets.size() * size_t(words), 0);
    counts.assign(tables.subsets.size(), 0);
  }

  void add(int rank, std::vector<std::pair<int, int>>& undo) {
    for (size_t s = 0; s < tab->subsets.size(); ++s) {
      int pid = tab->pattern_id[size_t(rank)][s];
      uint64_t& word = bits[s * size_t(words) + size_t(pid >> 6)];
      uint64_t mask = uint64_t(1) << (pid & 63);
      if (!(word & mask)) {
        word |= mask;
        ++counts[s];
        undo.emplace_back(int(s), pid);
      }
    }
  }

  void remove(const std::vector<std::pair<int, int>>& undo) {
    for (auto [s, pid] : undo) {
      bits[size_t(s) * size_t(words) + size_t(pid >> 6)] &=
          ~(uint64_t(1) << (pid & 63));
      --counts[size_t(s)];
    }
  }

  // every subset must still be able to reach t with the remaining slots
  bool feasible(int placed) const {
    int64_t rem = m - placed;
    for (int c : counts)
      if (c + rem < t) return false;
    return true;
  }

  bool complete() const {
    for (int c : counts)
      if (c < t) return false;
    return true;
  }

  // first solution in ascending rank order is the lex-least one
  bool run(int level, int min_rank) {
    if (level == m) return complete();
    for (int r = min_rank; r < int(tab->perms.size()); ++r) {
      std::vector<std::pair<int, int>> undo;
      add(r, undo);
      chosen.push_back(r);
      if (feasible(level + 1) && run(level + 1, r + 1)) return true;
      chosen.pop_back();
      remove(undo);
    }
    return false;
  }
};

// Search one deepening level: does a family of exactly m members reach t on
// every subset?  Parallel across the first free member; the lex-least
// solution is re-selected canonically after all branches finish.
std::optional<std::vector<int32_t>> solve_level(const SearchTables& tab,
                                                int m, int64_t t,
                                                bool fix_identity, int jobs) {
  std::vector<int32_t> prefix;
  if (fix_identity) prefix.push_back(0);
  if (int(prefix.size()) > m) prefix.resize(size_t(m));

  if (int(prefix.size()) == m) {
    Dfs probe(tab, m, t);
    std::vector<std::pair<int, int>> undo;
    for (int32_t r : prefix) probe.add(r, undo);
    if (probe.complete()) return prefix;
    return std::nullopt;
  }

  int first = prefix.empty() ? 0 : prefix.back() + 1;
  int total = int(tab.perms.size());
  std::vector<std::optional<std::vector<int32_t>>> slot(
      static_cast<size_t>(total));
  std::atomic<int> best_branch{total};
  std::exception_ptr error = nullptr;

  int threads = 1;
#ifdef _OPENMP
  threads = jobs > 0 ? jobs : omp_get_max_threads();
#endif
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int r = first; r < total; ++r) {
    try {
      if (r > best_branch.load()) continue;  // cannot beat a smaller branch
      Dfs dfs(tab, m, t);
      std::vector<std::pair<int, int>> undo;
      for (int32_t p : prefix) {
        dfs.add(p, undo);
        dfs.chosen.push_back(p);
      }
      dfs.add(r, undo);
      dfs.chosen.push_back(r);
      int placed = int(prefix.size()) + 1;
      bool hit = placed == m ? dfs.complete()
                             : (dfs.feasible(placed) && dfs.run(placed, r + 1));
      if (hit) {
        slot[size_t(r)] = dfs.chosen;
        int cur = best_branch.load();
        while (r < cur && !best_branch.compare_exchange_weak(cur, r)) {
        }
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(shatter_exact_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  (void)threads;
  if (error) std::rethrow_exception(error);

  for (int r = first; r < total; ++r)
    if (slot[size_t(r)]) return slot[size_t(r)];
  return std::nullopt;
}

}  // namespace

ExactResult f_exact(int n, int k, int64_t t, const ExactOptions& opt) {
  if (n < 1 || n > opt.cap || n > 8)
    throw std::invalid_argument("f_exact: n exceeds the hard cap");
  if (k < 1 || k > n) throw std::invalid_argument("f_exact: k out of [1, n]");
  int64_t kfact = small_factorial(k);
  if (t < 1 || t > kfact)
    throw std::invalid_argument("f_exact: t out of [1, k!]");

  SearchTables tab = build_tables(n, k);

  // each member contributes one order per subset, so m >= t always
  int start = int(std::max<int64_t>(1, t));
  for (int m = start; m <= int(tab.perms.size()); ++m) {
    std::optional<std::vector<int32_t>> sol =
        solve_level(tab, m, t, opt.fix_identity, opt.jobs);
    if (!sol) continue;

    ExactResult res;
    res.n = n;
    res.k = k;
    res.t = t;
    res.value = m;
    res.optimal_family = PermFamily(n);
    for (int32_t r : *sol) res.optimal_family.add(tab.perms[size_t(r)]);

    MinShatterResult check = min_shatter_serial(res.optimal_family, k);
    if (check.min_count < t)
      throw StructuralAnomaly("f_exact: witness failed re-verification");

    char note[256];
    std::snprintf(note, sizeof note,
                  "deepening from m=%d; %s; members ascending by lex rank; "
                  "level space C(%zu,%d)",
                  start,
                  opt.fix_identity
                      ? "first member pinned to identity (relabeling symmetry)"
                      : "unreduced search over all members",
                  tab.perms.size() - (opt.fix_identity ? 1 : 0),
                  m - (opt.fix_identity ? 1 : 0));
    res.note = note;
    return res;
  }
  throw StructuralAnomaly("f_exact: no family found up to all n! members");
}

// ----- growth regimes ------------------------------------------------------

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ExactT:
      return "exact-t";
    case Regime::LogLog:
      return "loglog";
    case Regime::SqrtLog:
      return "sqrtlog";
    case Regime::Log:
      return "log";
    case Regime::Unknown:
      return "unknown";
  }
  return "unknown";
}

RegimeAnswer regime(int k, int64_t t) {
  if (k < 3) throw std::invalid_argument("regime: k must be >= 3");
  if (t < 1 || (uint64_t(t) > factorial(uint64_t(k))))
    throw std::invalid_argument("regime: t out of [1, k!]");

  RegimeAnswer ans{k, t, Regime::Unknown};
  if (k == 3) {
    if (t <= 2)
      ans.regime = Regime::ExactT;
    else if (t <= 4)
      ans.regime = Regime::LogLog;
    else
      ans.regime = Regime::Log;
    return ans;
  }

  int64_t pow2 = int64_t(1) << ceil_log2(uint64_t(k));
  int64_t sqrt_top = std::min<int64_t>(2 * int64_t(k), pow2 + 4);
  int64_t log_bottom =
      k - 1 <= 62 ? (int64_t(1) << (k - 1)) : std::numeric_limits<int64_t>::max();
  if (t <= 2)
    ans.regime = Regime::ExactT;
  else if (t <= pow2)
    ans.regime = Regime::LogLog;
  else if (t <= sqrt_top)
    ans.regime = Regime::SqrtLog;
  else if (t > log_bottom)
    ans.regime = Regime::Log;
  return ans;
}

LowerBoundThresholds lower_bound_thresholds(uint64_t n, int k) {
  if (n < 2) throw std::invalid_argument("lower_bound_thresholds: n >= 2");
  if (k < 3) throw std::invalid_argument("lower_bound_thresholds: k >= 3");
  double logn = std::log2(double(n));
  LowerBoundThresholds out;
  out.chain = logn / double(k) - 1.0;
  out.tree = std::sqrt(logn) / double(ceil_log2(uint64_t(k))) - 1.0;
  return out;
}

std::string solved_table_csv(const std::vector<ExactResult>& rows) {
  std::string out = "n,k,t,m\n";
  for (const ExactResult& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%d,%d,%lld,%d\n", r.n, r.k,
                  static_cast<long long>(r.t), r.value);
    out += line;
  }
  return out;
}

}  // namespace shatter
