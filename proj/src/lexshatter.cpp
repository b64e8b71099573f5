#include "shatter/lexshatter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shatter {

namespace {

// ----- saturating arithmetic ---------------------------------------------

uint64_t mul_sat(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kU64Sat / b) return kU64Sat;
  return a * b;
}

uint64_t add_sat(uint64_t a, uint64_t b) {
  return a > kU64Sat - b ? kU64Sat : a + b;
}

long double binomial_ld(int n, int r) {
  long double v = 1;
  for (int i = 1; i <= r; ++i)
    v = v * (long double)(n - r + i) / (long double)i;
  return v;
}

long double factorial_ld(int s) {
  long double v = 1;
  for (int i = 2; i <= s; ++i) v *= (long double)i;
  return v;
}

// ----- constraint atoms ---------------------------------------------------
//
// An atom is one position's demand: at least two distinct values of [b]
// listed in the relative order the component must give them.  Enumeration
// order (size, then value set, then permutation) is frozen because failure
// reports are addressed by rank.

using Atom = std::vector<int32_t>;

uint64_t atom_count(int b, int k) {
  uint64_t total = 0;
  int smax = std::min(k, b);
  for (int s = 2; s <= smax; ++s)
    total = add_sat(total, mul_sat(binomial(uint64_t(b), uint64_t(s)),
                                   factorial(uint64_t(s))));
  return total;
}

std::vector<Atom> enumerate_atoms(int b, int k) {
  std::vector<Atom> atoms;
  int smax = std::min(k, b);
  for (int s = 2; s <= smax; ++s) {
    std::vector<int32_t> comb(static_cast<size_t>(s));
    std::iota(comb.begin(), comb.end(), 1);
    do {
      Atom order(comb.begin(), comb.end());
      do {
        atoms.push_back(order);
      } while (std::next_permutation(order.begin(), order.end()));
    } while (next_combination(comb, b));
  }
  return atoms;
}

bool realizes(const LexPermutation& p, const std::vector<int32_t>& pos,
              const std::vector<const Atom*>& orders) {
  for (size_t i = 0; i < pos.size(); ++i) {
    const Permutation& comp = p.component(pos[i]);
    const Atom& ord = *orders[i];
    for (size_t l = 1; l < ord.size(); ++l)
      if (comp.rank(ord[l - 1]) >= comp.rank(ord[l])) return false;
  }
  return true;
}

bool some_member_realizes(const std::vector<LexPermutation>& fam,
                          const std::vector<int32_t>& pos,
                          const std::vector<const Atom*>& orders) {
  for (const auto& p : fam)
    if (realizes(p, pos, orders)) return true;
  return false;
}

void check_family_shape(const std::vector<LexPermutation>& fam) {
  if (fam.empty()) throw std::invalid_argument("lex family is empty");
  int b = fam.front().b(), d = fam.front().d();
  for (const auto& p : fam)
    if (p.b() != b || p.d() != d)
      throw std::invalid_argument("lex family members disagree on b or d");
}

// ----- exhaustive mode ----------------------------------------------------

LexShatterCertificate check_exhaustive(const std::vector<LexPermutation>& fam,
                                       int k, uint64_t total,
                                       const LexCheckOptions& opt) {
  const int b = fam.front().b(), d = fam.front().d();
  const std::vector<Atom> atoms = enumerate_atoms(b, k);
  const uint64_t a = atoms.size();
  const int jmax = std::min(k, d);

  LexShatterCertificate cert;
  cert.b = b;
  cert.d = d;
  cert.k = k;
  cert.mode = LexCheckMode::Exhaustive;
  cert.space = total;
  cert.checked = total;

  int threads = 1;
#ifdef _OPENMP
  threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
#endif

  // Constraints are ranked j-major, then position set, then atom odometer;
  // the atomic tracks the least-ranked unrealized constraint.
  std::atomic<uint64_t> first_fail{kU64Sat};

  uint64_t base = 0;
  for (int j = 1; j <= jmax && a > 0; ++j) {
    uint64_t apow = 1;
    for (int t = 0; t < j; ++t) apow *= a;  // fits: total <= budget
    uint64_t nsets = binomial(uint64_t(d), uint64_t(j));
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
      std::vector<int32_t> pos(static_cast<size_t>(j));
      std::vector<uint64_t> digit(static_cast<size_t>(j));
      std::vector<const Atom*> orders(static_cast<size_t>(j));
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16)
#endif
      for (int64_t ci = 0; ci < int64_t(nsets); ++ci) {
        uint64_t block_base = base + uint64_t(ci) * apow;
        // ranks in this block only exceed an already-found failure
        if (block_base >= first_fail.load(std::memory_order_relaxed)) continue;
        unrank_combination(d, j, uint64_t(ci), pos);
        std::fill(digit.begin(), digit.end(), 0);
        for (uint64_t odo = 0; odo < apow; ++odo) {
          if ((odo & 1023) == 0 &&
              block_base + odo >= first_fail.load(std::memory_order_relaxed))
            break;
          for (int s = 0; s < j; ++s) orders[size_t(s)] = &atoms[digit[size_t(s)]];
          if (!some_member_realizes(fam, pos, orders)) {
            uint64_t rank = block_base + odo;
            uint64_t seen = first_fail.load(std::memory_order_relaxed);
            while (rank < seen &&
                   !first_fail.compare_exchange_weak(seen, rank,
                                                     std::memory_order_relaxed)) {
            }
            break;  // later ranks in the block cannot beat this one
          }
          for (int s = j - 1; s >= 0; --s) {
            if (++digit[size_t(s)] < a) break;
            digit[size_t(s)] = 0;
          }
        }
      }
    }
    base += nsets * apow;
    // every constraint with more positions ranks above anything found so far
    if (first_fail.load() != kU64Sat) break;
  }

  uint64_t rank = first_fail.load();
  if (rank == kU64Sat) {
    cert.passed = true;
    return cert;
  }
  cert.passed = false;
  base = 0;
  for (int j = 1; j <= jmax; ++j) {
    uint64_t apow = 1;
    for (int t = 0; t < j; ++t) apow *= a;
    uint64_t span = binomial(uint64_t(d), uint64_t(j)) * apow;
    if (rank < base + span) {
      uint64_t rem = rank - base;
      std::vector<int32_t> pos(static_cast<size_t>(j));
      unrank_combination(d, j, rem / apow, pos);
      uint64_t odo = rem % apow;
      std::vector<uint64_t> digit(static_cast<size_t>(j));
      for (int s = j - 1; s >= 0; --s) {
        digit[size_t(s)] = odo % a;
        odo /= a;
      }
      for (int s = 0; s < j; ++s) {
        cert.fail_positions.push_back(pos[size_t(s)]);
        cert.fail_orders.push_back(atoms[digit[size_t(s)]]);
      }
      break;
    }
    base += span;
  }
  return cert;
}

// ----- sampled mode -------------------------------------------------------
//
// One class per width vector (w_1..w_j aligned to the sorted positions,
// each w >= 2, sum of (w - 1) at most k - 1).  Every class member is
// equally likely: class by exact weight, then positions, value sets and
// orders uniformly.

struct WidthClass {
  std::vector<int> widths;
  long double weight = 0;  // exact member count of the class
  long double prob = 1;    // chance one uniform member realizes a constraint
};

struct ClassTable {
  std::vector<WidthClass> classes;
  std::vector<long double> cum;  // inclusive prefix sums of weights
  long double total_weight = 0;
  long double min_prob = 1;
  uint64_t space = 0;  // saturating member count across classes
};

ClassTable width_classes(int b, int d, int k) {
  ClassTable table;
  const int wmax = std::min(k, b);
  if (wmax < 2) return table;
  std::vector<int> cur;
  const int lmax = std::min(k - 1, d);
  // depth-first over width vectors; every nonempty prefix is a class
  std::function<void(int, long double, uint64_t)> rec =
      [&](int budget, long double prob, uint64_t count) {
        if (!cur.empty()) {
          WidthClass c;
          c.widths = cur;
          c.weight = binomial_ld(d, int(cur.size())) * (long double)count;
          c.prob = prob;
          table.classes.push_back(std::move(c));
          uint64_t members = mul_sat(binomial(uint64_t(d), uint64_t(cur.size())), count);
          table.space = add_sat(table.space, members);
        }
        if (int(cur.size()) == lmax) return;
        for (int w = 2; w <= wmax && w - 1 <= budget; ++w) {
          uint64_t ac = mul_sat(binomial(uint64_t(b), uint64_t(w)),
                                factorial(uint64_t(w)));
          cur.push_back(w);
          rec(budget - (w - 1), prob / factorial_ld(w), mul_sat(count, ac));
          cur.pop_back();
        }
      };
  rec(k - 1, 1.0L, 1);

  table.cum.reserve(table.classes.size());
  for (const auto& c : table.classes) {
    table.total_weight += c.weight;
    table.cum.push_back(table.total_weight);
    table.min_prob = std::min(table.min_prob, c.prob);
  }
  return table;
}

struct SampledConstraint {
  std::vector<int32_t> positions;
  std::vector<Atom> orders;
};

SampledConstraint sample_constraint(const ClassTable& table, int b, int d,
                                    Rng& rng) {
  long double x = (long double)rng.unit() * table.total_weight;
  size_t ci = size_t(std::lower_bound(table.cum.begin(), table.cum.end(), x) -
                     table.cum.begin());
  if (ci >= table.classes.size()) ci = table.classes.size() - 1;
  const WidthClass& cls = table.classes[ci];

  SampledConstraint c;
  c.positions = sample_subset(d, int(cls.widths.size()), rng);
  c.orders.reserve(cls.widths.size());
  for (int w : cls.widths) {
    std::vector<int32_t> vals = sample_subset(b, w, rng);
    for (size_t i = vals.size(); i > 1; --i)
      std::swap(vals[i - 1], vals[rng.bounded(i)]);
    c.orders.emplace_back(vals.begin(), vals.end());
  }
  return c;
}

LexShatterCertificate check_sampled(const std::vector<LexPermutation>& fam,
                                    int k, const ClassTable& table,
                                    const LexCheckOptions& opt) {
  const int b = fam.front().b(), d = fam.front().d();
  if (opt.samples <= 0)
    throw std::invalid_argument("sampled lex check needs samples >= 1");

  LexShatterCertificate cert;
  cert.b = b;
  cert.d = d;
  cert.k = k;
  cert.mode = LexCheckMode::Sampled;
  cert.space = table.space;
  cert.checked = uint64_t(opt.samples);
  cert.seed = opt.seed;

  std::atomic<int64_t> first_bad{std::numeric_limits<int64_t>::max()};
#ifdef _OPENMP
#pragma omp parallel num_threads(opt.jobs > 0 ? opt.jobs : omp_get_max_threads())
#endif
  {
    std::vector<const Atom*> orders;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int64_t i = 0; i < opt.samples; ++i) {
      if (i >= first_bad.load(std::memory_order_relaxed)) continue;
      Rng rng = derived_rng(opt.seed, uint64_t(i));
      SampledConstraint c = sample_constraint(table, b, d, rng);
      orders.clear();
      for (const Atom& o : c.orders) orders.push_back(&o);
      if (!some_member_realizes(fam, c.positions, orders)) {
        int64_t seen = first_bad.load(std::memory_order_relaxed);
        while (i < seen &&
               !first_bad.compare_exchange_weak(seen, i,
                                                std::memory_order_relaxed)) {
        }
      }
    }
  }

  int64_t bad = first_bad.load();
  if (bad == std::numeric_limits<int64_t>::max()) {
    cert.passed = true;
    return cert;
  }
  cert.passed = false;
  Rng rng = derived_rng(opt.seed, uint64_t(bad));  // replay the bad draw
  SampledConstraint c = sample_constraint(table, b, d, rng);
  cert.fail_positions.assign(c.positions.begin(), c.positions.end());
  cert.fail_orders = std::move(c.orders);
  return cert;
}

// coupon collector: m uniform members miss a fixed constraint of hit
// probability p with chance at most exp(-pm); m = ln(2*space)/p pushes the
// union bound over the whole space below 1/2
uint64_t batch_size(long double p_min, long double space) {
  long double m =
      std::ceil(std::log(2.0L * std::max(space, 2.0L)) / p_min);
  if (m < 1) return 1;
  if (m > 1e6L)
    throw BudgetError("lex construction batch would exceed 1e6 members");
  return uint64_t(m);
}

}  // namespace

// ----- public entry points ------------------------------------------------

uint64_t lex_constraint_count(int b, int d, int k) {
  if (b < 2 || d < 1 || k < 1)
    throw std::invalid_argument("lex_constraint_count: need b >= 2, d >= 1, k >= 1");
  uint64_t a = atom_count(b, k);
  if (a == 0) return 0;  // k = 1 demands nothing
  uint64_t total = 0;
  uint64_t apow = 1;
  int jmax = std::min(k, d);
  for (int j = 1; j <= jmax; ++j) {
    apow = mul_sat(apow, a);
    total = add_sat(total, mul_sat(binomial(uint64_t(d), uint64_t(j)), apow));
  }
  return total;
}

LexShatterCertificate check_k_lex_shattering(
    const std::vector<LexPermutation>& fam, int k, const LexCheckOptions& opt) {
  check_family_shape(fam);
  if (k < 1) throw std::invalid_argument("check_k_lex_shattering: k >= 1");
  const int b = fam.front().b(), d = fam.front().d();

  uint64_t total = lex_constraint_count(b, d, k);
  if (total <= opt.constraint_budget) return check_exhaustive(fam, k, total, opt);
  if (!opt.allow_sampling)
    throw BudgetError("lex constraint space exceeds the budget and sampling is off");
  ClassTable table = width_classes(b, d, k);
  return check_sampled(fam, k, table, opt);
}

LexBuildResult build_k_lex_random(int b, int d, int k, uint64_t seed,
                                  const LexCheckOptions& opt) {
  if (k < 1) throw std::invalid_argument("build_k_lex_random: k >= 1");
  uint64_t total = lex_constraint_count(b, d, k);  // validates b, d
  bool exhaustive = total <= opt.constraint_budget;
  if (!exhaustive && !opt.allow_sampling)
    throw BudgetError("lex constraint space exceeds the budget and sampling is off");

  uint64_t m0 = 1;
  if (total > 0) {
    if (exhaustive) {
      // hardest literal constraint: min(k,d) positions each demanding a
      // full order of min(k,b) values
      long double p =
          std::pow(1.0L / factorial_ld(std::min(k, b)), (long double)std::min(k, d));
      m0 = batch_size(p, (long double)total);
    } else {
      ClassTable table = width_classes(b, d, k);
      m0 = batch_size(table.min_prob, (long double)table.space);
    }
  }

  Rng rng(seed);
  std::vector<LexPermutation> fam;
  fam.reserve(static_cast<size_t>(m0));
  for (uint64_t i = 0; i < m0; ++i)
    fam.push_back(LexPermutation::random(b, d, rng));

  LexBuildResult res;
  for (int round = 1; round <= 12; ++round) {
    LexShatterCertificate cert = check_k_lex_shattering(fam, k, opt);
    if (cert.passed) {
      res.family = std::move(fam);
      res.certificate = std::move(cert);
      res.rounds = round;
      return res;
    }
    uint64_t extra = (m0 + 3) / 4;
    for (uint64_t i = 0; i < extra; ++i)
      fam.push_back(LexPermutation::random(b, d, rng));
  }
  throw ConstructionError(
      "random lex family failed to verify within 12 batches");
}

LexPermutation scrambling_to_lex(const Permutation& tau, int b, int d) {
  if (b < 2 || d < 1)
    throw std::invalid_argument("scrambling_to_lex: need b >= 2, d >= 1");
  if (uint64_t(tau.n()) != uint64_t(b) * uint64_t(d))
    throw std::invalid_argument("scrambling_to_lex: permutation size is not b*d");
  std::vector<Permutation> comps;
  comps.reserve(static_cast<size_t>(d));
  std::vector<int32_t> block(static_cast<size_t>(b));
  for (int i = 1; i <= d; ++i) {
    std::iota(block.begin(), block.end(), int32_t(i - 1) * b + 1);
    comps.emplace_back(induced_pattern(tau, block).ranks);
  }
  return LexPermutation(b, d, std::move(comps));
}

std::vector<LexPermutation> scrambling_to_lex_family(const PermFamily& q,
                                                     int b, int d) {
  std::vector<LexPermutation> out;
  out.reserve(static_cast<size_t>(q.size()));
  for (const Permutation& tau : q.members())
    out.push_back(scrambling_to_lex(tau, b, d));
  return out;
}

ScramblingResult build_scrambling_family(int n, int k, uint64_t seed,
                                         const VerifyOptions& opt) {
  if (n < 1) throw std::invalid_argument("build_scrambling_family: n >= 1");
  if (k < 1 || k > n || k > 16)
    throw std::invalid_argument("build_scrambling_family: need 1 <= k <= min(n, 16)");

  const int64_t t = int64_t(factorial(uint64_t(k)));
  uint64_t m0 = batch_size(1.0L / factorial_ld(k),
                           binomial_ld(n, k) * factorial_ld(k));

  Rng rng(seed);
  PermFamily fam(n);
  for (uint64_t i = 0; i < m0; ++i) fam.add(Permutation::random(n, rng));

  ScramblingResult res;
  for (int round = 1; round <= 12; ++round) {
    ShatterCertificate cert =
        verify_t_shattering(fam, k, t, VerifyMode::Exhaustive, opt);
    if (cert.passed) {
      res.family = std::move(fam);
      res.certificate = std::move(cert);
      res.rounds = round;
      return res;
    }
    uint64_t extra = (m0 + 3) / 4;
    for (uint64_t i = 0; i < extra; ++i) fam.add(Permutation::random(n, rng));
  }
  throw ConstructionError(
      "random scrambling family failed to verify within 12 batches");
}

Construction build_loglog_family(uint64_t n, int k, uint64_t seed,
                                 const LexCheckOptions& opt) {
  if (n < 2) throw std::invalid_argument("build_loglog_family: n >= 2");
  if (k < 3) throw std::invalid_argument("build_loglog_family: k >= 3");
  int d = ceil_log2(n);
  LexBuildResult core = build_k_lex_random(2, d, k, seed, opt);

  Construction c;
  c.n = n;
  c.k = k;
  c.b = 2;
  c.d = d;
  c.guarantee = 1 << ceil_log2(uint64_t(k));
  c.lex_core_size = int(core.family.size());
  c.seed = seed;
  c.cube = CubeFamily(2, d);
  for (auto& p : core.family) c.cube.add(std::move(p));
  c.core_certificate = std::move(core.certificate);
  return c;
}

Construction build_sqrtlog_family(uint64_t n, int k, uint64_t seed,
                                  const LexCheckOptions& opt) {
  if (n < 2) throw std::invalid_argument("build_sqrtlog_family: n >= 2");
  if (k < 4) throw std::invalid_argument("build_sqrtlog_family: k >= 4");
  int levels = ceil_log2(n);
  int d = 1;
  while (d * d < levels) ++d;
  int h = ceil_log2(uint64_t(k));
  // the pivot pairing consumes one of the k-1 order demands beyond the
  // chain's h splits, which needs strict headroom
  if (k - 1 <= h)
    throw PreconditionError("build_sqrtlog_family: k - 1 must exceed ceil(log2 k)");
  int b = 1 << d;
  LexBuildResult core = build_k_lex_random(b, d, k, seed, opt);

  Construction c;
  c.n = n;
  c.k = k;
  c.b = b;
  c.d = d;
  c.guarantee = std::min(2 * k, (1 << h) + 4);
  c.lex_core_size = int(core.family.size());
  c.seed = seed;
  c.cube = CubeFamily(b, d);
  for (auto& p : core.family) c.cube.add(std::move(p));
  for (int i = 1; i <= d; ++i)
    for (int outer = 0; outer < 2; ++outer)
      for (int tie = 0; tie < 2; ++tie)
        c.cube.add(PivotLexPerm(b, d, i, outer == 1, tie == 1));
  c.core_certificate = std::move(core.certificate);
  return c;
}

PermFamily ground_family(const Construction& c, uint64_t element_budget) {
  return restrict_to_ground(c.cube, c.n, element_budget);
}

namespace {

// least count first, then lexicographically least subset, so the verdict
// does not depend on thread interleaving
struct PointBest {
  int64_t count = -1;
  std::vector<uint64_t> witness;

  void offer(int64_t c, const std::vector<uint64_t>& subset) {
    if (count < 0 || c < count || (c == count && subset < witness)) {
      count = c;
      witness = subset;
    }
  }
  void merge(const PointBest& other) {
    if (other.count >= 0) offer(other.count, other.witness);
  }
};

std::vector<uint64_t> sample_subset_u64(uint64_t n, int k, Rng& rng) {
  std::vector<uint64_t> out;
  out.reserve(static_cast<size_t>(k));
  for (uint64_t r = n - uint64_t(k); r < n; ++r) {
    uint64_t v = rng.bounded(r + 1) + 1;
    if (std::find(out.begin(), out.end(), v) != out.end()) v = r + 1;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SampledPointCertificate verify_construction_sampled(const Construction& c,
                                                    int64_t t, int64_t samples,
                                                    uint64_t seed, int jobs) {
  if (c.cube.size() == 0)
    throw std::invalid_argument("construction has no members");
  if (c.k < 1 || uint64_t(c.k) > c.n)
    throw std::invalid_argument("subset size must satisfy 1 <= k <= n");
  if (c.k > 16)
    throw std::invalid_argument("induced-order counting caps subsets at 16");
  if (samples <= 0) throw std::invalid_argument("samples must be positive");
  if (pow_sat(uint64_t(c.b), uint64_t(c.d)) < c.n)
    throw std::invalid_argument("ground set does not fit the cube");

  SampledPointCertificate cert;
  cert.k = c.k;
  cert.t = t;
  cert.samples = samples;
  cert.seed = seed;

  PointBest best;
#ifdef _OPENMP
#pragma omp parallel num_threads(jobs > 0 ? jobs : omp_get_max_threads())
#endif
  {
    PointBest local;
    std::vector<Point> pts(static_cast<size_t>(c.k));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int64_t i = 0; i < samples; ++i) {
      Rng rng = derived_rng(seed, uint64_t(i));
      std::vector<uint64_t> subset = sample_subset_u64(c.n, c.k, rng);
      for (int l = 0; l < c.k; ++l)
        pts[size_t(l)] = encode(c.n, c.b, c.d, subset[size_t(l)]);
      local.offer(count_induced_points(c.cube, pts), subset);
    }
#ifdef _OPENMP
#pragma omp critical(lexshatter_point_merge)
#endif
    best.merge(local);
  }

  cert.min_count = best.count;
  cert.witness = std::move(best.witness);
  cert.passed = best.count >= t;
  return cert;
}

}  // namespace shatter
