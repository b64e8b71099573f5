#include "shatter/perm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace shatter {

Permutation::Permutation(std::vector<int32_t> ranks) : ranks_(std::move(ranks)) {
  const int n = int(ranks_.size());
  if (n == 0) throw std::invalid_argument("Permutation: empty rank vector");
  std::vector<char> seen(size_t(n), 0);
  for (int32_t r : ranks_) {
    if (r < 1 || r > n || seen[size_t(r) - 1])
      throw std::invalid_argument("Permutation: ranks are not a bijection onto 1..n");
    seen[size_t(r) - 1] = 1;
  }
}

Permutation Permutation::identity(int n) {
  if (n < 1) throw std::invalid_argument("Permutation::identity: n < 1");
  std::vector<int32_t> r(static_cast<size_t>(n));
  std::iota(r.begin(), r.end(), 1);
  return Permutation(std::move(r));
}

Permutation Permutation::reversal(int n) {
  if (n < 1) throw std::invalid_argument("Permutation::reversal: n < 1");
  std::vector<int32_t> r(static_cast<size_t>(n));
  for (int x = 1; x <= n; ++x) r[size_t(x) - 1] = n + 1 - x;
  return Permutation(std::move(r));
}

Permutation Permutation::from_order(std::span<const int32_t> order) {
  const int n = int(order.size());
  if (n < 1) throw std::invalid_argument("Permutation::from_order: empty order");
  std::vector<int32_t> r(size_t(n), 0);
  for (int pos = 0; pos < n; ++pos) {
    int32_t x = order[size_t(pos)];
    if (x < 1 || x > n || r[size_t(x) - 1] != 0)
      throw std::invalid_argument("Permutation::from_order: not a permutation");
    r[size_t(x) - 1] = pos + 1;
  }
  return Permutation(std::move(r));
}

Permutation Permutation::random(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("Permutation::random: n < 1");
  std::vector<int32_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  for (int i = n - 1; i > 0; --i) {
    uint64_t j = rng.bounded(uint64_t(i) + 1);
    std::swap(order[size_t(i)], order[size_t(j)]);
  }
  return from_order(order);
}

std::vector<int32_t> Permutation::order() const {
  std::vector<int32_t> out(ranks_.size());
  for (int x = 1; x <= n(); ++x) out[size_t(rank(x)) - 1] = x;
  return out;
}

PermFamily::PermFamily(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("PermFamily: n < 1");
}

PermFamily::PermFamily(int n, std::vector<Permutation> members) : PermFamily(n) {
  for (auto& p : members) add(std::move(p));
}

void PermFamily::add(Permutation p) {
  if (p.n() != n_)
    throw std::invalid_argument("PermFamily::add: member has wrong ground set size");
  members_.push_back(std::move(p));
}

Pattern induced_pattern(const Permutation& p, std::span<const int32_t> subset) {
  const size_t s = subset.size();
  if (s == 0) throw std::invalid_argument("induced_pattern: empty subset");
  for (size_t j = 0; j < s; ++j) {
    if (subset[j] < 1 || subset[j] > p.n())
      throw std::invalid_argument("induced_pattern: element out of range");
    if (j > 0 && subset[j] <= subset[j - 1])
      throw std::invalid_argument("induced_pattern: subset must be strictly ascending");
  }
  Pattern out;
  out.ranks.resize(s);
  for (size_t j = 0; j < s; ++j) {
    int32_t rj = p.rank(subset[j]);
    int32_t below = 0;
    for (size_t l = 0; l < s; ++l)
      if (p.rank(subset[l]) <= rj) ++below;
    out.ranks[j] = below;
  }
  return out;
}

PermFamily monotone_family(int n, int t) {
  if (t != 1 && t != 2)
    throw std::invalid_argument("monotone_family: t must be 1 or 2");
  PermFamily fam(n);
  fam.add(Permutation::identity(n));
  if (t == 2) fam.add(Permutation::reversal(n));
  return fam;
}

PermFamily random_family(int n, int m, uint64_t seed) {
  if (m < 0) throw std::invalid_argument("random_family: m < 0");
  Rng rng(seed);
  PermFamily fam(n);
  for (int i = 0; i < m; ++i) fam.add(Permutation::random(n, rng));
  return fam;
}

}  // namespace shatter
