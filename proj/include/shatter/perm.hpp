#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shatter/common.hpp"

namespace shatter {

// A permutation of the ground set {1..n}, stored by rank: rank(x) is the
// position of x in the order, so rank(x) < rank(y) means x comes before y.
class Permutation {
 public:
  explicit Permutation(std::vector<int32_t> ranks);

  static Permutation identity(int n);
  static Permutation reversal(int n);
  // order[i] is the element in position i+1
  static Permutation from_order(std::span<const int32_t> order);
  static Permutation random(int n, Rng& rng);

  int n() const { return int(ranks_.size()); }
  int32_t rank(int32_t x) const { return ranks_[size_t(x) - 1]; }
  const std::vector<int32_t>& ranks() const { return ranks_; }
  std::vector<int32_t> order() const;

  bool operator==(const Permutation& other) const = default;

 private:
  std::vector<int32_t> ranks_;  // ranks_[x-1] = position of x, 1-based
};

// An ordered list of permutations of a common ground set.  Duplicates are
// allowed; they never help but keep construction output honest.
class PermFamily {
 public:
  explicit PermFamily(int n);
  PermFamily(int n, std::vector<Permutation> members);

  void add(Permutation p);
  int n() const { return n_; }
  int size() const { return int(members_.size()); }
  const Permutation& operator[](int i) const { return members_[size_t(i)]; }
  const std::vector<Permutation>& members() const { return members_; }

 private:
  int n_;
  std::vector<Permutation> members_;
};

// The order a permutation induces on a subset, written as ranks indexed by
// the subset's natural (ascending) order: ranks[j] is the position of the
// j-th smallest subset element within the induced order.
struct Pattern {
  std::vector<int32_t> ranks;
  bool operator==(const Pattern& other) const = default;
  bool operator<(const Pattern& other) const { return ranks < other.ranks; }
};

// subset must be strictly ascending, elements in [1, n]
Pattern induced_pattern(const Permutation& p, std::span<const int32_t> subset);

// t = 1: identity alone; t = 2: identity plus full reversal
PermFamily monotone_family(int n, int t);

PermFamily random_family(int n, int m, uint64_t seed);

}  // namespace shatter
