#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "shatter/perm.hpp"

namespace shatter {

// A point of the cube [b]^d, coordinates in [1, b], most significant first.
using Point = std::vector<int32_t>;

// 1-based position of the first differing coordinate; throws on equal points
int first_diff(const Point& x, const Point& y);

// b^d saturating at kU64Sat
uint64_t pow_sat(uint64_t b, uint64_t d);

// Composite order on [b]^d: points compare at their first differing
// coordinate, using that coordinate's component permutation of [b].
class LexPermutation {
 public:
  LexPermutation(int b, int d, std::vector<Permutation> components);
  static LexPermutation random(int b, int d, Rng& rng);

  int b() const { return b_; }
  int d() const { return d_; }
  const Permutation& component(int i) const {  // i in [1, d]
    return comps_[size_t(i) - 1];
  }

  bool less(const Point& x, const Point& y) const;
  // order-isomorphic embedding into integers: less(x,y) iff key(x) < key(y);
  // meaningful only while b^d fits in 62 bits, wider cubes compare directly
  uint64_t key(const Point& x) const;

 private:
  int b_, d_;
  std::vector<Permutation> comps_;
};

// Order on [b]^d that sorts by one pivot coordinate first (forward or
// reversed) and breaks ties like a plain lexicographic order whose every
// component is forward or reversed.
struct PivotLexPerm {
  int b = 0, d = 0;
  int pivot = 1;               // in [1, d]
  bool outer_reverse = false;  // pivot coordinate direction
  bool tie_reverse = false;    // tie-break direction, all coordinates

  PivotLexPerm() = default;
  PivotLexPerm(int b, int d, int pivot, bool outer_reverse, bool tie_reverse);

  bool less(const Point& x, const Point& y) const;
  // needs b^{d+1} within 62 bits (one extra level for the pivot prefix)
  uint64_t key(const Point& x) const;
};

using CubePerm = std::variant<LexPermutation, PivotLexPerm>;

bool cube_less(const CubePerm& p, const Point& x, const Point& y);
uint64_t cube_key(const CubePerm& p, const Point& x);
int cube_b(const CubePerm& p);
int cube_d(const CubePerm& p);

// A family of orders on a common cube.
struct CubeFamily {
  int b = 0, d = 0;
  std::vector<CubePerm> members;

  CubeFamily() = default;
  CubeFamily(int b, int d) : b(b), d(d) {}
  void add(CubePerm p);
  int size() const { return int(members.size()); }
};

// Ground-set embedding: element x of {1..n} becomes the base-b digit string
// of x-1, most significant digit first, each digit shifted up by one.  The
// plain lexicographic order on points then matches the natural order on
// elements.
Point encode(uint64_t n, int b, int d, uint64_t x);
uint64_t decode(uint64_t n, int b, int d, const Point& p);

// The order a cube permutation induces on a list of distinct points,
// as a Permutation of the list indices.
Permutation materialize(const CubePerm& p, std::span<const Point> points);

// Distinct induced orders of the family on a set of distinct points
// (the point list is sorted into its natural order first).
int64_t count_induced_points(const CubeFamily& fam, std::span<const Point> points);

// Materializes every member on the embedded ground set {1..n}.
PermFamily restrict_to_ground(const CubeFamily& fam, uint64_t n,
                              uint64_t element_budget = 200'000'000);

}  // namespace shatter
