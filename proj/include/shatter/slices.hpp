#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "shatter/lex.hpp"

namespace shatter {

// First position where a point set is not constant, the distinct values
// there, and the induced partition.  Singletons carry no split position.
struct SliceDecomposition {
  std::optional<int> spos;                     // 1-based, nullopt for singletons
  std::vector<int32_t> slice;                  // distinct values at spos, ascending
  std::map<int32_t, std::vector<Point>> parts; // value at spos -> subset
};

SliceDecomposition slice_decompose(std::span<const Point> xs);

// All split positions realized by subsets: equivalently the first-diff
// positions of consecutive points once the set is sorted naturally.
std::vector<int> index_set(std::span<const Point> xs);

struct SliceProfile {
  std::vector<int> positions;                 // index set, ascending
  std::map<int, int> max_slice;               // widest slice per position
  std::map<int, std::vector<Point>> witness;  // a subset realizing max_slice
  // descend-into-largest-part chain: (position, slice width) per step
  std::vector<std::pair<int, int>> greedy_chain;
  uint64_t greedy_product = 1;
};

SliceProfile slice_profile(std::span<const Point> xs);

// product of (max slice width)! over the index set
uint64_t product_bound(std::span<const Point> xs);

enum class Verdict { Guaranteed2k, Rigid };

struct StructureReport {
  SliceProfile profile;
  Verdict verdict = Verdict::Guaranteed2k;
  int h = 0;  // rigid only: index set size, = ceil(log2 k)
  std::map<int, std::array<int32_t, 2>> rigid_slices;  // value pair per position
};

// Classifies a k-point set: either the slice structure already forces at
// least 2k induced orders for any family covering it, or the set is rigid
// (every slice a fixed pair, ceil(log2 k) split positions).  Throws
// StructuralAnomaly when the rigid branch sees inconsistent slice pairs.
StructureReport structure_analysis(std::span<const Point> xs, int k);

// Order induced at the split position of Y: the pattern of the relevant
// component permutation on the slice values.  nullopt for singletons.
std::optional<Pattern> slice_perm(const LexPermutation& p,
                                  std::span<const Point> ys);

}  // namespace shatter
