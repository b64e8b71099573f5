#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shatter/common.hpp"
#include "shatter/perm.hpp"

namespace shatter {

// Witness extraction: given any family P of m permutations of [n], find a
// k-subset on which P induces provably few orders.  Two routes:
//
//   chain: repeated halving.  Each halving produces disjoint A, B with
//            every member of P ordering all of A before all of B (or the
//            reverse).  Nesting k halvings and picking one element per level
//            caps the induced count at 2^{k-1}, provided n >= 2^{k(m+1)}.
//
//   tree:  a complete binary tree of halvings, colored by the direction
//            bits.  A topological pigeonhole finds a height-h subdivision
//            whose non-leaf layers are monochromatic; the 2^h leaf fragments
//            then admit at most 2^h orders, at the milder threshold
//            n >= 2^{g(m+1)} with g = g_upper(2^m, h), h = ceil(log2 k).

// ----- ordered pairs -----------------------------------------------------

// Disjoint sets A, B such that every family member places all of A before
// all of B or all of B before all of A.  a_first[i] records the direction
// under member i: 1 iff A comes first.
struct OrderedPair {
  std::vector<int32_t> a;        // ascending
  std::vector<int32_t> b;        // ascending, disjoint from a, same size
  std::vector<uint8_t> a_first;  // one entry per family member
};

// Halving construction.  Starts from the first and second floor(|X|/2)
// elements of X in natural order (an odd leftover is dropped) and, for each
// member in turn, keeps the half of the current pair that dominates the top
// slice under that member.  Output sizes are equal and at least
// floor(|X|/2^{m+1}).  X must be strictly ascending with at least two
// elements; unless allow_small is set, |X| < 2^{m+1} is rejected because the
// size guarantee then degenerates.
OrderedPair ordered_pair(const PermFamily& fam, std::span<const int32_t> xs,
                         bool allow_small = false);

// ----- witnesses ---------------------------------------------------------

struct Witness {
  int k = 0;
  std::vector<int32_t> subset;   // ascending, size k
  int64_t guaranteed_bound = 0;  // 2^{k-1} (chain) or 2^{ceil(log2 k)} (tree)
  int64_t achieved_count = 0;    // measured induced count on the subset
  std::string method;            // "chain" or "tree"
  bool valid_precondition = false;
  uint64_t seed = 0;             // for callers that track one; not used here
};

// Nested halving: A_0 = [n]; (A_i, B_i) = ordered_pair(A_{i-1}); the witness
// collects x_i = min B_i.  Guarantee 2^{k-1} requires n >= 2^{k(m+1)};
// below that threshold the call fails unless best_effort is set, in which
// case the chain runs as far as the ground set allows and the bound is
// reported with valid_precondition = false.  Requires 1 <= k <= 16 and a
// nonempty family.  When trace is non-null the intermediate pairs are
// appended to it.
Witness chain_witness(const PermFamily& fam, int k, bool best_effort = false,
                      std::vector<OrderedPair>* trace = nullptr);

// Height needed so that any c-coloring of a complete binary tree contains a
// height-h subdivision with monochromatic non-leaf layers:
// h * ceil(log2(c^{h-1} + 1)), computed exactly.  c >= 1, h >= 0.
int64_t g_upper(uint64_t c, int h);

// ----- colored trees -----------------------------------------------------

struct TreeVertex {
  std::vector<int32_t> fragment;  // ascending, nonempty
  OrderedPair pair;               // halving of the fragment; empty sides
                                  // only at a leaf whose fragment is a
                                  // singleton
  uint64_t color = 0;             // bit i = pair.a_first[i]
};

// Complete binary tree on heap indices: root 1, children of v are 2v and
// 2v+1, nodes[0] unused.  Children fragments are the two sides of the
// parent's halving pair.
struct ColoredTree {
  int height = 0;
  int m = 0;  // family size; colors use the low m bits
  std::vector<TreeVertex> nodes;

  int vertex_count() const { return int(nodes.size()) - 1; }
  bool is_leaf(int v) const { return 2 * v >= int(nodes.size()); }
  static int depth_of(int v);
};

// Builds the tree of nested halvings on X0.  Requires m <= 63 (colors are a
// uint64 bitmask) and height <= 30.  Unless allow_small is set,
// |X0| >= 2^{height(m+1)} is enforced so every fragment is nonempty; with
// allow_small the build proceeds until an internal fragment is too small to
// split, which raises PreconditionError.
ColoredTree build_ordered_tree(const PermFamily& fam,
                               std::span<const int32_t> x0, int height,
                               bool allow_small = false);

// ----- monochromatic subdivisions ----------------------------------------

// An embedding of the complete binary tree S of height h into a colored
// tree: map[s] is the image of S-vertex s (heap indices, map[0] unused).
// Each S-vertex's two children map into the subtrees of the two distinct
// children of its own image, and every non-leaf layer of S lands on one
// color, recorded in layer_colors (leaf images are unconstrained; the
// counting argument never reads them).
struct Subdivision {
  int h = 0;
  bool found = false;
  bool height_precondition = false;  // tree height >= g_upper(c, h)
  std::vector<int32_t> map;          // size 2^{h+1} when found
  std::vector<uint64_t> layer_colors;  // size h when found
};

// Recursive pigeonhole search from the halving-tree argument: with c the
// number of distinct colors present, descend d' = ceil(log2(c^{h-1}+1))
// levels, find height-(h-1) subdivisions under each vertex of that layer,
// and join the first two (in heap order) whose layer colorings coincide at
// their lowest common ancestor.  Below the g_upper(c, h) height bound the
// search still runs and reports found/not-found.
Subdivision mono_subdivision(const ColoredTree& tree, int h);

// Independent validity walk, sharing no code with the search: checks map
// injectivity and range, that each S-vertex's children land in the two
// separate child subtrees of its image, and that every non-leaf layer
// matches its recorded color.
bool subdivision_valid(const ColoredTree& tree, const Subdivision& sub);

// Tree route: builds the halving tree of height g_upper(2^m, h) on [n] with
// h = ceil(log2 k), extracts a monochromatic-layer subdivision of height h,
// picks the minimum of each leaf fragment, and returns the k smallest picks.
// Guarantee 2^h requires n >= 2^{g(m+1)}; below that the call fails unless
// best_effort is set.  Requires 1 <= k <= 16, 1 <= m <= 63.  When the out
// parameters are non-null they receive the tree and the subdivision.
Witness tree_witness(const PermFamily& fam, int k, bool best_effort = false,
                     ColoredTree* tree_out = nullptr,
                     Subdivision* sub_out = nullptr);

}  // namespace shatter
