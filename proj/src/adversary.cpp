#include "shatter/adversary.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

#include "shatter/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shatter {

namespace {

void validate_elements(int n, std::span<const int32_t> xs, const char* who) {
  if (xs.empty())
    throw std::invalid_argument(std::string(who) + ": element set is empty");
  for (size_t j = 0; j < xs.size(); ++j) {
    if (xs[j] < 1 || xs[j] > n)
      throw std::invalid_argument(std::string(who) + ": element out of range");
    if (j > 0 && xs[j] <= xs[j - 1])
      throw std::invalid_argument(std::string(who) +
                                  ": elements must be strictly ascending");
  }
}

int worker_count(size_t work) {
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  if (work < 2) return 1;
  return int(std::min<size_t>(size_t(threads), work));
}

}  // namespace

// ----- ordered pairs -----------------------------------------------------

OrderedPair ordered_pair(const PermFamily& fam, std::span<const int32_t> xs,
                         bool allow_small) {
  validate_elements(fam.n(), xs, "ordered_pair");
  if (xs.size() < 2)
    throw std::invalid_argument("ordered_pair: need at least two elements");
  int m = fam.size();
  if (!allow_small) {
    // below 2^{m+1} the floor(|X|/2^{m+1}) guarantee is zero
    bool big_enough = m + 1 <= 62 && xs.size() >= (size_t(1) << (m + 1));
    if (!big_enough)
      throw PreconditionError(
          "ordered_pair: |X| < 2^(m+1), size guarantee degenerates");
  }

  size_t half = xs.size() / 2;
  std::vector<int32_t> a(xs.begin(), xs.begin() + half);
  std::vector<int32_t> b(xs.begin() + half, xs.begin() + 2 * half);

  std::vector<int32_t> pool;
  for (int i = 0; i < m; ++i) {
    const Permutation& rho = fam[i];
    size_t l = a.size();
    pool.clear();
    pool.insert(pool.end(), a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    // top slice: the l latest elements under rho
    std::nth_element(pool.begin(), pool.begin() + ptrdiff_t(l), pool.end(),
                     [&rho](int32_t x, int32_t y) {
                       return rho.rank(x) > rho.rank(y);
                     });
    auto in_a = [&a](int32_t x) {
      return std::binary_search(a.begin(), a.end(), x);
    };
    size_t ca = 0;
    for (size_t j = 0; j < l; ++j) ca += in_a(pool[j]) ? 1 : 0;

    std::vector<int32_t> na, nb;
    if (ca >= l - ca) {
      // A dominates the slice (ties go to A): keep A inside it, B below it
      for (size_t j = 0; j < l; ++j)
        if (in_a(pool[j])) na.push_back(pool[j]);
      for (size_t j = l; j < pool.size(); ++j)
        if (!in_a(pool[j])) nb.push_back(pool[j]);
    } else {
      for (size_t j = 0; j < l; ++j)
        if (!in_a(pool[j])) nb.push_back(pool[j]);
      for (size_t j = l; j < pool.size(); ++j)
        if (in_a(pool[j])) na.push_back(pool[j]);
    }
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    a = std::move(na);
    b = std::move(nb);
  }

  OrderedPair out{std::move(a), std::move(b), {}};
  out.a_first.resize(size_t(m));
  for (int i = 0; i < m; ++i) {
    const Permutation& rho = fam[i];
    int32_t max_a = 0, min_a = fam.n() + 1, max_b = 0, min_b = fam.n() + 1;
    for (int32_t x : out.a) {
      max_a = std::max(max_a, rho.rank(x));
      min_a = std::min(min_a, rho.rank(x));
    }
    for (int32_t x : out.b) {
      max_b = std::max(max_b, rho.rank(x));
      min_b = std::min(min_b, rho.rank(x));
    }
    if (max_a < min_b)
      out.a_first[size_t(i)] = 1;
    else if (max_b < min_a)
      out.a_first[size_t(i)] = 0;
    else
      throw StructuralAnomaly("ordered_pair: halving output not ordered");
  }
  return out;
}

// ----- chain route ---------------------------------------------------------

Witness chain_witness(const PermFamily& fam, int k, bool best_effort,
                      std::vector<OrderedPair>* trace) {
  if (fam.size() < 1) throw std::invalid_argument("chain_witness: family is empty");
  if (k < 1 || k > 16)
    throw std::invalid_argument("chain_witness: k must be in [1, 16]");
  int m = fam.size();
  int64_t exponent = int64_t(k) * (m + 1);
  bool ok = exponent <= 62 && uint64_t(fam.n()) >= (uint64_t(1) << exponent);
  if (!ok && !best_effort)
    throw PreconditionError(
        "chain_witness: n < 2^(k(m+1)); enable best-effort to run anyway");

  std::vector<int32_t> current(size_t(fam.n()));
  for (int x = 1; x <= fam.n(); ++x) current[size_t(x) - 1] = x;

  std::vector<int32_t> picks;
  picks.reserve(size_t(k));
  for (int i = 0; i < k; ++i) {
    if (current.size() >= 2) {
      OrderedPair pair = ordered_pair(fam, current, true);
      picks.push_back(pair.b.front());
      current = pair.a;
      if (trace) trace->push_back(std::move(pair));
    } else if (current.size() == 1) {
      // best-effort leftovers: take the lone element and stop halving
      picks.push_back(current.front());
      current.clear();
    } else {
      throw PreconditionError(
          "chain_witness: ground set exhausted before k picks");
    }
  }

  Witness w;
  w.k = k;
  w.subset = std::move(picks);
  std::sort(w.subset.begin(), w.subset.end());
  if (std::adjacent_find(w.subset.begin(), w.subset.end()) != w.subset.end())
    throw StructuralAnomaly("chain_witness: picks collided");
  w.guaranteed_bound = int64_t(1) << (k - 1);
  w.achieved_count = count_induced(fam, w.subset);
  w.method = "chain";
  w.valid_precondition = ok;
  return w;
}

// ----- tree route ----------------------------------------------------------

int64_t g_upper(uint64_t c, int h) {
  if (c < 1) throw std::invalid_argument("g_upper: c must be >= 1");
  if (h < 0) throw std::invalid_argument("g_upper: h must be >= 0");
  if (h == 0) return 0;
  // ceil(log2(c^{h-1} + 1)) equals the bit length of c^{h-1}
  return int64_t(h) * bit_length_pow(c, uint64_t(h - 1));
}

int ColoredTree::depth_of(int v) {
  return 31 - __builtin_clz(unsigned(v));
}

ColoredTree build_ordered_tree(const PermFamily& fam,
                               std::span<const int32_t> x0, int height,
                               bool allow_small) {
  validate_elements(fam.n(), x0, "build_ordered_tree");
  int m = fam.size();
  if (m > 63)
    throw std::invalid_argument(
        "build_ordered_tree: more than 63 members, colors exceed the mask");
  if (height < 0 || height > 30)
    throw std::invalid_argument("build_ordered_tree: height out of range");
  if (!allow_small) {
    int64_t exponent = int64_t(height) * (m + 1);
    bool big_enough =
        exponent <= 62 && x0.size() >= (size_t(1) << exponent);
    if (!big_enough)
      throw PreconditionError(
          "build_ordered_tree: |X0| < 2^(height(m+1)), fragments could empty");
  }

  ColoredTree tree;
  tree.height = height;
  tree.m = m;
  tree.nodes.resize(size_t(1) << (height + 1));
  tree.nodes[1].fragment.assign(x0.begin(), x0.end());

  uint64_t ones = m == 0 ? 0 : (~uint64_t(0) >> (64 - m));
  for (int level = 0; level <= height; ++level) {
    int lo = 1 << level, hi = 1 << (level + 1);
    std::atomic<bool> too_small{false};
    std::exception_ptr error = nullptr;
    int threads = worker_count(size_t(hi - lo));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int v = lo; v < hi; ++v) {
      try {
        TreeVertex& node = tree.nodes[size_t(v)];
        if (node.fragment.size() >= 2) {
          node.pair = ordered_pair(fam, node.fragment, true);
          uint64_t color = 0;
          for (int i = 0; i < m; ++i)
            if (node.pair.a_first[size_t(i)]) color |= uint64_t(1) << i;
          node.color = color;
          if (!tree.is_leaf(v)) {
            tree.nodes[size_t(2 * v)].fragment = node.pair.a;
            tree.nodes[size_t(2 * v) + 1].fragment = node.pair.b;
          }
        } else {
          // singleton: vacuously ordered, both directions; record A-first
          node.pair.a_first.assign(size_t(m), 1);
          node.color = ones;
          if (!tree.is_leaf(v)) too_small.store(true);
        }
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical(shatter_tree_error)
#endif
        if (!error) error = std::current_exception();
      }
    }
    (void)threads;
    if (error) std::rethrow_exception(error);
    if (too_small.load())
      throw PreconditionError(
          "build_ordered_tree: fragment too small to split");
  }
  return tree;
}

// ----- subdivision search --------------------------------------------------

namespace {

struct Embedding {
  std::vector<int32_t> map;       // heap indices of the sub-tree, [0] unused
  std::vector<uint64_t> colors;   // non-leaf layer colors, one per layer
};

int lowest_common_ancestor(int u, int v) {
  while (u != v) {
    if (u > v)
      u >>= 1;
    else
      v >>= 1;
  }
  return u;
}

// re-index a sub-embedding as the left/right child subtree of a new root
int graft_left(int s) { return s + (1 << ColoredTree::depth_of(s)); }
int graft_right(int s) { return s + (2 << ColoredTree::depth_of(s)); }

std::optional<Embedding> search_embedding(const ColoredTree& tree, int tv,
                                          int h, uint64_t c, bool parallel) {
  if (h == 0) {
    Embedding e;
    e.map = {0, int32_t(tv)};
    return e;
  }
  int64_t depth_needed = bit_length_pow(c, uint64_t(h - 1));
  if (int64_t(ColoredTree::depth_of(tv)) + depth_needed > int64_t(tree.height))
    return std::nullopt;
  int d = int(depth_needed);

  int lo = tv << d;
  int count = 1 << d;
  std::vector<std::optional<Embedding>> subs(static_cast<size_t>(count));
  if (parallel && count > 1) {
    std::exception_ptr error = nullptr;
    int threads = worker_count(size_t(count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int pos = 0; pos < count; ++pos) {
      try {
        subs[size_t(pos)] = search_embedding(tree, lo + pos, h - 1, c, false);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical(shatter_subdiv_error)
#endif
        if (!error) error = std::current_exception();
      }
    }
    (void)threads;
    if (error) std::rethrow_exception(error);
  } else {
    for (int pos = 0; pos < count; ++pos)
      subs[size_t(pos)] = search_embedding(tree, lo + pos, h - 1, c, false);
  }

  // pigeonhole: first pair in layer order whose colorings coincide
  std::map<std::vector<uint64_t>, int> seen;
  for (int pos = 0; pos < count; ++pos) {
    if (!subs[size_t(pos)]) continue;
    auto [it, fresh] = seen.try_emplace(subs[size_t(pos)]->colors, pos);
    if (fresh) continue;

    const Embedding& left = *subs[size_t(it->second)];
    const Embedding& right = *subs[size_t(pos)];
    int w = lowest_common_ancestor(lo + it->second, lo + pos);
    Embedding e;
    e.map.assign(size_t(1) << (h + 1), 0);
    e.map[1] = int32_t(w);
    for (int s = 1; s < (1 << h); ++s) {
      e.map[size_t(graft_left(s))] = left.map[size_t(s)];
      e.map[size_t(graft_right(s))] = right.map[size_t(s)];
    }
    e.colors.reserve(size_t(h));
    e.colors.push_back(tree.nodes[size_t(w)].color);
    e.colors.insert(e.colors.end(), left.colors.begin(), left.colors.end());
    return e;
  }
  return std::nullopt;
}

// v inside the subtree rooted at a (inclusive)
bool in_subtree(int a, int v) {
  while (v > a) v >>= 1;
  return v == a;
}

}  // namespace

Subdivision mono_subdivision(const ColoredTree& tree, int h) {
  if (tree.height < 0 ||
      tree.nodes.size() != (size_t(1) << (tree.height + 1)))
    throw std::invalid_argument("mono_subdivision: malformed tree");
  if (h < 0 || h > 30)
    throw std::invalid_argument("mono_subdivision: h out of range");

  std::set<uint64_t> palette;
  for (size_t v = 1; v < tree.nodes.size(); ++v)
    palette.insert(tree.nodes[v].color);
  uint64_t c = palette.size();

  Subdivision sub;
  sub.h = h;
  sub.height_precondition = int64_t(tree.height) >= g_upper(c, h);

  std::optional<Embedding> e = search_embedding(tree, 1, h, c, true);
  if (e) {
    sub.found = true;
    sub.map = std::move(e->map);
    sub.layer_colors = std::move(e->colors);
    if (!subdivision_valid(tree, sub))
      throw StructuralAnomaly(
          "mono_subdivision: output failed independent validation");
  }
  return sub;
}

bool subdivision_valid(const ColoredTree& tree, const Subdivision& sub) {
  if (!sub.found || sub.h < 0) return false;
  size_t verts = size_t(1) << (sub.h + 1);
  if (sub.map.size() != verts) return false;
  if (sub.layer_colors.size() != size_t(sub.h)) return false;

  std::set<int32_t> images;
  for (size_t s = 1; s < verts; ++s) {
    int32_t iv = sub.map[s];
    if (iv < 1 || iv > tree.vertex_count()) return false;
    if (!images.insert(iv).second) return false;
  }
  // children must land in the two separate child subtrees of their parent's
  // image; that containment is what makes leaf fragments pairwise disjoint
  for (int p = 1; p < (1 << sub.h); ++p) {
    int ip = sub.map[size_t(p)];
    if (tree.is_leaf(ip)) return false;
    int c1 = sub.map[size_t(2 * p)];
    int c2 = sub.map[size_t(2 * p) + 1];
    bool straight = in_subtree(2 * ip, c1) && in_subtree(2 * ip + 1, c2);
    bool crossed = in_subtree(2 * ip, c2) && in_subtree(2 * ip + 1, c1);
    if (!straight && !crossed) return false;
  }
  for (int j = 0; j < sub.h; ++j) {
    for (int s = 1 << j; s < (1 << (j + 1)); ++s)
      if (tree.nodes[size_t(sub.map[size_t(s)])].color != sub.layer_colors[size_t(j)])
        return false;
  }
  return true;
}

Witness tree_witness(const PermFamily& fam, int k, bool best_effort,
                     ColoredTree* tree_out, Subdivision* sub_out) {
  if (fam.size() < 1) throw std::invalid_argument("tree_witness: family is empty");
  if (fam.size() > 63)
    throw std::invalid_argument(
        "tree_witness: more than 63 members, colors exceed the mask");
  if (k < 1 || k > 16)
    throw std::invalid_argument("tree_witness: k must be in [1, 16]");

  int m = fam.size();
  int h = ceil_log2(uint64_t(k));
  int64_t height = g_upper(uint64_t(1) << m, h);
  int64_t exponent = height * (m + 1);
  bool ok = exponent <= 62 && uint64_t(fam.n()) >= (uint64_t(1) << exponent);
  if (!ok && !best_effort)
    throw PreconditionError(
        "tree_witness: n < 2^(g(m+1)); enable best-effort to run anyway");
  if (height > 30)
    throw PreconditionError(
        "tree_witness: required tree height exceeds any workable ground set");

  std::vector<int32_t> x0(size_t(fam.n()));
  for (int x = 1; x <= fam.n(); ++x) x0[size_t(x) - 1] = x;
  ColoredTree tree = build_ordered_tree(fam, x0, int(height), !ok);

  Subdivision sub = mono_subdivision(tree, h);
  if (!sub.found) {
    if (ok)
      throw StructuralAnomaly(
          "tree_witness: subdivision guaranteed but not found");
    throw PreconditionError(
        "tree_witness: no monochromatic subdivision below threshold");
  }

  std::vector<int32_t> picks;
  picks.reserve(size_t(1) << h);
  for (int s = 1 << h; s < (1 << (h + 1)); ++s)
    picks.push_back(tree.nodes[size_t(sub.map[size_t(s)])].fragment.front());
  std::sort(picks.begin(), picks.end());
  if (std::adjacent_find(picks.begin(), picks.end()) != picks.end())
    throw StructuralAnomaly("tree_witness: leaf picks collided");

  Witness w;
  w.k = k;
  w.subset.assign(picks.begin(), picks.begin() + k);
  w.guaranteed_bound = int64_t(1) << h;
  w.achieved_count = count_induced(fam, w.subset);
  w.method = "tree";
  w.valid_precondition = ok;

  if (sub_out) *sub_out = std::move(sub);
  if (tree_out) *tree_out = std::move(tree);
  return w;
}

}  // namespace shatter
