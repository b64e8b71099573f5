#include "shatter/slices.hpp"

#include <algorithm>
#include <stdexcept>

namespace shatter {

namespace {

std::vector<Point> sorted_distinct(std::span<const Point> xs) {
  if (xs.empty()) throw std::invalid_argument("point set is empty");
  const size_t d = xs.front().size();
  for (const auto& p : xs)
    if (p.size() != d) throw std::invalid_argument("point set: dimension mismatch");
  std::vector<Point> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::invalid_argument("point set: duplicate points");
  return out;
}

}  // namespace

SliceDecomposition slice_decompose(std::span<const Point> xs) {
  auto pts = sorted_distinct(xs);
  SliceDecomposition out;
  if (pts.size() == 1) return out;

  // the split position is the first coordinate that is not constant
  const int d = int(pts.front().size());
  int spos = 0;
  for (int i = 1; i <= d && spos == 0; ++i) {
    for (const auto& p : pts) {
      if (p[size_t(i) - 1] != pts.front()[size_t(i) - 1]) {
        spos = i;
        break;
      }
    }
  }
  if (spos == 0) throw std::invalid_argument("slice_decompose: duplicate points");

  out.spos = spos;
  for (const auto& p : pts) out.parts[p[size_t(spos) - 1]].push_back(p);
  for (const auto& [v, part] : out.parts) out.slice.push_back(v);
  return out;
}

std::vector<int> index_set(std::span<const Point> xs) {
  auto pts = sorted_distinct(xs);
  if (pts.size() < 2)
    throw std::invalid_argument("index_set: need at least two points");
  std::vector<int> positions;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    positions.push_back(first_diff(pts[i], pts[i + 1]));
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()),
                  positions.end());
  return positions;
}

SliceProfile slice_profile(std::span<const Point> xs) {
  auto pts = sorted_distinct(xs);
  if (pts.size() < 2)
    throw std::invalid_argument("slice_profile: need at least two points");

  SliceProfile out;
  out.positions = index_set(pts);

  // widest slice per position: group on the length-(i-1) prefix, count
  // distinct i-th coordinates per group (points sharing a prefix are
  // consecutive in natural order)
  for (int i : out.positions) {
    int best = 0;
    size_t best_lo = 0, best_hi = 0;
    size_t lo = 0;
    while (lo < pts.size()) {
      size_t hi = lo + 1;
      while (hi < pts.size() &&
             std::equal(pts[hi].begin(), pts[hi].begin() + (i - 1),
                        pts[lo].begin()))
        ++hi;
      int distinct = 1;
      for (size_t j = lo + 1; j < hi; ++j)
        if (pts[j][size_t(i) - 1] != pts[j - 1][size_t(i) - 1]) ++distinct;
      if (distinct > best) {
        best = distinct;
        best_lo = lo;
        best_hi = hi;
      }
      lo = hi;
    }
    if (best >= 2) {
      out.max_slice[i] = best;
      out.witness[i] = std::vector<Point>(pts.begin() + ptrdiff_t(best_lo),
                                          pts.begin() + ptrdiff_t(best_hi));
    }
  }

  // greedy chain: record the current split, descend into the largest part
  std::vector<Point> z = pts;
  while (z.size() >= 2) {
    auto dec = slice_decompose(z);
    out.greedy_chain.emplace_back(*dec.spos, int(dec.slice.size()));
    out.greedy_product *= uint64_t(dec.slice.size());
    const std::vector<Point>* largest = nullptr;
    for (const auto& [v, part] : dec.parts)
      if (!largest || part.size() > largest->size()) largest = &part;
    z = *largest;
  }
  return out;
}

uint64_t product_bound(std::span<const Point> xs) {
  auto prof = slice_profile(xs);
  uint64_t bound = 1;
  for (const auto& [pos, width] : prof.max_slice)
    bound *= factorial(uint64_t(width));
  return bound;
}

StructureReport structure_analysis(std::span<const Point> xs, int k) {
  if (k < 2) throw std::invalid_argument("structure_analysis: k < 2");
  if (int(xs.size()) != k)
    throw std::invalid_argument("structure_analysis: |X| must equal k");

  StructureReport rep;
  rep.profile = slice_profile(xs);
  const int h = ceil_log2(uint64_t(k));

  uint64_t bound = 1;
  int widest = 0;
  for (const auto& [pos, width] : rep.profile.max_slice) {
    bound *= factorial(uint64_t(width));
    widest = std::max(widest, width);
  }

  if (bound >= 2 * uint64_t(k) || widest >= 3 ||
      int(rep.profile.positions.size()) > h) {
    rep.verdict = Verdict::Guaranteed2k;
    return rep;
  }

  // rigid branch: every slice is a pair and there are exactly h positions
  if (int(rep.profile.positions.size()) != h)
    throw StructuralAnomaly(
        "structure_analysis: pair slices with short index set");

  auto pts = sorted_distinct(xs);
  rep.verdict = Verdict::Rigid;
  rep.h = h;
  for (int i : rep.profile.positions) {
    std::array<int32_t, 2> pair{0, 0};
    size_t lo = 0;
    while (lo < pts.size()) {
      size_t hi = lo + 1;
      while (hi < pts.size() &&
             std::equal(pts[hi].begin(), pts[hi].begin() + (i - 1),
                        pts[lo].begin()))
        ++hi;
      std::vector<int32_t> values;
      for (size_t j = lo; j < hi; ++j) {
        int32_t v = pts[j][size_t(i) - 1];
        if (values.empty() || values.back() != v) values.push_back(v);
      }
      if (values.size() >= 2) {
        std::array<int32_t, 2> got{values[0], values[1]};
        if (pair[0] == 0)
          pair = got;
        else if (pair != got)
          throw StructuralAnomaly(
              "structure_analysis: same-position slices disagree");
      }
      lo = hi;
    }
    rep.rigid_slices[i] = pair;
  }
  return rep;
}

std::optional<Pattern> slice_perm(const LexPermutation& p,
                                  std::span<const Point> ys) {
  auto dec = slice_decompose(ys);
  if (!dec.spos) return std::nullopt;
  return induced_pattern(p.component(*dec.spos), dec.slice);
}

}  // namespace shatter
