#include "shatter/lex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <type_traits>

namespace shatter {

int first_diff(const Point& x, const Point& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("first_diff: dimension mismatch");
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) return int(i) + 1;
  throw std::invalid_argument("first_diff: points are equal");
}

uint64_t pow_sat(uint64_t b, uint64_t d) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < d; ++i) {
    if (b != 0 && r > kU64Sat / b) return kU64Sat;
    r *= b;
  }
  return r;
}

namespace {

void check_cube(int b, int d) {
  if (b < 2) throw std::invalid_argument("cube: b < 2");
  if (d < 1) throw std::invalid_argument("cube: d < 1");
}

// integer keys cover b^d (b^{d+1} with the pivot prefix level); wider cubes
// sort by direct comparison instead
bool keys_fit(const CubePerm& p) {
  uint64_t levels = uint64_t(cube_d(p));
  if (std::holds_alternative<PivotLexPerm>(p)) ++levels;
  return pow_sat(uint64_t(cube_b(p)), levels) <= (uint64_t(1) << 62);
}

void check_point(const Point& x, int b, int d) {
  if (int(x.size()) != d) throw std::invalid_argument("point: wrong dimension");
  for (int32_t v : x)
    if (v < 1 || v > b) throw std::invalid_argument("point: coordinate out of range");
}

}  // namespace

LexPermutation::LexPermutation(int b, int d, std::vector<Permutation> components)
    : b_(b), d_(d), comps_(std::move(components)) {
  check_cube(b, d);
  if (int(comps_.size()) != d)
    throw std::invalid_argument("LexPermutation: need exactly d components");
  for (const auto& c : comps_)
    if (c.n() != b)
      throw std::invalid_argument("LexPermutation: component is not a permutation of [b]");
}

LexPermutation LexPermutation::random(int b, int d, Rng& rng) {
  std::vector<Permutation> comps;
  comps.reserve(size_t(d));
  for (int i = 0; i < d; ++i) comps.push_back(Permutation::random(b, rng));
  return LexPermutation(b, d, std::move(comps));
}

bool LexPermutation::less(const Point& x, const Point& y) const {
  check_point(x, b_, d_);
  check_point(y, b_, d_);
  int i = first_diff(x, y);
  const Permutation& c = component(i);
  return c.rank(x[size_t(i) - 1]) < c.rank(y[size_t(i) - 1]);
}

uint64_t LexPermutation::key(const Point& x) const {
  check_point(x, b_, d_);
  uint64_t k = 0;
  for (int i = 0; i < d_; ++i)
    k = k * uint64_t(b_) + uint64_t(comps_[size_t(i)].rank(x[size_t(i)]) - 1);
  return k;
}

PivotLexPerm::PivotLexPerm(int b, int d, int pivot, bool outer_reverse,
                           bool tie_reverse)
    : b(b), d(d), pivot(pivot), outer_reverse(outer_reverse),
      tie_reverse(tie_reverse) {
  check_cube(b, d);
  if (pivot < 1 || pivot > d)
    throw std::invalid_argument("PivotLexPerm: pivot out of range");
}

namespace {
inline uint64_t directed(int32_t v, int b, bool reverse) {
  return uint64_t(reverse ? b + 1 - v : v) - 1;
}
}  // namespace

bool PivotLexPerm::less(const Point& x, const Point& y) const {
  check_point(x, b, d);
  check_point(y, b, d);
  int32_t xp = x[size_t(pivot) - 1], yp = y[size_t(pivot) - 1];
  if (xp != yp)
    return directed(xp, b, outer_reverse) < directed(yp, b, outer_reverse);
  int j = first_diff(x, y);
  return directed(x[size_t(j) - 1], b, tie_reverse) <
         directed(y[size_t(j) - 1], b, tie_reverse);
}

uint64_t PivotLexPerm::key(const Point& x) const {
  check_point(x, b, d);
  uint64_t k = directed(x[size_t(pivot) - 1], b, outer_reverse);
  for (int i = 0; i < d; ++i)
    k = k * uint64_t(b) + directed(x[size_t(i)], b, tie_reverse);
  return k;
}

bool cube_less(const CubePerm& p, const Point& x, const Point& y) {
  return std::visit([&](const auto& q) { return q.less(x, y); }, p);
}

uint64_t cube_key(const CubePerm& p, const Point& x) {
  return std::visit([&](const auto& q) { return q.key(x); }, p);
}

int cube_b(const CubePerm& p) {
  return std::visit(
      [](const auto& q) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(q)>, LexPermutation>)
          return q.b();
        else
          return q.b;
      },
      p);
}

int cube_d(const CubePerm& p) {
  return std::visit(
      [](const auto& q) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(q)>, LexPermutation>)
          return q.d();
        else
          return q.d;
      },
      p);
}

void CubeFamily::add(CubePerm p) {
  if (cube_b(p) != b || cube_d(p) != d)
    throw std::invalid_argument("CubeFamily::add: member cube mismatch");
  members.push_back(std::move(p));
}

Point encode(uint64_t n, int b, int d, uint64_t x) {
  if (b < 2 || d < 1) throw std::invalid_argument("encode: bad cube");
  if (pow_sat(uint64_t(b), uint64_t(d)) < n)
    throw std::invalid_argument("encode: cube smaller than ground set");
  if (x < 1 || x > n) throw std::invalid_argument("encode: element out of range");
  Point p(static_cast<size_t>(d));
  uint64_t v = x - 1;
  for (int i = d - 1; i >= 0; --i) {
    p[size_t(i)] = int32_t(v % uint64_t(b)) + 1;
    v /= uint64_t(b);
  }
  return p;
}

uint64_t decode(uint64_t n, int b, int d, const Point& p) {
  if (b < 2 || d < 1) throw std::invalid_argument("decode: bad cube");
  check_point(p, b, d);
  uint64_t v = 0;
  for (int i = 0; i < d; ++i) {
    uint64_t dig = uint64_t(p[size_t(i)] - 1);
    if (v > (kU64Sat - dig) / uint64_t(b))
      throw std::invalid_argument("decode: point outside ground set");
    v = v * uint64_t(b) + dig;
  }
  if (v >= n) throw std::invalid_argument("decode: point outside ground set");
  return v + 1;
}

Permutation materialize(const CubePerm& p, std::span<const Point> points) {
  const size_t s = points.size();
  if (s == 0) throw std::invalid_argument("materialize: empty point list");
  std::vector<int32_t> idx(s);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int32_t> ranks(s);
  if (keys_fit(p)) {
    std::vector<uint64_t> keys(s);
    for (size_t i = 0; i < s; ++i) keys[i] = cube_key(p, points[i]);
    std::sort(idx.begin(), idx.end(), [&](int32_t a, int32_t c) {
      return keys[size_t(a)] < keys[size_t(c)];
    });
    for (size_t pos = 0; pos < s; ++pos) {
      if (pos > 0 && keys[size_t(idx[pos])] == keys[size_t(idx[pos - 1])])
        throw std::invalid_argument("materialize: duplicate points");
      ranks[size_t(idx[pos])] = int32_t(pos) + 1;
    }
    return Permutation(std::move(ranks));
  }
  // wide cube: validate and reject duplicates first so the comparator only
  // ever sees distinct points
  const int pb = cube_b(p), pd = cube_d(p);
  for (const Point& x : points) check_point(x, pb, pd);
  std::vector<int32_t> nat(idx);
  std::sort(nat.begin(), nat.end(), [&](int32_t a, int32_t c) {
    return points[size_t(a)] < points[size_t(c)];
  });
  for (size_t pos = 1; pos < s; ++pos)
    if (points[size_t(nat[pos - 1])] == points[size_t(nat[pos])])
      throw std::invalid_argument("materialize: duplicate points");
  std::sort(idx.begin(), idx.end(), [&](int32_t a, int32_t c) {
    return cube_less(p, points[size_t(a)], points[size_t(c)]);
  });
  for (size_t pos = 0; pos < s; ++pos) ranks[size_t(idx[pos])] = int32_t(pos) + 1;
  return Permutation(std::move(ranks));
}

int64_t count_induced_points(const CubeFamily& fam, std::span<const Point> points) {
  if (fam.members.empty()) throw std::invalid_argument("count: family is empty");
  std::vector<Point> xs(points.begin(), points.end());
  std::sort(xs.begin(), xs.end());  // natural order
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    throw std::invalid_argument("count: duplicate points");

  const size_t s = xs.size();
  if (s > 16) throw std::invalid_argument("count: more than 16 points unsupported");
  std::vector<uint64_t> codes;
  std::vector<uint64_t> keys(s);
  for (const auto& member : fam.members) {
    uint64_t code = 0;
    if (keys_fit(member)) {
      for (size_t i = 0; i < s; ++i) keys[i] = cube_key(member, xs[i]);
      for (size_t j = 0; j < s; ++j) {
        int cnt = 0;
        for (size_t l = 0; l < s; ++l) cnt += int(keys[l] <= keys[j]);
        code |= uint64_t(cnt - 1) << (4 * j);
      }
    } else {
      for (size_t j = 0; j < s; ++j) {  // xs is distinct, pairwise compare
        int cnt = 0;
        for (size_t l = 0; l < s; ++l)
          if (l != j) cnt += int(cube_less(member, xs[l], xs[j]));
        code |= uint64_t(cnt) << (4 * j);
      }
    }
    auto it = std::lower_bound(codes.begin(), codes.end(), code);
    if (it == codes.end() || *it != code) codes.insert(it, code);
  }
  return int64_t(codes.size());
}

PermFamily restrict_to_ground(const CubeFamily& fam, uint64_t n,
                              uint64_t element_budget) {
  if (n < 1) throw std::invalid_argument("restrict: n < 1");
  if (fam.members.empty()) throw std::invalid_argument("restrict: family is empty");
  if (n * uint64_t(fam.size()) > element_budget)
    throw BudgetError("restrict: n * m exceeds materialization budget");

  std::vector<Point> pts;
  pts.reserve(size_t(n));
  for (uint64_t x = 1; x <= n; ++x) pts.push_back(encode(n, fam.b, fam.d, x));

  PermFamily out(static_cast<int>(n));
  std::vector<uint64_t> keys(static_cast<size_t>(n));
  std::vector<int32_t> idx(static_cast<size_t>(n));
  for (const auto& member : fam.members) {
    std::iota(idx.begin(), idx.end(), 0);
    if (keys_fit(member)) {
      for (uint64_t i = 0; i < n; ++i)
        keys[size_t(i)] = cube_key(member, pts[size_t(i)]);
      std::sort(idx.begin(), idx.end(),
                [&](int32_t a, int32_t c) { return keys[size_t(a)] < keys[size_t(c)]; });
    } else {
      std::sort(idx.begin(), idx.end(), [&](int32_t a, int32_t c) {
        return cube_less(member, pts[size_t(a)], pts[size_t(c)]);
      });
    }
    std::vector<int32_t> ranks(static_cast<size_t>(n));
    for (uint64_t pos = 0; pos < n; ++pos)
      ranks[size_t(idx[size_t(pos)])] = int32_t(pos) + 1;
    out.add(Permutation(std::move(ranks)));
  }
  return out;
}

}  // namespace shatter
