#include "shatter/io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shatter {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("json: " + what);
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    bad(std::string("missing field \"") + name + "\"");
  }
  return j.at(name);
}

int64_t get_int(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) bad(std::string("\"") + name + "\" not an integer");
  return v.get<int64_t>();
}

uint64_t get_uint(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
    bad(std::string("\"") + name + "\" not a nonnegative integer");
  }
  return v.get<uint64_t>();
}

bool get_bool(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_boolean()) bad(std::string("\"") + name + "\" not a boolean");
  return v.get<bool>();
}

std::string get_string(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) bad(std::string("\"") + name + "\" not a string");
  return v.get<std::string>();
}

const Json& get_array(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_array()) bad(std::string("\"") + name + "\" not an array");
  return v;
}

std::vector<int32_t> int_list(const Json& v, const char* name) {
  if (!v.is_array()) bad(std::string("\"") + name + "\" not an array");
  std::vector<int32_t> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    if (!e.is_number_integer()) {
      bad(std::string("\"") + name + "\" holds a non-integer");
    }
    out.push_back(e.get<int32_t>());
  }
  return out;
}

}  // namespace

// ----- permutation families ---------------------------------------------

Json family_to_json(const PermFamily& fam) {
  Json perms = Json::array();
  for (const Permutation& p : fam.members()) perms.push_back(p.ranks());
  return Json{{"n", fam.n()}, {"perms", std::move(perms)}};
}

PermFamily family_from_json(const Json& j) {
  int64_t n = get_int(j, "n");
  if (n < 1 || n > 1'000'000'000) bad("\"n\" out of range");
  PermFamily fam(static_cast<int>(n));
  for (const Json& p : get_array(j, "perms")) {
    std::vector<int32_t> ranks = int_list(p, "perms");
    if (int64_t(ranks.size()) != n) bad("member length differs from \"n\"");
    // Permutation's own constructor rejects non-bijections; surface that as
    // malformed input rather than a library error
    try {
      fam.add(Permutation(std::move(ranks)));
    } catch (const std::invalid_argument& e) {
      bad(std::string("bad member: ") + e.what());
    }
  }
  return fam;
}

// ----- shattering certificates ------------------------------------------

namespace {

const char* mode_name(VerifyMode m) {
  return m == VerifyMode::Exhaustive ? "exhaustive" : "sampled";
}

VerifyMode mode_value(const std::string& s) {
  if (s == "exhaustive") return VerifyMode::Exhaustive;
  if (s == "sampled") return VerifyMode::Sampled;
  bad("\"mode\" must be \"exhaustive\" or \"sampled\"");
}

}  // namespace

Json certificate_to_json(const ShatterCertificate& c) {
  return Json{{"k", c.k},
              {"t", c.t},
              {"mode", mode_name(c.mode)},
              {"samples", c.samples},
              {"seed", c.seed},
              {"min_count", c.min_count},
              {"witness", c.witness},
              {"passed", c.passed}};
}

ShatterCertificate certificate_from_json(const Json& j) {
  ShatterCertificate c;
  c.k = int(get_int(j, "k"));
  c.t = get_int(j, "t");
  c.mode = mode_value(get_string(j, "mode"));
  c.samples = get_uint(j, "samples");
  c.seed = get_uint(j, "seed");
  c.min_count = get_int(j, "min_count");
  c.witness = int_list(get_array(j, "witness"), "witness");
  c.passed = get_bool(j, "passed");
  return c;
}

// ----- cube families ------------------------------------------------------

namespace {

Json cube_member_json(const CubePerm& m) {
  if (const auto* lex = std::get_if<LexPermutation>(&m)) {
    Json comps = Json::array();
    for (int i = 1; i <= lex->d(); ++i) {
      comps.push_back(lex->component(i).ranks());
    }
    return comps;
  }
  const auto& pv = std::get<PivotLexPerm>(m);
  return Json{{"pivot", pv.pivot},
              {"outer_reverse", pv.outer_reverse},
              {"tie_reverse", pv.tie_reverse}};
}

CubePerm cube_member_from_json(const Json& v, int b, int d) {
  if (v.is_object()) {
    int64_t pivot = get_int(v, "pivot");
    if (pivot < 1 || pivot > d) bad("\"pivot\" out of range");
    return PivotLexPerm(b, d, int(pivot), get_bool(v, "outer_reverse"),
                        get_bool(v, "tie_reverse"));
  }
  if (!v.is_array()) bad("member neither component list nor pivot object");
  if (int64_t(v.size()) != d) bad("member component count differs from \"d\"");
  std::vector<Permutation> comps;
  comps.reserve(size_t(d));
  for (const Json& comp : v) {
    std::vector<int32_t> ranks = int_list(comp, "members");
    if (int64_t(ranks.size()) != b) bad("component length differs from \"b\"");
    try {
      comps.emplace_back(std::move(ranks));
    } catch (const std::invalid_argument& e) {
      bad(std::string("bad component: ") + e.what());
    }
  }
  return LexPermutation(b, d, std::move(comps));
}

}  // namespace

Json cube_to_json(const CubeFamily& fam, std::optional<uint64_t> n) {
  Json members = Json::array();
  for (const CubePerm& m : fam.members) members.push_back(cube_member_json(m));
  Json j{{"b", fam.b}, {"d", fam.d}, {"members", std::move(members)}};
  if (n) j["n"] = *n;
  return j;
}

LoadedCube cube_from_json(const Json& j) {
  int64_t b = get_int(j, "b");
  int64_t d = get_int(j, "d");
  if (b < 1 || b > 1'000'000) bad("\"b\" out of range");
  if (d < 1 || d > 1'000'000) bad("\"d\" out of range");
  LoadedCube out;
  out.cube = CubeFamily(int(b), int(d));
  for (const Json& m : get_array(j, "members")) {
    out.cube.add(cube_member_from_json(m, int(b), int(d)));
  }
  if (j.contains("n")) out.n = get_uint(j, "n");
  return out;
}

namespace {

const char* lex_mode_name(LexCheckMode m) {
  return m == LexCheckMode::Exhaustive ? "exhaustive" : "sampled";
}

LexCheckMode lex_mode_value(const std::string& s) {
  if (s == "exhaustive") return LexCheckMode::Exhaustive;
  if (s == "sampled") return LexCheckMode::Sampled;
  bad("\"mode\" must be \"exhaustive\" or \"sampled\"");
}

}  // namespace

Json lex_certificate_to_json(const LexShatterCertificate& c) {
  return Json{{"b", c.b},
              {"d", c.d},
              {"k", c.k},
              {"mode", lex_mode_name(c.mode)},
              {"space", c.space},
              {"checked", c.checked},
              {"seed", c.seed},
              {"passed", c.passed},
              {"fail_positions", c.fail_positions},
              {"fail_orders", c.fail_orders}};
}

LexShatterCertificate lex_certificate_from_json(const Json& j) {
  LexShatterCertificate c;
  c.b = int(get_int(j, "b"));
  c.d = int(get_int(j, "d"));
  c.k = int(get_int(j, "k"));
  c.mode = lex_mode_value(get_string(j, "mode"));
  c.space = get_uint(j, "space");
  c.checked = get_uint(j, "checked");
  c.seed = get_uint(j, "seed");
  c.passed = get_bool(j, "passed");
  for (const Json& p : get_array(j, "fail_positions")) {
    if (!p.is_number_integer()) bad("\"fail_positions\" holds a non-integer");
    c.fail_positions.push_back(p.get<int>());
  }
  for (const Json& o : get_array(j, "fail_orders")) {
    c.fail_orders.push_back(int_list(o, "fail_orders"));
  }
  return c;
}

// ----- constructions ------------------------------------------------------

Json construction_to_json(const Construction& c) {
  return Json{{"n", c.n},
              {"k", c.k},
              {"b", c.b},
              {"d", c.d},
              {"guarantee", c.guarantee},
              {"lex_core_size", c.lex_core_size},
              {"seed", c.seed},
              {"family", cube_to_json(c.cube)},
              {"core_certificate", lex_certificate_to_json(c.core_certificate)}};
}

Construction construction_from_json(const Json& j) {
  Construction c;
  c.n = get_uint(j, "n");
  c.k = int(get_int(j, "k"));
  c.b = int(get_int(j, "b"));
  c.d = int(get_int(j, "d"));
  c.guarantee = int(get_int(j, "guarantee"));
  c.lex_core_size = int(get_int(j, "lex_core_size"));
  c.seed = get_uint(j, "seed");
  LoadedCube loaded = cube_from_json(field(j, "family"));
  c.cube = std::move(loaded.cube);
  if (c.cube.b != c.b || c.cube.d != c.d) {
    bad("construction and embedded family disagree on b/d");
  }
  if (c.lex_core_size < 0 || c.lex_core_size > c.cube.size()) {
    bad("\"lex_core_size\" out of range");
  }
  c.core_certificate = lex_certificate_from_json(field(j, "core_certificate"));
  return c;
}

Json sampled_point_certificate_to_json(const SampledPointCertificate& c) {
  return Json{{"k", c.k},
              {"t", c.t},
              {"mode", "sampled"},
              {"samples", c.samples},
              {"seed", c.seed},
              {"min_count", c.min_count},
              {"witness", c.witness},
              {"passed", c.passed}};
}

// ----- adversary output ---------------------------------------------------

Json witness_to_json(const Witness& w) {
  return Json{{"k", w.k},
              {"guaranteed_bound", w.guaranteed_bound},
              {"achieved_count", w.achieved_count},
              {"witness", w.subset},
              {"method", w.method},
              {"valid_precondition", w.valid_precondition},
              {"seed", w.seed}};
}

Witness witness_from_json(const Json& j) {
  Witness w;
  w.k = int(get_int(j, "k"));
  w.guaranteed_bound = get_int(j, "guaranteed_bound");
  w.achieved_count = get_int(j, "achieved_count");
  w.subset = int_list(get_array(j, "witness"), "witness");
  w.method = get_string(j, "method");
  if (w.method != "chain" && w.method != "tree") {
    bad("\"method\" must be \"chain\" or \"tree\"");
  }
  w.valid_precondition = get_bool(j, "valid_precondition");
  w.seed = get_uint(j, "seed");
  return w;
}

Json tree_dump_json(const ColoredTree& t) {
  size_t count = static_cast<size_t>(t.vertex_count());
  Json sizes = Json::array();
  Json colors = Json::array();
  for (size_t v = 1; v <= count; ++v) {
    sizes.push_back(t.nodes[v].fragment.size());
    if (!t.is_leaf(int32_t(v))) colors.push_back(t.nodes[v].color);
  }
  return Json{{"height", t.height},
              {"m", t.m},
              {"fragment_sizes", std::move(sizes)},
              {"colors", std::move(colors)}};
}

// ----- files --------------------------------------------------------------

FileKind sniff_kind(const Json& j) {
  if (!j.is_object()) bad("top-level document not an object");
  if (j.contains("perms")) return FileKind::PermFamily;
  if (j.contains("guarantee")) return FileKind::Construction;
  if (j.contains("members")) return FileKind::CubeFamily;
  bad("not a family document (no \"perms\", \"guarantee\", or \"members\")");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path);
}

}  // namespace shatter
