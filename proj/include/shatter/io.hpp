#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "shatter/adversary.hpp"
#include "shatter/lex.hpp"
#include "shatter/lexshatter.hpp"
#include "shatter/perm.hpp"
#include "shatter/verify.hpp"

namespace shatter {

using Json = nlohmann::json;

// All *_from_json readers validate shape and field types explicitly and throw
// std::invalid_argument naming the offending field, so callers can map any
// malformed input to a usage error without touching library exceptions.

// ----- permutation families ---------------------------------------------
// {"n": int, "perms": [[rank of 1, ..., rank of n], ...]}

Json family_to_json(const PermFamily& fam);
PermFamily family_from_json(const Json& j);

// ----- shattering certificates ------------------------------------------
// mirrors ShatterCertificate; mode is "exhaustive" | "sampled"

Json certificate_to_json(const ShatterCertificate& c);
ShatterCertificate certificate_from_json(const Json& j);

// ----- cube families ------------------------------------------------------
// {"b": int, "d": int, "members": [...]}.  A plain member is its component
// rank lists, [[component ranks...] x d].  A pivot member is the object
// {"pivot": i, "outer_reverse": bool, "tie_reverse": bool}.  An optional
// top-level "n" records the intended ground-set restriction.

Json cube_to_json(const CubeFamily& fam,
                  std::optional<uint64_t> n = std::nullopt);

struct LoadedCube {
  CubeFamily cube;
  std::optional<uint64_t> n;
};
LoadedCube cube_from_json(const Json& j);

Json lex_certificate_to_json(const LexShatterCertificate& c);
LexShatterCertificate lex_certificate_from_json(const Json& j);

// ----- constructions ------------------------------------------------------
// bundles the cube with its parameters and the core certificate

Json construction_to_json(const Construction& c);
Construction construction_from_json(const Json& j);

Json sampled_point_certificate_to_json(const SampledPointCertificate& c);

// ----- adversary output ---------------------------------------------------

Json witness_to_json(const Witness& w);
Witness witness_from_json(const Json& j);

// Debug dump: fragment size of every vertex in heap order, plus the color of
// every internal vertex (leaves carry no comparison).
Json tree_dump_json(const ColoredTree& t);

// ----- files --------------------------------------------------------------

// which of the three family-bearing documents a JSON object is
enum class FileKind { PermFamily, CubeFamily, Construction };
FileKind sniff_kind(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace shatter
