// Command surface for the shattering toolkit.  Thin dispatcher: all real
// work lives in the library; this file parses flags, moves JSON/CSV files
// around, and maps library errors onto the stable exit-code contract
//   0 pass, 1 verify-fail, 2 usage, 3 budget, 4 precondition.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shatter/adversary.hpp"
#include "shatter/exact.hpp"
#include "shatter/io.hpp"
#include "shatter/lexshatter.hpp"
#include "shatter/verify.hpp"

namespace {

using namespace shatter;

// Accepts plain decimals and "B^E" powers, so sweeps can say 2^32.
uint64_t parse_count(const std::string& s) {
  try {
    size_t caret = s.find('^');
    if (caret == std::string::npos) {
      size_t used = 0;
      uint64_t v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    uint64_t base = parse_count(s.substr(0, caret));
    uint64_t exp = parse_count(s.substr(caret + 1));
    uint64_t v = 1;
    for (uint64_t i = 0; i < exp; ++i) {
      if (base != 0 && v > kU64Sat / base)
        throw std::invalid_argument("count overflows: " + s);
      v *= base;
    }
    return v;
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("count out of range: " + s);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a count: " + s +
                                " (expected decimal or B^E)");
  }
}

int small_int(uint64_t v, const char* what) {
  if (v > 0x7fffffff)
    throw std::invalid_argument(std::string(what) + " too large to materialize");
  return int(v);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

const char* pass_str(bool b) { return b ? "true" : "false"; }

// ----- shared flags --------------------------------------------------------

struct Common {
  uint64_t budget = 10'000'000;  // subset / constraint enumeration cap
  uint64_t samples = 100'000;
  uint64_t seed = 0;
  int jobs = 0;
  std::string mode = "auto";  // auto | exhaustive | sampled
};

VerifyOptions verify_options(const Common& c) {
  VerifyOptions o;
  o.subset_budget = c.budget;
  o.samples = c.samples;
  o.seed = c.seed;
  o.jobs = c.jobs;
  return o;
}

LexCheckOptions lex_options(const Common& c) {
  LexCheckOptions o;
  o.constraint_budget = c.budget;
  o.samples = int64_t(c.samples);
  o.seed = c.seed;
  o.jobs = c.jobs;
  return o;
}

VerifyMode resolve_mode(const Common& c, uint64_t n, int k) {
  if (c.mode == "exhaustive") return VerifyMode::Exhaustive;
  if (c.mode == "sampled") return VerifyMode::Sampled;
  return binomial(n, uint64_t(k)) <= c.budget ? VerifyMode::Exhaustive
                                              : VerifyMode::Sampled;
}

void maybe_write(const std::string& path, const Json& j) {
  if (!path.empty()) write_json_file(path, j);
}

// ----- construct ------------------------------------------------------------

struct ConstructArgs {
  std::string kind;
  std::string n_text;
  int k = 0;
  int m = 0;
  int64_t t = 0;
  std::string out, cert, ground;
  Common common;
};

// Builds, writes the family, verifies at the construction's guarantee
// (or --t when given), writes the certificate.  Returns the exit code.
int run_construct(const ConstructArgs& a) {
  uint64_t n = parse_count(a.n_text);
  const Common& c = a.common;

  if (a.kind == "monotone") {
    if (a.t < 1 || a.t > 2)
      throw std::invalid_argument("monotone construction needs --t 1 or 2");
    int k = a.k > 0 ? a.k : int(std::max<int64_t>(2, a.t));
    PermFamily fam = monotone_family(small_int(n, "n"), int(a.t));
    maybe_write(a.out, family_to_json(fam));
    maybe_write(a.ground, family_to_json(fam));  // already a ground family
    ShatterCertificate cert =
        verify_t_shattering(fam, k, a.t, resolve_mode(c, n, k), verify_options(c));
    maybe_write(a.cert, certificate_to_json(cert));
    std::cout << "construct kind=monotone n=" << n << " k=" << k
              << " t=" << a.t << " size=" << fam.size()
              << " passed=" << pass_str(cert.passed) << "\n";
    return cert.passed ? 0 : 1;
  }

  if (a.kind == "random") {
    if (a.m < 1) throw std::invalid_argument("random construction needs --m");
    PermFamily fam = random_family(small_int(n, "n"), a.m, c.seed);
    maybe_write(a.out, family_to_json(fam));
    maybe_write(a.ground, family_to_json(fam));
    bool passed = true;
    if (a.k >= 1 && a.t >= 1) {  // a target makes this a verified build
      ShatterCertificate cert = verify_t_shattering(
          fam, a.k, a.t, resolve_mode(c, n, a.k), verify_options(c));
      maybe_write(a.cert, certificate_to_json(cert));
      passed = cert.passed;
    }
    std::cout << "construct kind=random n=" << n << " m=" << a.m
              << " seed=" << c.seed << " passed=" << pass_str(passed) << "\n";
    return passed ? 0 : 1;
  }

  if (a.k < 1) throw std::invalid_argument("--k is required for this kind");

  if (a.kind == "scrambling") {
    ScramblingResult r =
        build_scrambling_family(small_int(n, "n"), a.k, c.seed, verify_options(c));
    maybe_write(a.out, family_to_json(r.family));
    maybe_write(a.ground, family_to_json(r.family));
    maybe_write(a.cert, certificate_to_json(r.certificate));
    std::cout << "construct kind=scrambling n=" << n << " k=" << a.k
              << " t=" << r.certificate.t << " seed=" << c.seed
              << " size=" << r.family.size() << " rounds=" << r.rounds
              << " passed=" << pass_str(r.certificate.passed) << "\n";
    return r.certificate.passed ? 0 : 1;
  }

  Construction built = a.kind == "loglog"
                           ? build_loglog_family(n, a.k, c.seed, lex_options(c))
                           : build_sqrtlog_family(n, a.k, c.seed, lex_options(c));
  maybe_write(a.out, construction_to_json(built));
  if (!a.ground.empty())
    write_json_file(a.ground, family_to_json(ground_family(built)));

  int64_t t = a.t > 0 ? a.t : built.guarantee;
  uint64_t ground_cost = n <= kU64Sat / uint64_t(built.cube.size())
                             ? n * uint64_t(built.cube.size())
                             : kU64Sat;
  bool ground_fits =
      ground_cost <= 200'000'000 && binomial(n, uint64_t(a.k)) <= c.budget;

  bool passed = false;
  Json cert_json;
  if (c.mode == "exhaustive" || (c.mode == "auto" && ground_fits)) {
    ShatterCertificate cert = verify_t_shattering(
        ground_family(built), a.k, t, VerifyMode::Exhaustive, verify_options(c));
    passed = cert.passed;
    cert_json = certificate_to_json(cert);
  } else {
    SampledPointCertificate cert = verify_construction_sampled(
        built, t, int64_t(c.samples), c.seed, c.jobs);
    passed = cert.passed;
    cert_json = sampled_point_certificate_to_json(cert);
  }
  maybe_write(a.cert, cert_json);

  passed = passed && built.core_certificate.passed;
  std::cout << "construct kind=" << a.kind << " n=" << n << " k=" << a.k
            << " t=" << t << " seed=" << c.seed << " size=" << built.cube.size()
            << " core=" << pass_str(built.core_certificate.passed)
            << " passed=" << pass_str(passed) << "\n";
  return passed ? 0 : 1;
}

// ----- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string in, out, level = "auto";
  int k = 0;
  int64_t t = 0;
  Common common;
};

int run_verify(const VerifyArgs& a) {
  const Common& c = a.common;
  Json doc = read_json_file(a.in);

  switch (sniff_kind(doc)) {
    case FileKind::PermFamily: {
      if (a.k < 1 || a.t < 1)
        throw std::invalid_argument("permutation families need --k and --t");
      PermFamily fam = family_from_json(doc);
      ShatterCertificate cert =
          verify_t_shattering(fam, a.k, a.t, resolve_mode(c, uint64_t(fam.n()), a.k),
                              verify_options(c));
      maybe_write(a.out, certificate_to_json(cert));
      std::cout << "verify kind=family n=" << fam.n() << " k=" << a.k
                << " t=" << a.t << " min_count=" << cert.min_count
                << " passed=" << pass_str(cert.passed) << "\n";
      return cert.passed ? 0 : 1;
    }

    case FileKind::Construction: {
      Construction built = construction_from_json(doc);
      int k = a.k > 0 ? a.k : built.k;
      int64_t t = a.t > 0 ? a.t : built.guarantee;
      uint64_t cost = built.n <= kU64Sat / uint64_t(built.cube.size())
                          ? built.n * uint64_t(built.cube.size())
                          : kU64Sat;
      bool ground_fits = cost <= 200'000'000 &&
                         binomial(built.n, uint64_t(k)) <= c.budget;
      bool use_ground = a.level == "ground" || (a.level == "auto" && ground_fits);

      if (use_ground) {
        ShatterCertificate cert = verify_t_shattering(
            ground_family(built), k, t,
            c.mode == "sampled" ? VerifyMode::Sampled : VerifyMode::Exhaustive,
            verify_options(c));
        maybe_write(a.out, certificate_to_json(cert));
        std::cout << "verify kind=construction level=ground n=" << built.n
                  << " k=" << k << " t=" << t << " min_count=" << cert.min_count
                  << " passed=" << pass_str(cert.passed) << "\n";
        return cert.passed ? 0 : 1;
      }
      if (c.mode == "exhaustive")
        throw std::invalid_argument(
            "cube-level verification is sampled; drop --mode exhaustive or "
            "use --level ground");
      SampledPointCertificate cert = verify_construction_sampled(
          built, t, int64_t(c.samples), c.seed, c.jobs);
      maybe_write(a.out, sampled_point_certificate_to_json(cert));
      std::cout << "verify kind=construction level=cube n=" << built.n
                << " k=" << k << " t=" << t << " min_count=" << cert.min_count
                << " seed=" << c.seed << " passed=" << pass_str(cert.passed)
                << "\n";
      return cert.passed ? 0 : 1;
    }

    case FileKind::CubeFamily: {
      if (a.k < 1) throw std::invalid_argument("cube families need --k");
      LoadedCube loaded = cube_from_json(doc);
      std::vector<LexPermutation> members;
      for (const CubePerm& m : loaded.cube.members) {
        if (!std::holds_alternative<LexPermutation>(m))
          throw std::invalid_argument(
              "cube-level check handles plain lex members only");
        members.push_back(std::get<LexPermutation>(m));
      }
      LexShatterCertificate cert =
          check_k_lex_shattering(members, a.k, lex_options(c));
      maybe_write(a.out, lex_certificate_to_json(cert));
      std::cout << "verify kind=cube b=" << loaded.cube.b
                << " d=" << loaded.cube.d << " k=" << a.k
                << " checked=" << cert.checked
                << " passed=" << pass_str(cert.passed) << "\n";
      return cert.passed ? 0 : 1;
    }
  }
  return 2;  // unreachable
}

// ----- adversary --------------------------------------------------------------

struct AdversaryArgs {
  std::string in, out, dump, method;
  int k = 0;
  bool best_effort = false;
  Common common;
};

int run_adversary(const AdversaryArgs& a) {
  Json doc = read_json_file(a.in);
  PermFamily fam(1);
  switch (sniff_kind(doc)) {
    case FileKind::PermFamily:
      fam = family_from_json(doc);
      break;
    case FileKind::Construction:
      fam = ground_family(construction_from_json(doc));
      break;
    case FileKind::CubeFamily: {
      LoadedCube loaded = cube_from_json(doc);
      if (!loaded.n)
        throw std::invalid_argument(
            "cube family file lacks \"n\"; cannot pick a ground set");
      fam = restrict_to_ground(loaded.cube, *loaded.n);
      break;
    }
  }

  Witness w;
  if (a.method == "chain") {
    w = chain_witness(fam, a.k, a.best_effort);
  } else {
    ColoredTree tree;
    Subdivision sub;
    w = tree_witness(fam, a.k, a.best_effort, &tree, &sub);
    if (!a.dump.empty()) write_json_file(a.dump, tree_dump_json(tree));
  }
  w.seed = a.common.seed;
  maybe_write(a.out, witness_to_json(w));

  bool ok = w.valid_precondition && w.achieved_count <= w.guaranteed_bound;
  std::cout << "adversary method=" << w.method << " n=" << fam.n()
            << " m=" << fam.size() << " k=" << w.k
            << " guaranteed=" << w.guaranteed_bound
            << " achieved=" << w.achieved_count
            << " valid_precondition=" << pass_str(w.valid_precondition) << "\n";
  return ok ? 0 : 1;
}

// ----- exact -------------------------------------------------------------------

struct ExactArgs {
  int n = 0, k = 0;
  int64_t t = 0, t_max = 0;
  int cap = 7;
  bool no_symmetry = false;
  std::string csv, witness;
  Common common;
};

int run_exact(const ExactArgs& a) {
  if ((a.t == 0) == (a.t_max == 0))
    throw std::invalid_argument("give exactly one of --t / --t-max");
  ExactOptions opt;
  opt.cap = a.cap;
  opt.fix_identity = !a.no_symmetry;
  opt.jobs = a.common.jobs;

  int64_t lo = a.t > 0 ? a.t : 1;
  int64_t hi = a.t > 0 ? a.t : a.t_max;
  std::vector<ExactResult> rows;
  for (int64_t t = lo; t <= hi; ++t) {
    rows.push_back(f_exact(a.n, a.k, t, opt));
    const ExactResult& r = rows.back();
    std::cout << "f_" << r.k << "(" << r.n << "," << r.t << ") = " << r.value
              << "\n";
  }
  if (!a.csv.empty()) {
    std::FILE* f = std::fopen(a.csv.c_str(), "w");
    if (!f) throw std::invalid_argument("cannot open " + a.csv + " for writing");
    std::string table = solved_table_csv(rows);
    std::fwrite(table.data(), 1, table.size(), f);
    std::fclose(f);
  }
  if (!a.witness.empty() && !rows.empty())
    write_json_file(a.witness, family_to_json(rows.back().optimal_family));
  return 0;
}

// ----- regime -------------------------------------------------------------------

struct RegimeArgs {
  int k = 0;
  int64_t t = 0, t_max = 0;
  std::string n_text;
};

int run_regime(const RegimeArgs& a) {
  if ((a.t == 0) == (a.t_max == 0))
    throw std::invalid_argument("give exactly one of --t / --t-max");
  int64_t lo = a.t > 0 ? a.t : 1;
  int64_t hi = a.t > 0 ? a.t : a.t_max;
  for (int64_t t = lo; t <= hi; ++t) {
    RegimeAnswer r = regime(a.k, t);
    std::cout << "k=" << r.k << " t=" << r.t
              << " regime=" << regime_name(r.regime) << "\n";
  }
  if (!a.n_text.empty()) {
    uint64_t n = parse_count(a.n_text);
    LowerBoundThresholds th = lower_bound_thresholds(n, a.k);
    char line[128];
    std::snprintf(line, sizeof line,
                  "n=%llu chain_threshold=%.6f tree_threshold=%.6f\n",
                  (unsigned long long)n, th.chain, th.tree);
    std::cout << line;
  }
  return 0;
}

// ----- bench ---------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> constructions{"loglog", "sqrtlog", "scrambling"};
  std::vector<std::string> n_texts;
  int k = 4;
  std::string out;
  Common common;
};

struct BenchRow {
  uint64_t n = 0;
  std::string construction;
  int size = 0;
  double build_seconds = 0;
  std::string verify_mode = "error";
  bool verify_passed = false;
};

BenchRow bench_point(const std::string& kind, uint64_t n, const BenchArgs& a) {
  BenchRow row;
  row.n = n;
  row.construction = kind;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (kind == "scrambling") {
      ScramblingResult r = build_scrambling_family(small_int(n, "n"), a.k,
                                                   a.common.seed,
                                                   verify_options(a.common));
      row.size = r.family.size();
      row.verify_mode = "subsets-exhaustive";
      row.verify_passed = r.certificate.passed;
    } else {
      Construction c =
          kind == "loglog"
              ? build_loglog_family(n, a.k, a.common.seed, lex_options(a.common))
              : build_sqrtlog_family(n, a.k, a.common.seed, lex_options(a.common));
      row.size = c.cube.size();
      row.verify_mode =
          c.core_certificate.mode == LexCheckMode::Exhaustive
              ? "constraints-exhaustive"
              : "constraints-sampled";
      row.verify_passed = c.core_certificate.passed;
    }
  } catch (const std::exception& e) {
    // a failed point is data; the sweep continues
    std::cerr << "bench: " << kind << " n=" << n << " failed: " << e.what()
              << "\n";
  }
  row.build_seconds = seconds_since(t0);
  return row;
}

int run_bench(const BenchArgs& a) {
  std::vector<BenchRow> rows;
  for (const std::string& nt : a.n_texts) {
    uint64_t n = parse_count(nt);
    for (const std::string& kind : a.constructions)
      rows.push_back(bench_point(kind, n, a));
  }

  std::string csv = "# seed=" + std::to_string(a.common.seed) +
                    " k=" + std::to_string(a.k) +
                    " samples=" + std::to_string(a.common.samples) + "\n";
  csv += "n,construction,size,build_seconds,verify_mode,verify_passed\n";
  for (const BenchRow& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%llu,%s,%d,%.6f,%s,%s\n",
                  (unsigned long long)r.n, r.construction.c_str(), r.size,
                  r.build_seconds, r.verify_mode.c_str(),
                  pass_str(r.verify_passed));
    csv += line;
  }

  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::FILE* f = std::fopen(a.out.c_str(), "w");
    if (!f) throw std::invalid_argument("cannot open " + a.out + " for writing");
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }

  for (const BenchRow& r : rows)
    if (!r.verify_passed) return 1;
  return 0;
}

// ----- wiring -----------------------------------------------------------------

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--budget", c.budget,
                  "enumeration cap for exhaustive scans (SHATTER_BUDGET)");
  cmd->add_option("--samples", c.samples, "draw count for sampled modes");
  cmd->add_option("--seed", c.seed, "seed for every randomized path");
  cmd->add_option("--jobs", c.jobs, "worker cap, 0 = all");
  cmd->add_option("--mode", c.mode, "auto | exhaustive | sampled")
      ->check(CLI::IsMember({"auto", "exhaustive", "sampled"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permutation shattering toolkit"};
  app.require_subcommand(1);

  uint64_t env_budget = 10'000'000;
  if (const char* e = std::getenv("SHATTER_BUDGET")) {
    try {
      env_budget = parse_count(e);
    } catch (const std::invalid_argument&) {
      std::cerr << "error: SHATTER_BUDGET is not a count\n";
      return 2;
    }
  }

  ConstructArgs ca;
  ca.common.budget = env_budget;
  CLI::App* construct = app.add_subcommand(
      "construct", "build a family and verify its shattering guarantee");
  construct->add_option("--kind", ca.kind, "construction")
      ->required()
      ->check(CLI::IsMember(
          {"loglog", "sqrtlog", "monotone", "scrambling", "random"}));
  construct->add_option("--n", ca.n_text, "ground-set size (decimal or B^E)")
      ->required();
  construct->add_option("--k", ca.k, "subset size");
  construct->add_option("--m", ca.m, "member count (random kind)");
  construct->add_option("--t", ca.t, "order-count target (monotone: 1 or 2)");
  construct->add_option("--out", ca.out, "family / construction JSON path");
  construct->add_option("--cert", ca.cert, "certificate JSON path");
  construct->add_option("--ground", ca.ground,
                        "also write the family restricted to [n] (perm JSON)");
  add_common(construct, ca.common);

  VerifyArgs va;
  va.common.budget = env_budget;
  CLI::App* verify =
      app.add_subcommand("verify", "check a family file against a target t");
  verify->add_option("--in", va.in, "family / construction JSON")->required();
  verify->add_option("--k", va.k, "subset size");
  verify->add_option("--t", va.t, "order-count target");
  verify->add_option("--level", va.level, "construction check level")
      ->check(CLI::IsMember({"auto", "ground", "cube"}));
  verify->add_option("--out", va.out, "certificate JSON path");
  add_common(verify, va.common);

  AdversaryArgs aa;
  aa.common.budget = env_budget;
  CLI::App* adversary = app.add_subcommand(
      "adversary", "extract a low-shattering witness subset from a family");
  adversary->add_option("--in", aa.in, "family JSON")->required();
  adversary->add_option("--method", aa.method, "chain | tree")
      ->required()
      ->check(CLI::IsMember({"chain", "tree"}));
  adversary->add_option("--k", aa.k, "witness size")->required();
  adversary->add_flag("--best-effort", aa.best_effort,
                      "run below the size threshold, report unguaranteed count");
  adversary->add_option("--out", aa.out, "witness JSON path");
  adversary->add_option("--dump", aa.dump, "tree dump JSON path (tree method)");
  add_common(adversary, aa.common);

  ExactArgs ea;
  ea.common.budget = env_budget;
  CLI::App* exact =
      app.add_subcommand("exact", "minimum family size by exhaustive search");
  exact->add_option("--n", ea.n, "ground-set size")->required();
  exact->add_option("--k", ea.k, "subset size")->required();
  exact->add_option("--t", ea.t, "single order-count target");
  exact->add_option("--t-max", ea.t_max, "sweep t = 1..t_max");
  exact->add_option("--cap", ea.cap, "refuse n beyond this");
  exact->add_flag("--no-symmetry", ea.no_symmetry,
                  "search without fixing the first member");
  exact->add_option("--csv", ea.csv, "solved-table CSV path");
  exact->add_option("--witness", ea.witness,
                    "optimal family JSON path (last computed t)");
  add_common(exact, ea.common);

  RegimeArgs ra;
  CLI::App* regime_cmd =
      app.add_subcommand("regime", "growth regime of f_k(n,t) in n");
  regime_cmd->add_option("--k", ra.k, "subset size")->required();
  regime_cmd->add_option("--t", ra.t, "single order-count target");
  regime_cmd->add_option("--t-max", ra.t_max, "sweep t = 1..t_max");
  regime_cmd->add_option("--n", ra.n_text,
                         "also print adversary lower-bound thresholds at n");

  BenchArgs ba;
  ba.common.budget = env_budget;
  CLI::App* bench =
      app.add_subcommand("bench", "sweep constructions, emit a CSV of records");
  bench->add_option("--n", ba.n_texts, "sweep points (decimal or B^E)");
  bench
      ->add_option("--construction", ba.constructions,
                   "subset of {loglog, sqrtlog, scrambling}")
      ->check(CLI::IsMember({"loglog", "sqrtlog", "scrambling"}));
  bench->add_option("--k", ba.k, "subset size");
  bench->add_option("--out", ba.out, "CSV path (default stdout)");
  add_common(bench, ba.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(construct)) return run_construct(ca);
    if (app.got_subcommand(verify)) return run_verify(va);
    if (app.got_subcommand(adversary)) return run_adversary(aa);
    if (app.got_subcommand(exact)) return run_exact(ea);
    if (app.got_subcommand(regime_cmd)) return run_regime(ra);
    if (app.got_subcommand(bench)) return run_bench(ba);
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
