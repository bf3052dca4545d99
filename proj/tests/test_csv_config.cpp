#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "noiselab/csv.hpp"
#include "noiselab/errors.hpp"
#include "noiselab/harness/config.hpp"

using namespace noiselab;

namespace {
std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("csv assembly is exact and validated") {
  CsvWriter w({"a", "b"});
  w.row({1.0, 0.5});
  w.row_mixed({"label", CsvWriter::format(2.5)});
  CHECK(w.rows() == 2);
  CHECK(w.str() == "a,b\n1,0.5\nlabel,2.5\n");
  CHECK_THROWS_AS(w.row({1.0}), ValidationError);
  CHECK_THROWS_AS(w.row_mixed({"x", "y", "z"}), ValidationError);
  CHECK_THROWS_AS(CsvWriter(std::vector<std::string>{}), ValidationError);

  const std::string path = "csv_roundtrip_tmp.csv";
  w.write_file(path);
  CHECK(read_file_bytes(path) == w.str());
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)read_file_bytes("no/such/file.csv"), ValidationError);
}

TEST_CASE("number formatting round-trips exactly") {
  for (double v : {1.0 / 3.0, 0.1, -2.5e-7, 12345.678, 1e300, -0.0, 2.2250738585072014e-308}) {
    const std::string s = CsvWriter::format(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(CsvWriter::format(0.5) == "0.5");
  CHECK(CsvWriter::format(1.0) == "1");
  CHECK(CsvWriter::format(-2.0) == "-2");
}

TEST_CASE("every registered scenario has valid defaults") {
  const std::vector<std::string> names = {
      "flow-stability", "transport-dichotomy", "weak-residual",  "weakstar-stability",
      "commutator-ladder", "jacobian-regularity", "zvonkin",      "gradient-bound"};
  for (const std::string& n : names) {
    const ScenarioConfig cfg = default_config(n);
    CHECK(cfg.scenario == n);
    CHECK_NOTHROW(validate_config(cfg));
  }
  CHECK_THROWS_AS((void)default_config("nope"), ValidationError);
}

TEST_CASE("strict parsing accepts overrides and rejects unknown keys") {
  const ScenarioConfig base = parse_config_text(R"({"scenario":"zvonkin"})");
  CHECK(config_hash(base) == config_hash(default_config("zvonkin")));

  const ScenarioConfig seeded = parse_config_text(R"({"scenario":"zvonkin","seed":777})");
  CHECK(seeded.seed == 777);
  CHECK(config_hash(seeded) != config_hash(base));

  const std::string top = thrown_message([] {
    (void)parse_config_text(R"({"scenario":"zvonkin","bogus":1})");
  });
  CHECK(top.find("/bogus") != std::string::npos);
  const std::string nested = thrown_message([] {
    (void)parse_config_text(R"({"scenario":"zvonkin","grid":{"bogus":2}})");
  });
  CHECK(nested.find("/grid/bogus") != std::string::npos);
  CHECK_THROWS_AS((void)parse_config_text("{not json"), ValidationError);
  CHECK_THROWS_AS((void)parse_config_text(R"({"seed":1})"), ValidationError);
}

TEST_CASE("hash ignores execution details but not experiment knobs") {
  ScenarioConfig a = default_config("weak-residual");
  ScenarioConfig b = a;
  b.out_dir = "elsewhere";
  b.workers = 7;
  CHECK(canonical_config(a) == canonical_config(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash_hex(a) == config_hash_hex(b));

  ScenarioConfig c = a;
  c.grid.dt *= 0.5;
  CHECK(config_hash(c) != config_hash(a));
  CHECK(config_hash_hex(a).size() == 16);
}

TEST_CASE("grid box and field construction") {
  ScenarioConfig cfg = default_config("zvonkin");
  cfg.grid.box_lo = {-2.0, -1.0};
  cfg.grid.box_hi = {2.0, 1.0};
  const Box box = config_box(cfg);
  CHECK(box.lo[0] == -2.0);
  CHECK(box.hi[1] == 1.0);
  CHECK(box.dim() == 2);

  FieldSpec s;
  s.kind = "constant";
  s.c = {0.5, 0.25};
  const DriftField bc = build_field(s);
  CHECK(bc.dim == 2);
  CHECK(bc(0.0, Vec{1.0, 1.0})[1] == 0.25);

  s.kind = "linear";
  s.a = 2.0;
  CHECK(build_field(s)(0.0, Vec{0.3})[0] == doctest::Approx(0.6));

  s.kind = "sqrt";
  s.sign = 1.0;
  CHECK(build_field(s)(0.0, Vec{0.25})[0] == doctest::Approx(1.0));
  s.sign = 0.5;
  CHECK_THROWS_AS((void)build_field(s), ValidationError);

  s = FieldSpec{};
  s.kind = "bump";
  s.amplitude = 0.75;
  s.radius = 1.2;
  CHECK(build_field(s)(0.0, Vec{0.0})[0] == doctest::Approx(0.75));

  s = FieldSpec{};
  s.kind = "sqrt";
  s.mollify = 0.1;
  const DriftField sm = build_field(s);
  CHECK(sm.alpha == 0.5);
  CHECK(std::abs(sm(0.0, Vec{1.0})[0] + 2.0) < 1e-2);

  s.kind = "mystery";
  CHECK_THROWS_AS((void)build_field(s), ValidationError);
}
