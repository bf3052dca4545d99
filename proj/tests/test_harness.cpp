#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "noiselab/csv.hpp"
#include "noiselab/errors.hpp"
#include "noiselab/harness/scenario.hpp"

using namespace noiselab;

namespace {
bool has_check(const RunReport& rep, const std::string& name, bool expect_pass) {
  for (const Check& c : rep.checks)
    if (c.name == name) return c.pass == expect_pass;
  return false;
}
}  // namespace

TEST_CASE("registry lists eight uniquely named scenarios with claim labels") {
  const auto& reg = scenario_registry();
  REQUIRE(reg.size() == 8);
  std::set<std::string> names;
  for (const auto& s : reg) {
    CHECK(!s.theorem.empty());
    CHECK(!s.description.empty());
    names.insert(s.name);
  }
  CHECK(names.size() == 8);

  const std::string listing = list_scenarios();
  CHECK(listing.find("gradient-bound → Theorem 2") != std::string::npos);
  CHECK(listing.find("weakstar-stability → §3 Proposition") != std::string::npos);
  CHECK(std::count(listing.begin(), listing.end(), '\n') == 8);
}

TEST_CASE("unknown scenario name is refused") {
  ScenarioConfig cfg;
  cfg.scenario = "nope";
  cfg.out_dir = "harness_tmp_bad";
  CHECK_THROWS_AS((void)run_scenario(cfg), ValidationError);
}

TEST_CASE("identical configs give byte-identical artifacts across runs and workers") {
  ScenarioConfig a = default_config("zvonkin");
  a.out_dir = "harness_tmp_a";
  ScenarioConfig b = a;
  b.out_dir = "harness_tmp_b";
  b.workers = 2;

  const RunReport ra = run_scenario(a);
  const RunReport rb = run_scenario(b);
  CHECK(ra.config_hash == rb.config_hash);
  CHECK(ra.config_hash.size() == 16);
  REQUIRE(!ra.artifacts.empty());
  CHECK(ra.artifacts == rb.artifacts);
  CHECK(std::find(ra.artifacts.begin(), ra.artifacts.end(), "report.csv") != ra.artifacts.end());
  for (const std::string& f : ra.artifacts) {
    const std::string pa = a.out_dir + "/" + f;
    const std::string pb = b.out_dir + "/" + f;
    REQUIRE(std::filesystem::exists(pa));
    CHECK(read_file_bytes(pa) == read_file_bytes(pb));
  }
  const std::string text = report_text(ra);
  CHECK(text.find("zvonkin") != std::string::npos);
  CHECK(text.find(ra.config_hash) != std::string::npos);
  std::filesystem::remove_all("harness_tmp_a");
  std::filesystem::remove_all("harness_tmp_b");
}

TEST_CASE("dichotomy scenario detects the deterministic blow-up and stochastic bound") {
  ScenarioConfig cfg = default_config("transport-dichotomy");
  cfg.out_dir = "harness_tmp_dicho";
  const RunReport rep = run_scenario(cfg);
  CHECK(has_check(rep, "deterministic-blow-up", true));
  CHECK(has_check(rep, "stochastic-bounded", true));
  CHECK(has_check(rep, "blow-up-time-near-half", true));
  CHECK(has_check(rep, "meet-time-half", true));
  CHECK(rep.all_pass());
  std::filesystem::remove_all("harness_tmp_dicho");
}
