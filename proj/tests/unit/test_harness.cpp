#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <sstream>

#include "edgespec/errors.hpp"
#include "edgespec/harness.hpp"

using namespace edgespec::harness;

namespace {

std::string strip_runtime(std::vector<CheckRecord> rs) {
  for (auto& r : rs) r.runtime_ms = 0;
  return emit(rs, OutputFormat::json);
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("names") {
  CHECK(parse_suite("gb") == Suite::gb);
  CHECK(parse_suite("all") == Suite::all);
  CHECK(to_string(Suite::parametrix) == "parametrix");
  CHECK_THROWS_AS(parse_suite("nope"), edgespec::ConfigError);
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK_THROWS_AS(parse_format("xml"), edgespec::ConfigError);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.grid_n = 8;
  CHECK_THROWS_AS(bad.validate(), edgespec::ConfigError);
  bad = c;
  bad.x_max = bad.x_min;
  CHECK_THROWS_AS(bad.validate(), edgespec::ConfigError);
  bad = c;
  bad.y_modes = 48;
  CHECK_THROWS_AS(bad.validate(), edgespec::ConfigError);
  bad = c;
  bad.spectrum = std::vector<double>{};
  CHECK_THROWS_AS(bad.validate(), edgespec::ConfigError);
  CHECK(c.fiber_spectrum().size() == 16);
  CHECK(c.fiber_spectrum()[1] == -1.6);
}

TEST_CASE("seed from the environment") {
  RunConfig c;
  ::setenv("EDGESPEC_SEED", "1234", 1);
  apply_env_overrides(c);
  CHECK(c.seed == 1234u);
  ::setenv("EDGESPEC_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), edgespec::ConfigError);
  ::unsetenv("EDGESPEC_SEED");
  RunConfig d;
  apply_env_overrides(d);
  CHECK(d.seed == kDefaultSeed);
}

TEST_CASE("gb suite") {
  auto rs = run_suite(Suite::gb, {});
  int commutators = 0;
  for (const auto& r : rs) {
    CHECK(r.pass);
    if (r.check == "gb.commutator") {
      ++commutators;
      REQUIRE(r.bound);
      CHECK(*r.bound == 0.0);
      CHECK(r.measured == 0.0);
    }
  }
  CHECK(commutators == 3);
  CHECK(exit_status(rs) == 0);
  for (std::size_t i = 1; i < rs.size(); ++i) {
    bool ordered = rs[i - 1].check < rs[i].check ||
                   (rs[i - 1].check == rs[i].check && rs[i - 1].param_string() <= rs[i].param_string());
    CHECK(ordered);
  }
}

TEST_CASE("schur suite at one order") {
  RunConfig c;
  c.nu = 2.0;
  c.beta = 0.0;
  auto rs = run_suite(Suite::schur, c);
  bool seen = false;
  for (const auto& r : rs)
    if (r.check == "schur.norm") {
      seen = true;
      CHECK(r.measured <= 0.6);
      CHECK(*r.bound == doctest::Approx(1.0 / 1.75));
      CHECK(r.pass);
    }
  CHECK(seen);
}

TEST_CASE("witt suite on the closed boundary") {
  RunConfig c;
  c.spectrum = std::vector<double>{1.0, -1.0};
  auto rs = run_suite(Suite::witt, c);
  REQUIRE(rs.size() == 1);
  CHECK_FALSE(rs[0].pass);
  CHECK(exit_status(rs) == 1);
  c.spectrum = std::vector<double>{1.6, -1.6};
  CHECK(run_suite(Suite::witt, c)[0].pass);
}

TEST_CASE("emit") {
  CHECK_THROWS_AS(emit({}, OutputFormat::json), edgespec::PreconditionError);
  CheckRecord r;
  r.check = "x.y";
  r.params = {{"nu", 2.5}, {"grid", {200, 400}}, {"name", "a,\"b\""}};
  r.measured = 1.0 / 3.0;
  r.bound = 0.5;
  r.pass = true;
  r.runtime_ms = 7;
  CHECK(r.param_string() == "grid=200 400;name=a,\"b\";nu=2.5");

  auto back = parse_json_records(emit({r}, OutputFormat::json));
  REQUIRE(back.size() == 1);
  CHECK(back[0].check == r.check);
  CHECK(back[0].params == r.params);
  CHECK(back[0].measured == r.measured);
  CHECK(back[0].bound == r.bound);
  CHECK(back[0].pass == r.pass);
  CHECK(back[0].runtime_ms == 7);

  CheckRecord n = r;
  n.bound.reset();
  n.pass = false;
  auto csv = emit({r, n}, OutputFormat::csv);
  CHECK(count_lines(csv) == 3);
  CHECK(csv.find('\r') == std::string::npos);
  std::istringstream in(csv);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "check,param_string,measured,bound,pass,runtime_ms");
  CHECK(row1 == "x.y,\"grid=200 400;name=a,\"\"b\"\";nu=2.5\",0.333333333333,0.5,true,7");
  CHECK(row2 == "x.y,\"grid=200 400;name=a,\"\"b\"\";nu=2.5\",0.333333333333,,false,7");
  CHECK(parse_json_records(emit({n}, OutputFormat::json))[0].bound == std::nullopt);
}

TEST_CASE("determinism") {
  RunConfig c;
  CHECK(strip_runtime(run_suite(Suite::scales, c)) == strip_runtime(run_suite(Suite::scales, c)));
  CHECK(strip_runtime(run_suite(Suite::gb, c)) == strip_runtime(run_suite(Suite::gb, c)));
}
