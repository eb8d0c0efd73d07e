#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "aquad/harness.hpp"

using namespace aquad;
using namespace aquad::harness;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ExperimentConfig enumerate_config() {
  return make_config(Kind::Enumerate, json{{"form", "1,1,1,-1"}, {"m", 1}, {"height", 6}});
}

}  // namespace

TEST_CASE("kinds round-trip") {
  for (auto k : all_kinds()) CHECK(parse_kind(to_string(k)) == k);
  CHECK_FALSE(parse_kind("nonsense").has_value());
  CHECK(to_string(Kind::GeomSieve) == "geom-sieve");
}

TEST_CASE("grid parsing") {
  CHECK(parse_grid("10,30,100") == std::vector<std::int64_t>{10, 30, 100});
  CHECK(parse_grid("64:512:x2") == std::vector<std::int64_t>{64, 128, 256, 512});
  CHECK(parse_grid("1:9:+2") == std::vector<std::int64_t>{1, 3, 5, 7, 9});
  CHECK(parse_grid("5") == std::vector<std::int64_t>{5});
  CHECK(code_of([] { parse_grid("1:9:x1"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_grid("1:9:+0"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_grid("a,b"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_grid("9:1:+1"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("config validation names the field") {
  auto bad_form = [] { make_config(Kind::Enumerate, json{{"form", "1,,1"}, {"m", 1}, {"height", 3}}); };
  CHECK(code_of(bad_form) == ErrorCode::ConfigInvalid);
  CHECK(message_of(bad_form).find("field 'form'") != std::string::npos);
  auto unknown = [] { make_config(Kind::Enumerate, json{{"form", "1,1"}, {"m", 1}, {"height", 3}, {"colour", 2}}); };
  CHECK(message_of(unknown).find("'colour'") != std::string::npos);
  auto wrong_type = [] { make_config(Kind::Enumerate, json{{"form", "1,1"}, {"m", "one"}, {"height", 3}}); };
  CHECK(message_of(wrong_type).find("field 'm'") != std::string::npos);
  auto bad_region = [] { make_config(Kind::Enumerate, json{{"form", "1,1"}, {"m", 1}, {"region", "2:1"}}); };
  CHECK(message_of(bad_region).find("field 'region'") != std::string::npos);
  auto bad_format = [] { make_config(Kind::Enumerate, json{{"form", "1,1"}, {"m", 1}, {"height", 3}, {"format", "xml"}}); };
  CHECK(code_of(bad_format) == ErrorCode::ConfigInvalid);
  CHECK(exit_code(ErrorCode::ConfigInvalid) == 2);
  CHECK(exit_code(ErrorCode::CapExceeded) == 3);
  CHECK(exit_code(ErrorCode::InvariantViolation) == 4);
  CHECK(exit_code(ErrorCode::Io) == 1);
}

TEST_CASE("polynomials in configs") {
  auto j = json::parse(R"([{"exponents":[1,0,0,0],"coeff":1},{"exponents":[0,0,0,0],"coeff":3}])");
  auto f = poly_from_json(j, 4);
  CHECK(poly_to_json(f) == poly_to_json(poly_from_json(poly_to_json(f), 4)));
  CHECK(code_of([&] { poly_from_json(j, 3); }) == ErrorCode::ConfigInvalid);
  auto dir = std::filesystem::temp_directory_path() / "aquad_harness_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "f.json") << j.dump();
  }
  auto cfg = make_config(Kind::Sieve, json{{"form", "1,1,1,-1"}, {"m", 1}, {"height", 5}, {"f", "f.json"}, {"z", 10}, {"y", 50}},
                         dir.string());
  CHECK(cfg.get_poly("f", 4) == f);
}

TEST_CASE("config hash ignores output, format and threads") {
  json a{{"form", "1,1,1,-1"}, {"m", 1}, {"height", 6}};
  json b = a;
  b["threads"] = 4;
  b["output"] = "x.csv";
  b["format"] = "json";
  CHECK(config_hash(a) == config_hash(b));
  b["m"] = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 40);
  // Git blob hash of the empty document "{}" is stable.
  CHECK(config_hash(json::object()) == config_hash(json::parse("{}")));
}

TEST_CASE("reports round-trip through JSON and CSV") {
  auto r = run(enumerate_config());
  CHECK(r.schema == "enumerate/v1");
  CHECK_FALSE(r.rows.empty());
  auto back = report_from_json(to_json(r));
  CHECK(data_fingerprint(back) == data_fingerprint(r));
  CHECK(to_csv(back) == to_csv(r));
  auto csv = to_csv(r);
  CHECK(csv.rfind("# schema: enumerate/v1\n", 0) == 0);
  CHECK(csv.find("# config_hash: " + r.config_hash) != std::string::npos);
  CHECK(!to_json(r, false).contains("timing"));
  CHECK(to_json(r).contains("timing"));

  Report empty;
  empty.schema = "enumerate/v1";
  empty.config_hash = config_hash(json::object());
  empty.columns = {"a", "b"};
  auto e = to_csv(empty);
  CHECK(e.find("a,b\n") != std::string::npos);
  CHECK(e.substr(e.find("a,b\n") + 4).empty());
}

TEST_CASE("runs are deterministic across thread counts") {
  auto one = enumerate_config();
  auto many = one;
  many.threads = 3;
  auto r1 = run(one), r2 = run(many), r3 = run(one);
  CHECK(data_fingerprint(r1) == data_fingerprint(r3));
  CHECK(r1.rows == r2.rows);
}

TEST_CASE("every kind runs on a small config") {
  const std::vector<std::pair<Kind, json>> configs{
      {Kind::CountMod, {{"form", "1,1,1,1"}, {"m", 1}, {"primes", "3,5"}}},
      {Kind::Density, {{"form", "1,1,1,-1"}, {"m", 1}, {"p_max", 7}, {"real", false}}},
      {Kind::Equidist,
       {{"form", "1,1,1,-1"}, {"m", 1}, {"p0", 2}, {"region", "-1.5:1.5"}, {"h_grid", "1:3:+1"}, {"moduli", "3"}, {"p_cut", 20}}},
      {Kind::Sieve, {{"form", "1,1,1,-1"}, {"m", 1}, {"height", 30}, {"f", "x1+x2+3"}, {"Sprime", "2,3"}, {"z", 10}, {"y", 50}}},
      {Kind::AlmostPrime,
       {{"form", "1,1,1,-1"}, {"m", 1}, {"height", 30}, {"f", "x1+x2+3"}, {"Sprime", "2,3"}, {"M", 10}, {"r", 3}}},
      {Kind::GeomSieve,
       {{"form", "1,1,1,-1"}, {"m", 1}, {"p0", 2}, {"h", 3}, {"region", "-1.5:1.5"}, {"f", "x1"}, {"g", "x2"}, {"M_grid", "3,5,7,11"}}},
      {Kind::Halfdim, {{"a", 1}, {"tail", "1,1"}, {"c_per_B2", 3}, {"B_grid", "8:32:x2"}}},
  };
  for (const auto& [kind, doc] : configs) {
    INFO(to_string(kind));
    Report r;
    REQUIRE_NOTHROW(r = run(make_config(kind, doc)));
    CHECK(r.schema == to_string(kind) + "/v1");
    CHECK_FALSE(r.columns.empty());
    for (const auto& row : r.rows) CHECK(row.size() == r.columns.size());
    CHECK(data_fingerprint(r) == data_fingerprint(run(make_config(kind, doc))));
  }
}

TEST_CASE("thread default from the environment") {
  setenv("AQUAD_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  setenv("AQUAD_THREADS", "zero", 1);
  CHECK(default_threads() == 1);
  unsetenv("AQUAD_THREADS");
  CHECK(default_threads() == 1);
}
