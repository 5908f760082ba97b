#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "symcomp/config.hpp"
#include "symcomp/expression.hpp"

using namespace symcomp;
constexpr double pi = std::numbers::pi;

namespace {

// a complete document with `patch` merged over it
std::string doc(const std::string& patch) {
  nlohmann::json base = nlohmann::json::parse(R"({"manifold": {"kind": "plane"}, "domain": {"shape": "disk", "radius": 1},
    "source": {"constant": 1}, "beta": {"constant": 1}, "mesh": {"h": 0.1}})");
  base.merge_patch(nlohmann::json::parse(patch));
  return base.dump();
}

std::string error_of(const std::string& patch) {
  try {
    parse_config(doc(patch));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("expression evaluation") {
  const ExprVars p{0.5, -2.0, 0.0, 3.0};
  CHECK(Expression::parse("1 + 2 * 3")(p) == 7.0);
  CHECK(Expression::parse("2 ^ 3 ^ 2")(p) == 512.0);
  CHECK(Expression::parse("-x^2")(p) == -0.25);
  CHECK(Expression::parse("(1 + x) * y")(p) == -3.0);
  CHECK(Expression::parse("sin(pi / 2) + cos(0) + sqrt(r * 3)")(p) == doctest::Approx(5.0));
  CHECK(Expression::parse("max(x, y) + min(x, y) + abs(y) + pow(2, 3)")(p) == doctest::Approx(0.5 - 2.0 + 2.0 + 8.0));
  CHECK(Expression::parse("exp(log(3)) + atan(1) * 4 + tan(0)")(p) == doctest::Approx(3 + pi));
  CHECK(Expression::parse("1e-3 * 2.5E2")(p) == doctest::Approx(0.25));
  CHECK(Expression::parse("1 + r").radial_only());
  CHECK_FALSE(Expression::parse("1 + x * r").radial_only());
}

TEST_CASE("expression errors carry a column") {
  for (const char* bad : {"1 +", "sin(1", "foo(2)", "2 * * 3", "", "1 2", "q + 1", "max(1)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression::parse(bad), ExpressionError);
  }
  try {
    Expression::parse("1 + $");
  } catch (const ExpressionError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

TEST_CASE("minimal and full configs") {
  const RunConfig d = parse_config(doc("{}"));
  CHECK(d.domain_shape == "disk");
  CHECK(d.checks == known_checks());
  CHECK(d.source.kind == SourceSpec::Kind::constant);

  const RunConfig c = parse_config(R"({
    "name": "cap", "manifold": {"kind": "sphere", "kappa": 1},
    "domain": {"shape": "cap", "radius": 1.0471975511965976},
    "source": {"expression": "1 + r"}, "beta": {"arcs": [{"from": 0.9, "to": 0.1, "value": 3}], "default": 2},
    "mesh": {"h": 0.1, "refinements": 2}, "checks": ["l1", "min"], "tolerance": {"scale": 2}, "seed": 7})");
  CHECK(c.manifold.kind() == ManifoldKind::sphere);
  CHECK(c.source.kind == SourceSpec::Kind::expression);
  CHECK(c.beta.kind == BetaSpec::Kind::arcs);
  CHECK(c.beta.arcs.size() == 1);
  CHECK(c.beta.default_value == 2.0);
  CHECK(c.refinements == 2);
  CHECK(c.checks == std::vector<std::string>{"l1", "min"});
  CHECK(c.tol_scale == 2.0);
  CHECK(c.seed == 7);
}

TEST_CASE("config errors name the key") {
  CHECK(error_of(R"({"beta": {"constant": -1}})").find("'beta.constant'") != std::string::npos);
  CHECK(error_of(R"({"mesh": {"h": 0}})").find("'mesh.h'") != std::string::npos);
  CHECK(error_of(R"({"mesh": {"h": 0.1, "refinements": 9}})").find("mesh.refinements") !=
        std::string::npos);
  CHECK(error_of(R"({"domain": {"shape": "blob"}})").find("domain.shape") != std::string::npos);
  CHECK(error_of(R"({"colour": 1})").find("colour") != std::string::npos);
  CHECK(error_of(R"({"checks": ["nope"]})").find("checks") != std::string::npos);
  CHECK(error_of(R"({"source": {"constant": null, "expression": "1 +"}})").find("source.expression") !=
        std::string::npos);
  CHECK(error_of(R"({"source": {"constant": -2}})").find("source") != std::string::npos);
  CHECK_FALSE(error_of(R"({"mesh": null})").empty());
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("file-backed inputs resolve relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "symcomp_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "f.txt") << "# source\n1 2\n3\n";
    std::ofstream(dir / "run.json") << doc(R"({"source": {"constant": null, "file": "f.txt"}})");
  }
  const RunConfig c = load_config(dir / "run.json");
  CHECK(c.source.kind == SourceSpec::Kind::file);
  CHECK(read_number_file(c.source.file) == std::vector<double>{1, 2, 3});
  CHECK_THROWS(read_number_file(dir / "missing.txt"));
  std::filesystem::remove_all(dir);
}
