#include <doctest.h>

#include <filesystem>
#include <string>

#include "symcomp/parallel.hpp"
#include "symcomp/pipeline.hpp"

using namespace symcomp;

namespace {

RunConfig config(const std::string& domain, const std::string& extra = "") {
  std::string text = R"({"manifold": {"kind": "plane"}, "domain": )" + domain +
                     R"(, "source": {"constant": 1}, "beta": {"constant": 1}, "mesh": {"h": 0.1})";
  text += extra + "}";
  return parse_config(text);
}

RunOptions quiet(int refinements = 0) {
  RunOptions o;
  o.refinements = refinements;
  o.write_artifacts = false;
  return o;
}

const CheckEntry* find(const LevelResult& lv, const std::string& id) {
  for (const auto& e : lv.checks)
    if (e.id == id) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("disk run flags equality and passes") {
  const RunResult r = run_pipeline(config(R"({"shape": "disk", "radius": 1})"), quiet(1));
  CHECK(exit_code(r) == 0);
  CHECK_FALSE(r.violated);
  CHECK(r.equality_within_tolerance);
  REQUIRE(r.levels.size() == 2);
  for (const auto& v : r.verdicts) CHECK(v.verdict != Verdict::violated);
  REQUIRE(r.levels.back().oracle_linf);
  CHECK(*r.levels.back().oracle_linf < 0.01 * r.levels.back().v_center);
  CHECK(r.report["schema"] == "symcomp-report/1");
  CHECK(r.report["status"] == "pass");
  CHECK(r.report["levels"].size() == 2);
  CHECK(report_csv(r).rfind("level,h,id,name,lhs,rhs,margin,tolerance,verdict,at,max_gap,note", 0) == 0);
}

TEST_CASE("square margins are strict") {
  const RunResult r = run_pipeline(config(R"({"shape": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]})"), quiet());
  CHECK(exit_code(r) == 0);
  CHECK_FALSE(r.equality_within_tolerance);
  const CheckEntry* l1 = find(r.levels.back(), "l1");
  REQUIRE(l1);
  CHECK(l1->margin > l1->tolerance);
  const CheckEntry* min = find(r.levels.back(), "min");
  REQUIRE(min);
  CHECK(min->margin > 0.0);
}

TEST_CASE("variable source skips constant-only checks") {
  const RunConfig c = parse_config(
      R"({"manifold": {"kind": "plane"}, "domain": {"shape": "disk", "radius": 1}, "source": {"expression": "1 + x*x"},
          "beta": {"constant": 1}, "mesh": {"h": 0.1}})");
  const RunResult r = run_pipeline(c, quiet());
  int skipped = 0;
  for (const auto& s : r.levels.back().skipped)
    if (s.reason == "requires a constant source term") ++skipped;
  CHECK(skipped == 4);
  CHECK(find(r.levels.back(), "pointwise") == nullptr);
  CHECK(find(r.levels.back(), "l1") != nullptr);
  CHECK_FALSE(r.violated);
}

TEST_CASE("two-arc beta and check selection") {
  const RunResult r = run_pipeline(
      config(R"({"shape": "ellipse", "a": 2, "b": 1})", R"(, "checks": ["l1", "min"])"), quiet());
  for (const auto& e : r.levels.back().checks) CHECK((e.id == "l1" || e.id == "min"));
  CHECK_FALSE(r.violated);
}

TEST_CASE("reports are reproducible") {
  const RunConfig c = config(R"({"shape": "disk", "radius": 1})");
  const std::string a = run_pipeline(c, quiet()).report.dump();
  CHECK(a == run_pipeline(c, quiet()).report.dump());
  // thread count does not change a single bit
  const int saved = parallel::worker_count();
  parallel::set_worker_count(3);
  CHECK(a == run_pipeline(c, quiet()).report.dump());
  parallel::set_worker_count(saved);
  // the serial superlevel kernel sums in another order: margins agree to rounding
  RunOptions serial = quiet();
  serial.backend = Backend::serial;
  const RunResult s = run_pipeline(c, serial), p = run_pipeline(c, quiet());
  REQUIRE(s.verdicts.size() == p.verdicts.size());
  for (std::size_t i = 0; i < s.verdicts.size(); ++i) {
    CHECK(s.verdicts[i].verdict == p.verdicts[i].verdict);
    CHECK(std::abs(s.verdicts[i].margin - p.verdicts[i].margin) <= 1e-12);
  }
}

TEST_CASE("artifacts are written") {
  const auto dir = std::filesystem::temp_directory_path() / "symcomp_pipeline_test";
  std::filesystem::remove_all(dir);
  RunOptions o = quiet(1);
  o.write_artifacts = true;
  o.output = dir;
  run_pipeline(config(R"({"shape": "disk", "radius": 1})"), o);
  for (const char* f : {"report.json", "report.csv", "mesh.txt", "solution.csv", "distribution.csv", "radial.csv",
                        "mu.svg", "profiles.svg", "convergence.svg", "convergence.csv"})
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  std::filesystem::remove_all(dir);
}
