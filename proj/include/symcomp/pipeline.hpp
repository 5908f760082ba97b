#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symcomp/compare.hpp"
#include "symcomp/config.hpp"
#include "symcomp/fem.hpp"
#include "symcomp/mesh.hpp"

namespace symcomp {

/// Mesh and coefficient fields of one refinement level.
struct LevelProblem {
  int level = 0;
  MeshPtr mesh;
  ScalarField f;
  BoundaryField beta;
};

/// Builds levels 0..count-1 (level k is k uniform refinements of the base mesh).
std::vector<LevelProblem> build_levels(const RunConfig& config, int count);

struct SkippedCheck {
  std::string id;
  std::string reason;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  std::size_t vertices = 0, triangles = 0;
  double area = 0.0, boundary_length = 0.0;
  double theta = 1.0, R0 = 0.0, beta_bar = 0.0;
  FieldStats u;
  double v_center = 0.0, v0 = 0.0, v_l1 = 0.0;
  int cg_iterations = 0;
  double cg_residual = 0.0;
  std::optional<double> oracle_linf;
  std::vector<CheckEntry> checks;
  std::vector<SkippedCheck> skipped;
  std::vector<std::string> warnings;
};

/// Verdict across refinement levels: a violation is declared only when the
/// two finest levels both violate.
struct FinalVerdict {
  std::string id;
  std::string name;
  Verdict verdict = Verdict::holds;
  double margin = 0.0;
  double tolerance = 0.0;
  std::optional<double> order;  // log2 ratio over the two finest levels of max_gap, else |margin|
  std::string note;
};

struct RunOptions {
  std::optional<int> refinements;            // overrides the config
  std::optional<std::filesystem::path> output;
  std::optional<double> tol_scale;
  bool write_artifacts = true;
  Backend backend = Backend::parallel;
  std::ostream* log = nullptr;               // progress and timings (never in the report)
};

struct RunResult {
  std::vector<LevelResult> levels;
  std::vector<FinalVerdict> verdicts;
  bool violated = false;
  bool equality_within_tolerance = false;
  std::vector<std::string> notes;
  nlohmann::ordered_json report;
};

RunResult run_pipeline(const RunConfig& config, const RunOptions& options = {});

/// 0 when every check holds (possibly within tolerance), 2 on a violation.
int exit_code(const RunResult& result);

std::string report_csv(const RunResult& result);

}  // namespace symcomp
