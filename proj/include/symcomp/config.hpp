#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcomp/domain.hpp"
#include "symcomp/geometry.hpp"

namespace symcomp {

/// Parse or validation failure; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SourceSpec {
  enum class Kind { constant, expression, file } kind = Kind::constant;
  double value = 1.0;
  std::string expression;
  std::filesystem::path file;  // one value per base-mesh vertex
};

struct BetaArc {
  double from = 0.0, to = 0.0;  // boundary parameter range, may wrap past 1
  double value = 1.0;
};

struct BetaSpec {
  enum class Kind { constant, arcs, file } kind = Kind::constant;
  double value = 1.0;
  std::vector<BetaArc> arcs;
  double default_value = 1.0;
  std::filesystem::path file;  // one value per base-mesh boundary edge
};

/// Every check the pipeline knows about, in report order.
const std::vector<std::string>& known_checks();

struct RunConfig {
  std::string name = "run";
  Manifold manifold = Manifold::plane();
  DomainSpec domain = shape::Disk{};
  std::string domain_shape = "disk";
  SourceSpec source;
  BetaSpec beta;
  double h = 0.05;
  int refinements = 0;
  std::vector<std::string> checks;  // subset of known_checks(), in report order
  double tol_scale = 1.0;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";
};

/// Parses a config document. Relative file paths are resolved against `base_dir`.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Reads whitespace separated numbers, skipping '#' comments.
std::vector<double> read_number_file(const std::filesystem::path& path);

}  // namespace symcomp
