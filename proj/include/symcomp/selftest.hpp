#pragma once

// Built-in invariant suite behind `symcomp selftest`. The report carries no
// timings, so two runs with the same seed are byte-identical.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace symcomp {

struct SelftestCase {
  std::string name;
  bool passed = false;
  nlohmann::ordered_json values;
};

struct SelftestResult {
  std::uint64_t seed = 0;
  std::vector<SelftestCase> cases;

  std::size_t passed_count() const;
  bool all_passed() const { return passed_count() == cases.size(); }
  nlohmann::ordered_json to_json() const;
};

SelftestResult run_selftest(std::uint64_t seed, std::ostream* log = nullptr);
void write_selftest_report(const SelftestResult& result, const std::filesystem::path& path);

}  // namespace symcomp
