#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vsnopt/model.hpp"

namespace vsnopt {

struct GenerationConfig {
  double width_m = 100.0;
  double height_m = 100.0;
  int n_nodes = 10;
  int n_tasks = 8;
  double range_m = 30.0;
  Energy budget_lo_nj = 1'900'000'000;  // 1.9 J
  Energy budget_hi_nj = 3'400'000'000;  // 3.4 J
  EnergyParams params;
  std::uint64_t seed = 0;
  // Redraw task positions (up to kCoverageRetries each) until every task
  // is covered by at least one node. Switch off to stress infeasibility.
  bool require_coverage = true;
};

inline constexpr int kCoverageRetries = 1000;

// Throws std::invalid_argument on a malformed config (empty node/task
// counts, inverted budget interval, nonpositive area or range).
void check_config(const GenerationConfig& config);

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic generation from a single SplitMix64 stream seeded with
// config.seed. Draw order is fixed: node positions (x then y, node by
// node), node budgets, then task positions. Identical configs produce
// identical scenarios on every platform.
Scenario generate(const GenerationConfig& config);

// The evaluation setups shipped with the tool: "s1", "s2", "s3".
GenerationConfig preset_config(std::string_view name);

CoverageMatrix build_coverage(const Scenario& s);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario files are UTF-8 JSON with a fixed key order and a strict
// schema: unknown keys are rejected, as are schema_version mismatches.
void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text, const std::string& origin = "<string>");

// A solved plan plus the scenario file it refers to and its cost.
struct PlanFile {
  std::string scenario_ref;
  AssignmentPlan plan;
  CostBreakdown cost;
};

void save_plan(const PlanFile& f, const std::filesystem::path& path);
PlanFile load_plan(const std::filesystem::path& path);

std::string plan_to_json(const PlanFile& f);
PlanFile plan_from_json(const std::string& text, const std::string& origin = "<string>");

// Write-to-temp-then-rename, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vsnopt
