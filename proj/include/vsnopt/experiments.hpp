#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsnopt/model.hpp"
#include "vsnopt/scenario.hpp"

namespace vsnopt {

// One scenario solved both ways: energy-optimal assignment with
// virtualization against the one-task-per-node baseline.
struct ComparisonRecord {
  std::string family;
  std::uint64_t seed = 0;
  bool generation_failed = false;
  std::string generation_error;
  std::optional<Energy> virt_cost_nj;
  std::optional<Energy> trad_cost_nj;
  int nodes_virtualized = 0;
  int nodes_physical_mode = 0;
  int nodes_used_virt = 0;  // virtualized + physical-mode
  int nodes_used_trad = 0;
  // 1 - virt/trad, from exact integer costs; absent unless both sides
  // solved and the baseline cost is nonzero.
  std::optional<double> savings_fraction;
  // trad nodes / virt nodes; absent when either side is unused or unsolved.
  std::optional<double> node_ratio;
};

// (virtualized, physical-mode) counts; idle nodes appear in neither.
std::pair<int, int> count_nodes(const AssignmentPlan& plan);

ComparisonRecord compare(const Scenario& s);

struct SweepFamily {
  std::string label;
  GenerationConfig config;  // the seed field is replaced per sweep cell
};

struct FamilyAggregate {
  std::string family;
  int records = 0;
  int generation_failures = 0;
  int virt_infeasible = 0;
  int trad_infeasible = 0;
  std::optional<double> savings_min, savings_mean, savings_max;
  std::optional<double> ratio_min, ratio_mean, ratio_max;
};

struct SweepReport {
  std::vector<SweepFamily> families;
  std::vector<std::uint64_t> seeds;
  std::vector<ComparisonRecord> records;  // (family, seed) order
  std::vector<FamilyAggregate> aggregates;
};

// Runs compare over every family x seed cell. Cells execute on a small
// worker pool; the report is assembled in (family, seed) order, so the
// output is deterministic regardless of scheduling. Generation failures
// become records, not errors.
SweepReport run_sweep(const std::vector<SweepFamily>& families,
                      const std::vector<std::uint64_t>& seeds);

extern const char* const kComparisonCsvHeader;

void write_csv(const SweepReport& report, std::ostream& out);
std::string report_csv(const SweepReport& report);
std::string summary_table(const SweepReport& report);

}  // namespace vsnopt
