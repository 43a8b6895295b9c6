#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vsnopt {

// Every energy quantity in the project is an integer number of
// nanojoules. Integer arithmetic keeps cost comparisons exact, which the
// optimality argument of the solver relies on.
using Energy = std::int64_t;

struct EnergyParams {
  Energy e_ps_nj = 17'000;  // running one active sensor node
  Energy e_vs_nj = 1'700;   // overhead per hosted virtual sensor
  int max_vs = 4;           // virtual sensors one node can host
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct SensorNode {
  int id = 0;
  Point pos;
  Energy budget_nj = 0;
  double range_m = 0.0;
};

struct SensingTask {
  int id = 0;
  Point pos;
};

struct Scenario {
  double width_m = 0.0;
  double height_m = 0.0;
  std::vector<SensorNode> nodes;
  std::vector<SensingTask> tasks;
  EnergyParams params;
  std::optional<std::uint64_t> seed;  // absent for hand-built instances
};

// Structural sanity of a scenario: positive energy model, unique ids,
// positions inside the area, positive ranges, nonnegative budgets.
// Throws std::invalid_argument naming the offending field.
void check_scenario(const Scenario& s);

// True iff the task lies within the node's sensing range. The boundary
// is inclusive: distance == range counts as covered.
bool covers(const SensorNode& node, const SensingTask& task);

// Node-by-task boolean matrix, indexed by position in Scenario::nodes
// and Scenario::tasks (not by id).
class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  CoverageMatrix(int n_nodes, int n_tasks)
      : n_nodes_(n_nodes),
        n_tasks_(n_tasks),
        bits_(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(n_tasks), 0) {}

  int node_count() const { return n_nodes_; }
  int task_count() const { return n_tasks_; }

  bool covered(int node_idx, int task_idx) const {
    return bits_[index(node_idx, task_idx)] != 0;
  }
  void set(int node_idx, int task_idx, bool value) {
    bits_[index(node_idx, task_idx)] = value ? 1 : 0;
  }

 private:
  std::size_t index(int node_idx, int task_idx) const {
    return static_cast<std::size_t>(node_idx) * static_cast<std::size_t>(n_tasks_) +
           static_cast<std::size_t>(task_idx);
  }

  int n_nodes_ = 0;
  int n_tasks_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class Mode { ps, vs };

const char* to_string(Mode mode);

struct Assignment {
  int task_id = 0;
  int node_id = 0;
  Mode mode = Mode::ps;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// A candidate solution: one (node, mode) record per task plus the set of
// nodes operating in virtualized mode. Solvers and the plan loader keep
// `virtualized` sorted ascending and free of duplicates.
struct AssignmentPlan {
  std::vector<Assignment> assignments;
  std::vector<int> virtualized;

  bool is_virtualized(int node_id) const;

  friend bool operator==(const AssignmentPlan&, const AssignmentPlan&) = default;
};

struct CostBreakdown {
  Energy c_ps_nj = 0;
  Energy c_vs_nj = 0;
  Energy total_nj = 0;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

enum class ConstraintKind {
  task_assignment,   // each task exactly once, on a covering node
  mode_exclusivity,  // one PS task max, none at all on a virtualized node
  vs_capacity,       // at most max_vs virtual sensors per node
  energy_budget,     // per-node consumption within the node's budget
  reference,         // plan names a node or task the scenario lacks
};

const char* to_string(ConstraintKind kind);

struct Violation {
  ConstraintKind kind = ConstraintKind::task_assignment;
  int node_id = -1;  // -1 when not tied to a node
  int task_id = -1;  // -1 when not tied to a task
  long long observed = 0;
  long long allowed = 0;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

// Cost of a plan under the scenario's energy model:
//   c_ps  = (#PS assignments) * e_ps
//   c_vs  = (#virtualized nodes) * e_ps + (#VS assignments) * e_vs
// Throws std::invalid_argument when the plan references an unknown node
// or task id.
CostBreakdown plan_cost(const AssignmentPlan& plan, const Scenario& s);

// Energy drawn by one node under the plan: 0 when idle, e_ps when
// hosting a PS task, e_ps + k*e_vs when virtualized with k VS tasks.
// Throws std::invalid_argument for an unknown node id.
Energy node_energy_use(const AssignmentPlan& plan, int node_id, const Scenario& s);

// Full constraint check. Violations are data, not errors: the result
// lists every broken constraint with the ids involved and the observed
// vs allowed quantity. A virtualized node hosting no virtual sensor is
// legal but reported as a warning.
ValidationResult validate_plan(const AssignmentPlan& plan, const Scenario& s);

}  // namespace vsnopt
