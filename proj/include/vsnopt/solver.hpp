#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vsnopt/model.hpp"

namespace vsnopt {

enum class SolveStatus { optimal, infeasible };

const char* to_string(SolveStatus status);

struct SolveStats {
  std::int64_t nodes_explored = 0;
  std::int64_t bound_prunes = 0;
  std::int64_t flow_calls = 0;
  double wall_time_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  AssignmentPlan plan;  // meaningful when optimal
  CostBreakdown cost;   // zero when infeasible
  SolveStats stats;
};

// What one node can take on once its budget is folded in: whether a PS
// task fits at all, and how many VSs fit after paying the base running
// cost. vs_capacity is clamped to max_vs.
struct NodeCapacity {
  bool ps_allowed = false;
  int vs_capacity = 0;
};

NodeCapacity node_capacity(const SensorNode& node, const EnergyParams& params);

// Size cap for the exhaustive search, overridable through the
// VSNOPT_BRUTE_CAP environment variable.
int default_brute_cap();

// Exhaustive reference search: every (node, mode) choice per task, node
// modes derived from the choices, candidates filtered by validate_plan.
// Cost ties break toward the lexicographically smallest assignment
// vector (tasks ascending by id, options ordered node id then PS < VS).
// Throws std::invalid_argument when the instance exceeds the task cap.
SolveResult brute_force(const Scenario& s);
SolveResult brute_force(const Scenario& s, int task_cap);

// Role of each node once the virtualization decision is made.
enum class NodeState : std::uint8_t { closed, physical, virtualized };

struct Routing {
  bool feasible = false;
  int ps_count = 0;
  int vs_count = 0;
  Energy routing_cost_nj = 0;  // e_ps * ps_count + e_vs * vs_count
  std::vector<Assignment> task_routing;
};

// Min-cost routing of every task for a fully fixed node-state vector
// (indexed like Scenario::nodes): physical nodes take one PS task at
// e_ps, virtualized nodes take up to vs_capacity VS tasks at e_vs each,
// closed nodes take nothing. Feasible iff every task routes.
Routing assignment_subproblem(const Scenario& s, std::span<const NodeState> states);

// Warm start: virtualize the node covering the most unassigned tasks
// while that packs at least two, then place leftovers on the cheapest
// feasible option. May report infeasible on instances the exact solver
// can still solve.
SolveResult greedy_upper_bound(const Scenario& s);

// Baseline discipline without virtualization: every task on its own
// physical node, via maximum bipartite matching. Optimal iff a perfect
// matching exists, at cost |tasks| * e_ps.
SolveResult solve_traditional(const Scenario& s);

// One explored branch-and-bound node: the partial virtualization fixing
// (-1 undecided, 0 physical, 1 virtualized, indexed like
// Scenario::nodes) and the lower bound proved for its subtree.
struct BnbTraceEntry {
  std::vector<std::int8_t> fixing;
  Energy bound_nj = 0;
};

// Provably optimal assignment: branch-and-bound over the per-node
// virtualization flags with a min-cost-flow relaxation bound at every
// search node and the greedy result as incumbent. Deterministic for a
// given scenario. When `trace` is given, every explored search node is
// appended to it.
SolveResult solve_exact(const Scenario& s);
SolveResult solve_exact(const Scenario& s, std::vector<BnbTraceEntry>* trace);

}  // namespace vsnopt
