#include "vsnopt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "vsnopt/flow.hpp"
#include "vsnopt/scenario.hpp"

// The optimization solved here, in one place:
//
//   minimize   e_ps * (#PS tasks) + e_ps * (#virtualized nodes)
//              + e_vs * (#VS tasks)
//   subject to every task placed exactly once on a covering node;
//              a non-virtualized node hosts at most one PS task and no
//              VS task; a virtualized node hosts no PS task and at most
//              max_vs VS tasks; every node stays within its own energy
//              budget.
//
// Budgets fold into per-node capacities (NodeCapacity), so the only
// coupling between nodes is the virtualization flag. For a fixed flag
// vector the rest is a capacitated min-cost bipartite assignment, which
// branch-and-bound exploits: branch on the flags, bound each subtree by
// a flow relaxation in which undecided nodes offer both roles without
// paying the virtualization charge.

namespace vsnopt {

namespace {

constexpr Energy kInfCost = std::numeric_limits<Energy>::max();

class Timer {
 public:
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Instance {
  const Scenario* scenario = nullptr;
  CoverageMatrix coverage;
  std::vector<NodeCapacity> caps;
  std::vector<int> degree;        // tasks covered, per node index
  std::vector<int> nodes_by_id;   // node indices, ascending id
  std::vector<int> tasks_by_id;   // task indices, ascending id
  std::vector<int> branch_order;  // node indices, descending degree then ascending id
};

Instance make_instance(const Scenario& s) {
  Instance inst;
  inst.scenario = &s;
  inst.coverage = build_coverage(s);
  const int n = static_cast<int>(s.nodes.size());
  const int t = static_cast<int>(s.tasks.size());

  inst.caps.reserve(n);
  for (const SensorNode& node : s.nodes) inst.caps.push_back(node_capacity(node, s.params));

  inst.degree.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j)
      if (inst.coverage.covered(i, j)) inst.degree[i] += 1;

  inst.nodes_by_id.resize(n);
  for (int i = 0; i < n; ++i) inst.nodes_by_id[i] = i;
  std::sort(inst.nodes_by_id.begin(), inst.nodes_by_id.end(),
            [&s](int a, int b) { return s.nodes[a].id < s.nodes[b].id; });

  inst.tasks_by_id.resize(t);
  for (int j = 0; j < t; ++j) inst.tasks_by_id[j] = j;
  std::sort(inst.tasks_by_id.begin(), inst.tasks_by_id.end(),
            [&s](int a, int b) { return s.tasks[a].id < s.tasks[b].id; });

  inst.branch_order = inst.nodes_by_id;
  std::stable_sort(inst.branch_order.begin(), inst.branch_order.end(),
                   [&inst](int a, int b) { return inst.degree[a] > inst.degree[b]; });
  return inst;
}

enum class BranchState : std::int8_t { closed, physical, virtualized, undecided };

struct FlowOutcome {
  bool feasible = false;
  Energy routing_cost_nj = 0;
  int ps_count = 0;
  int vs_count = 0;
  std::vector<Assignment> task_routing;  // only when extracted
};

// Min-cost routing of all tasks given per-node roles. Undecided nodes
// offer both roles with no virtualization charge, which makes the cost
// a lower bound for every completion of the role vector.
FlowOutcome route_tasks(const Instance& inst, std::span<const BranchState> states, bool extract) {
  const Scenario& s = *inst.scenario;
  const int n = static_cast<int>(s.nodes.size());
  const int t = static_cast<int>(s.tasks.size());

  struct ModeVertex {
    int ps = -1;
    int vs = -1;
  };
  std::vector<ModeVertex> vertex_of(n);
  int next_vertex = 1 + t;
  for (int i = 0; i < n; ++i) {
    const bool ps_open = (states[i] == BranchState::physical ||
                          states[i] == BranchState::undecided) &&
                         inst.caps[i].ps_allowed;
    const bool vs_open = (states[i] == BranchState::virtualized ||
                          states[i] == BranchState::undecided) &&
                         inst.caps[i].vs_capacity > 0;
    if (ps_open) vertex_of[i].ps = next_vertex++;
    if (vs_open) vertex_of[i].vs = next_vertex++;
  }
  const int source = 0;
  const int sink = next_vertex;

  MinCostFlow flow(sink + 1);
  for (int j = 0; j < t; ++j) flow.add_arc(source, 1 + j, 1, 0);

  struct TaskArc {
    int handle;
    int node_idx;
    Mode mode;
  };
  std::vector<std::vector<TaskArc>> arcs_of(t);
  for (int j = 0; j < t; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!inst.coverage.covered(i, j)) continue;
      if (vertex_of[i].ps >= 0) {
        int h = flow.add_arc(1 + j, vertex_of[i].ps, 1, s.params.e_ps_nj);
        arcs_of[j].push_back({h, i, Mode::ps});
      }
      if (vertex_of[i].vs >= 0) {
        int h = flow.add_arc(1 + j, vertex_of[i].vs, 1, s.params.e_vs_nj);
        arcs_of[j].push_back({h, i, Mode::vs});
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (vertex_of[i].ps >= 0) flow.add_arc(vertex_of[i].ps, sink, 1, 0);
    if (vertex_of[i].vs >= 0) flow.add_arc(vertex_of[i].vs, sink, inst.caps[i].vs_capacity, 0);
  }

  const MinCostFlow::Result result = flow.solve(source, sink);

  FlowOutcome out;
  out.feasible = result.flow == t;
  if (!out.feasible) return out;
  out.routing_cost_nj = result.cost;
  for (int j = 0; j < t; ++j) {
    for (const TaskArc& arc : arcs_of[j]) {
      if (flow.arc_flow(arc.handle) != 1) continue;
      (arc.mode == Mode::ps ? out.ps_count : out.vs_count) += 1;
      if (extract)
        out.task_routing.push_back({s.tasks[j].id, s.nodes[arc.node_idx].id, arc.mode});
      break;
    }
  }
  return out;
}

void sort_plan(AssignmentPlan& plan) {
  std::sort(plan.assignments.begin(), plan.assignments.end(),
            [](const Assignment& a, const Assignment& b) { return a.task_id < b.task_id; });
  std::sort(plan.virtualized.begin(), plan.virtualized.end());
}

// Always-on consistency gate on anything a solver hands back.
void check_solver_output(const SolveResult& result, const Scenario& s, const char* who,
                         bool structural) {
  if (result.status != SolveStatus::optimal) return;
  const ValidationResult v = validate_plan(result.plan, s);
  if (!v.ok())
    throw std::logic_error(std::string(who) + ": produced an invalid plan: " +
                           v.violations.front().message);
  const CostBreakdown recomputed = plan_cost(result.plan, s);
  if (recomputed != result.cost)
    throw std::logic_error(std::string(who) + ": reported cost disagrees with the plan");
  if (structural && s.params.e_vs_nj > 0) {
    for (int id : result.plan.virtualized) {
      int vs_tasks = 0;
      for (const Assignment& a : result.plan.assignments)
        if (a.node_id == id && a.mode == Mode::vs) vs_tasks += 1;
      if (vs_tasks < 2)
        throw std::logic_error(std::string(who) + ": optimal plan virtualizes node " +
                               std::to_string(id) + " for " + std::to_string(vs_tasks) +
                               " task(s)");
    }
  }
}

}  // namespace

const char* to_string(SolveStatus status) {
  return status == SolveStatus::optimal ? "optimal" : "infeasible";
}

NodeCapacity node_capacity(const SensorNode& node, const EnergyParams& params) {
  NodeCapacity cap;
  cap.ps_allowed = params.e_ps_nj <= node.budget_nj;
  if (node.budget_nj >= params.e_ps_nj) {
    if (params.e_vs_nj == 0) {
      cap.vs_capacity = params.max_vs;
    } else {
      const Energy fit = (node.budget_nj - params.e_ps_nj) / params.e_vs_nj;
      cap.vs_capacity = static_cast<int>(std::min<Energy>(params.max_vs, fit));
    }
  }
  return cap;
}

int default_brute_cap() {
  const char* env = std::getenv("VSNOPT_BRUTE_CAP");
  if (env == nullptr || *env == '\0') return 8;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || value < 1)
    throw std::invalid_argument("VSNOPT_BRUTE_CAP must be a positive integer, got '" +
                                std::string(env) + "'");
  return static_cast<int>(value);
}

SolveResult brute_force(const Scenario& s) { return brute_force(s, default_brute_cap()); }

SolveResult brute_force(const Scenario& s, int task_cap) {
  if (static_cast<int>(s.tasks.size()) > task_cap)
    throw std::invalid_argument("brute_force: instance has " + std::to_string(s.tasks.size()) +
                                " tasks and " + std::to_string(s.nodes.size()) +
                                " nodes, cap is " + std::to_string(task_cap) + " tasks");
  Timer timer;
  const Instance inst = make_instance(s);
  const int t = static_cast<int>(s.tasks.size());

  struct Option {
    int node_idx;
    Mode mode;
  };
  std::vector<std::vector<Option>> options(t);
  for (int pos = 0; pos < t; ++pos) {
    const int j = inst.tasks_by_id[pos];
    for (int i : inst.nodes_by_id) {
      if (!inst.coverage.covered(i, j)) continue;
      options[pos].push_back({i, Mode::ps});
      options[pos].push_back({i, Mode::vs});
    }
  }

  SolveStats stats;
  Energy best_cost = kInfCost;
  AssignmentPlan best_plan;
  std::vector<Option> chosen(t, {0, Mode::ps});

  const int n = static_cast<int>(s.nodes.size());
  std::vector<int> ps_cnt(n, 0), vs_cnt(n, 0);
  std::vector<Energy> node_use(n, 0);

  auto dfs = [&](auto&& self, int pos, Energy cost) -> void {
    stats.nodes_explored += 1;
    if (cost >= best_cost) return;  // later ties lose to the lex-earlier incumbent
    if (pos == t) {
      AssignmentPlan plan;
      plan.assignments.reserve(t);
      for (int p = 0; p < t; ++p) {
        plan.assignments.push_back(
            {s.tasks[inst.tasks_by_id[p]].id, s.nodes[chosen[p].node_idx].id, chosen[p].mode});
      }
      for (int i : inst.nodes_by_id)
        if (vs_cnt[i] > 0) plan.virtualized.push_back(s.nodes[i].id);
      if (!validate_plan(plan, s).ok()) return;
      best_cost = cost;
      best_plan = std::move(plan);
      return;
    }
    for (const Option& option : options[pos]) {
      const int i = option.node_idx;
      if (option.mode == Mode::ps) {
        // a second PS task, or PS next to a VS, can never become valid
        if (ps_cnt[i] >= 1 || vs_cnt[i] >= 1) continue;
        if (node_use[i] + s.params.e_ps_nj > s.nodes[i].budget_nj) continue;
        ps_cnt[i] += 1;
        node_use[i] += s.params.e_ps_nj;
        chosen[pos] = option;
        self(self, pos + 1, cost + s.params.e_ps_nj);
        ps_cnt[i] -= 1;
        node_use[i] -= s.params.e_ps_nj;
      } else {
        if (ps_cnt[i] >= 1 || vs_cnt[i] >= s.params.max_vs) continue;
        const Energy extra =
            s.params.e_vs_nj + (vs_cnt[i] == 0 ? s.params.e_ps_nj : 0);
        if (node_use[i] + extra > s.nodes[i].budget_nj) continue;
        vs_cnt[i] += 1;
        node_use[i] += extra;
        chosen[pos] = option;
        self(self, pos + 1, cost + extra);
        vs_cnt[i] -= 1;
        node_use[i] -= extra;
      }
    }
  };
  dfs(dfs, 0, 0);

  SolveResult result;
  result.stats = stats;
  if (best_cost == kInfCost) {
    result.status = SolveStatus::infeasible;
  } else {
    result.status = SolveStatus::optimal;
    result.plan = std::move(best_plan);
    result.cost = plan_cost(result.plan, s);
  }
  result.stats.wall_time_s = timer.elapsed_s();
  check_solver_output(result, s, "brute_force", /*structural=*/false);
  return result;
}

Routing assignment_subproblem(const Scenario& s, std::span<const NodeState> states) {
  if (states.size() != s.nodes.size())
    throw std::invalid_argument("assignment_subproblem: state vector must cover every node");
  const Instance inst = make_instance(s);
  std::vector<BranchState> branch(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    switch (states[i]) {
      case NodeState::closed: branch[i] = BranchState::closed; break;
      case NodeState::physical: branch[i] = BranchState::physical; break;
      case NodeState::virtualized: branch[i] = BranchState::virtualized; break;
    }
  }
  const FlowOutcome out = route_tasks(inst, branch, /*extract=*/true);
  Routing routing;
  routing.feasible = out.feasible;
  if (out.feasible) {
    routing.ps_count = out.ps_count;
    routing.vs_count = out.vs_count;
    routing.routing_cost_nj = out.routing_cost_nj;
    routing.task_routing = out.task_routing;
  }
  return routing;
}

SolveResult greedy_upper_bound(const Scenario& s) {
  Timer timer;
  const Instance inst = make_instance(s);
  const int n = static_cast<int>(s.nodes.size());

  std::vector<bool> virt(n, false), hosts_ps(n, false);
  std::vector<int> vs_left(n, 0);
  std::vector<bool> assigned(s.tasks.size(), false);
  AssignmentPlan plan;

  // Pack the densest coverage first, while it pays for itself.
  for (;;) {
    int best_node = -1;
    int best_pack = 1;
    for (int i : inst.nodes_by_id) {
      if (virt[i] || hosts_ps[i]) continue;
      int coverable = 0;
      for (int pos = 0; pos < static_cast<int>(s.tasks.size()); ++pos) {
        const int j = inst.tasks_by_id[pos];
        if (!assigned[j] && inst.coverage.covered(i, j)) coverable += 1;
      }
      const int pack = std::min(coverable, inst.caps[i].vs_capacity);
      if (pack > best_pack) {
        best_pack = pack;
        best_node = i;
      }
    }
    if (best_node < 0) break;
    virt[best_node] = true;
    vs_left[best_node] = inst.caps[best_node].vs_capacity;
    for (int pos = 0; pos < static_cast<int>(s.tasks.size()) && vs_left[best_node] > 0; ++pos) {
      const int j = inst.tasks_by_id[pos];
      if (assigned[j] || !inst.coverage.covered(best_node, j)) continue;
      plan.assignments.push_back({s.tasks[j].id, s.nodes[best_node].id, Mode::vs});
      assigned[j] = true;
      vs_left[best_node] -= 1;
    }
  }

  // Leftovers go to the cheapest remaining feasible option.
  for (int pos = 0; pos < static_cast<int>(s.tasks.size()); ++pos) {
    const int j = inst.tasks_by_id[pos];
    if (assigned[j]) continue;
    int vs_node = -1, ps_node = -1;
    for (int i : inst.nodes_by_id) {
      if (!inst.coverage.covered(i, j)) continue;
      if (vs_node < 0 && virt[i] && vs_left[i] > 0) vs_node = i;
      if (ps_node < 0 && !virt[i] && !hosts_ps[i] && inst.caps[i].ps_allowed) ps_node = i;
    }
    int pick = -1;
    Mode mode = Mode::vs;
    if (vs_node >= 0 && (ps_node < 0 || s.params.e_vs_nj <= s.params.e_ps_nj)) {
      pick = vs_node;
    } else if (ps_node >= 0) {
      pick = ps_node;
      mode = Mode::ps;
    }
    if (pick < 0) {
      SolveResult result;
      result.status = SolveStatus::infeasible;
      result.stats.wall_time_s = timer.elapsed_s();
      return result;
    }
    plan.assignments.push_back({s.tasks[j].id, s.nodes[pick].id, mode});
    assigned[j] = true;
    if (mode == Mode::vs) {
      vs_left[pick] -= 1;
    } else {
      hosts_ps[pick] = true;
    }
  }

  for (int i : inst.nodes_by_id)
    if (virt[i]) plan.virtualized.push_back(s.nodes[i].id);
  sort_plan(plan);

  SolveResult result;
  result.status = SolveStatus::optimal;
  result.plan = std::move(plan);
  result.cost = plan_cost(result.plan, s);
  result.stats.wall_time_s = timer.elapsed_s();
  check_solver_output(result, s, "greedy_upper_bound", /*structural=*/false);
  return result;
}

SolveResult solve_traditional(const Scenario& s) {
  Timer timer;
  const Instance inst = make_instance(s);
  const int n = static_cast<int>(s.nodes.size());
  const int t = static_cast<int>(s.tasks.size());

  // task position -> covering ps-capable node indices, ascending id
  std::vector<std::vector<int>> adjacency(t);
  for (int pos = 0; pos < t; ++pos) {
    const int j = inst.tasks_by_id[pos];
    for (int i : inst.nodes_by_id)
      if (inst.caps[i].ps_allowed && inst.coverage.covered(i, j)) adjacency[pos].push_back(i);
  }

  std::vector<int> node_match(n, -1), task_match(t, -1);
  std::vector<bool> visited(n);
  auto augment = [&](auto&& self, int pos) -> bool {
    for (int i : adjacency[pos]) {
      if (visited[i]) continue;
      visited[i] = true;
      if (node_match[i] < 0 || self(self, node_match[i])) {
        node_match[i] = pos;
        task_match[pos] = i;
        return true;
      }
    }
    return false;
  };

  int matched = 0;
  for (int pos = 0; pos < t; ++pos) {
    std::fill(visited.begin(), visited.end(), false);
    if (augment(augment, pos)) matched += 1;
  }

  SolveResult result;
  if (matched < t) {
    result.status = SolveStatus::infeasible;
    result.stats.wall_time_s = timer.elapsed_s();
    return result;
  }
  for (int pos = 0; pos < t; ++pos) {
    result.plan.assignments.push_back(
        {s.tasks[inst.tasks_by_id[pos]].id, s.nodes[task_match[pos]].id, Mode::ps});
  }
  result.status = SolveStatus::optimal;
  result.cost = plan_cost(result.plan, s);
  result.stats.wall_time_s = timer.elapsed_s();
  check_solver_output(result, s, "solve_traditional", /*structural=*/false);
  return result;
}

SolveResult solve_exact(const Scenario& s) { return solve_exact(s, nullptr); }

SolveResult solve_exact(const Scenario& s, std::vector<BnbTraceEntry>* trace) {
  Timer timer;
  const Instance inst = make_instance(s);
  const int n = static_cast<int>(s.nodes.size());

  SolveStats stats;
  Energy best_cost = kInfCost;
  AssignmentPlan best_plan;
  const SolveResult warm = greedy_upper_bound(s);
  if (warm.status == SolveStatus::optimal) {
    best_cost = warm.cost.total_nj;
    best_plan = warm.plan;
  }

  std::vector<BranchState> states(n, BranchState::undecided);
  Energy fixed_charges = 0;

  auto dfs = [&](auto&& self, int depth) -> void {
    stats.nodes_explored += 1;
    stats.flow_calls += 1;
    const FlowOutcome out = route_tasks(inst, states, /*extract=*/depth == n);
    if (!out.feasible) return;  // no completion of this fixing can place every task
    const Energy bound = fixed_charges + out.routing_cost_nj;
    if (trace != nullptr) {
      BnbTraceEntry entry;
      entry.fixing.resize(n);
      for (int i = 0; i < n; ++i) {
        entry.fixing[i] = states[i] == BranchState::undecided
                              ? std::int8_t{-1}
                              : (states[i] == BranchState::virtualized ? std::int8_t{1}
                                                                       : std::int8_t{0});
      }
      entry.bound_nj = bound;
      trace->push_back(std::move(entry));
    }
    if (bound >= best_cost) {
      stats.bound_prunes += 1;
      return;
    }
    if (depth == n) {
      best_cost = bound;
      AssignmentPlan plan;
      plan.assignments = out.task_routing;
      for (int i : inst.nodes_by_id)
        if (states[i] == BranchState::virtualized) plan.virtualized.push_back(s.nodes[i].id);
      sort_plan(plan);
      best_plan = std::move(plan);
      return;
    }
    const int i = inst.branch_order[depth];
    states[i] = BranchState::virtualized;
    fixed_charges += s.params.e_ps_nj;
    self(self, depth + 1);
    fixed_charges -= s.params.e_ps_nj;
    states[i] = BranchState::physical;
    self(self, depth + 1);
    states[i] = BranchState::undecided;
  };
  dfs(dfs, 0);

  SolveResult result;
  result.stats = stats;
  result.stats.wall_time_s = timer.elapsed_s();
  if (best_cost == kInfCost) {
    result.status = SolveStatus::infeasible;
    return result;
  }
  result.status = SolveStatus::optimal;
  result.plan = std::move(best_plan);
  result.cost = plan_cost(result.plan, s);
  if (result.cost.total_nj != best_cost)
    throw std::logic_error("solve_exact: incumbent cost disagrees with the incumbent plan");
  check_solver_output(result, s, "solve_exact", /*structural=*/true);
  return result;
}

}  // namespace vsnopt
