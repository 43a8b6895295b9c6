#include "vsnopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace vsnopt {

namespace {

std::unordered_map<int, int> node_index_by_id(const Scenario& s) {
  std::unordered_map<int, int> out;
  out.reserve(s.nodes.size());
  for (int i = 0; i < static_cast<int>(s.nodes.size()); ++i) out.emplace(s.nodes[i].id, i);
  return out;
}

std::unordered_map<int, int> task_index_by_id(const Scenario& s) {
  std::unordered_map<int, int> out;
  out.reserve(s.tasks.size());
  for (int j = 0; j < static_cast<int>(s.tasks.size()); ++j) out.emplace(s.tasks[j].id, j);
  return out;
}

bool in_area(const Point& p, double w, double h) {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= w && p.y >= 0.0 &&
         p.y <= h;
}

// Per-node tally of a plan, restricted to records whose ids resolve.
struct NodeTally {
  int ps_tasks = 0;
  int vs_tasks = 0;
};

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::ps ? "PS" : "VS"; }

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::task_assignment: return "task-assignment";
    case ConstraintKind::mode_exclusivity: return "mode-exclusivity";
    case ConstraintKind::vs_capacity: return "vs-capacity";
    case ConstraintKind::energy_budget: return "energy-budget";
    case ConstraintKind::reference: return "reference";
  }
  return "unknown";
}

void check_scenario(const Scenario& s) {
  if (!(s.width_m > 0.0) || !(s.height_m > 0.0))
    throw std::invalid_argument("scenario: area dimensions must be positive");
  if (s.params.e_ps_nj <= 0) throw std::invalid_argument("scenario: e_ps_nj must be positive");
  if (s.params.e_vs_nj < 0) throw std::invalid_argument("scenario: e_vs_nj must be nonnegative");
  if (s.params.max_vs < 1) throw std::invalid_argument("scenario: max_vs must be at least 1");

  std::unordered_set<int> ids;
  for (const SensorNode& n : s.nodes) {
    if (!ids.insert(n.id).second)
      throw std::invalid_argument("scenario: duplicate node id " + std::to_string(n.id));
    if (n.budget_nj < 0)
      throw std::invalid_argument("scenario: node " + std::to_string(n.id) +
                                  " has negative budget");
    if (!(n.range_m > 0.0))
      throw std::invalid_argument("scenario: node " + std::to_string(n.id) +
                                  " has nonpositive range");
    if (!in_area(n.pos, s.width_m, s.height_m))
      throw std::invalid_argument("scenario: node " + std::to_string(n.id) +
                                  " lies outside the area");
  }
  ids.clear();
  for (const SensingTask& t : s.tasks) {
    if (!ids.insert(t.id).second)
      throw std::invalid_argument("scenario: duplicate task id " + std::to_string(t.id));
    if (!in_area(t.pos, s.width_m, s.height_m))
      throw std::invalid_argument("scenario: task " + std::to_string(t.id) +
                                  " lies outside the area");
  }
}

bool covers(const SensorNode& node, const SensingTask& task) {
  const double dx = node.pos.x - task.pos.x;
  const double dy = node.pos.y - task.pos.y;
  return dx * dx + dy * dy <= node.range_m * node.range_m;
}

bool AssignmentPlan::is_virtualized(int node_id) const {
  return std::find(virtualized.begin(), virtualized.end(), node_id) != virtualized.end();
}

CostBreakdown plan_cost(const AssignmentPlan& plan, const Scenario& s) {
  const auto nodes = node_index_by_id(s);
  const auto tasks = task_index_by_id(s);

  Energy ps_tasks = 0;
  Energy vs_tasks = 0;
  for (const Assignment& a : plan.assignments) {
    if (!tasks.contains(a.task_id))
      throw std::invalid_argument("plan_cost: assignment references unknown task " +
                                  std::to_string(a.task_id));
    if (!nodes.contains(a.node_id))
      throw std::invalid_argument("plan_cost: assignment references unknown node " +
                                  std::to_string(a.node_id));
    (a.mode == Mode::ps ? ps_tasks : vs_tasks) += 1;
  }
  for (int id : plan.virtualized) {
    if (!nodes.contains(id))
      throw std::invalid_argument("plan_cost: virtualized list references unknown node " +
                                  std::to_string(id));
  }

  CostBreakdown cost;
  cost.c_ps_nj = ps_tasks * s.params.e_ps_nj;
  cost.c_vs_nj = static_cast<Energy>(plan.virtualized.size()) * s.params.e_ps_nj +
                 vs_tasks * s.params.e_vs_nj;
  cost.total_nj = cost.c_ps_nj + cost.c_vs_nj;
  return cost;
}

Energy node_energy_use(const AssignmentPlan& plan, int node_id, const Scenario& s) {
  const auto nodes = node_index_by_id(s);
  if (!nodes.contains(node_id))
    throw std::invalid_argument("node_energy_use: unknown node " + std::to_string(node_id));

  Energy ps_tasks = 0;
  Energy vs_tasks = 0;
  for (const Assignment& a : plan.assignments) {
    if (a.node_id != node_id) continue;
    (a.mode == Mode::ps ? ps_tasks : vs_tasks) += 1;
  }
  Energy use = ps_tasks * s.params.e_ps_nj + vs_tasks * s.params.e_vs_nj;
  if (plan.is_virtualized(node_id)) use += s.params.e_ps_nj;
  return use;
}

ValidationResult validate_plan(const AssignmentPlan& plan, const Scenario& s) {
  ValidationResult result;
  const auto node_idx = node_index_by_id(s);
  const auto task_idx = task_index_by_id(s);

  auto flag = [&result](ConstraintKind kind, int node_id, int task_id, long long observed,
                        long long allowed, std::string message) {
    result.violations.push_back(
        {kind, node_id, task_id, observed, allowed, std::move(message)});
  };

  std::vector<int> task_count(s.tasks.size(), 0);
  std::vector<NodeTally> tally(s.nodes.size());
  std::vector<bool> virt(s.nodes.size(), false);

  for (int id : plan.virtualized) {
    auto it = node_idx.find(id);
    if (it == node_idx.end()) {
      flag(ConstraintKind::reference, id, -1, 0, 0,
           "virtualized list references unknown node " + std::to_string(id));
    } else {
      virt[it->second] = true;
    }
  }

  for (const Assignment& a : plan.assignments) {
    auto ti = task_idx.find(a.task_id);
    if (ti == task_idx.end()) {
      flag(ConstraintKind::reference, -1, a.task_id, 0, 0,
           "assignment references unknown task " + std::to_string(a.task_id));
      continue;
    }
    auto ni = node_idx.find(a.node_id);
    if (ni == node_idx.end()) {
      flag(ConstraintKind::reference, a.node_id, a.task_id, 0, 0,
           "assignment of task " + std::to_string(a.task_id) + " references unknown node " +
               std::to_string(a.node_id));
      continue;
    }
    task_count[ti->second] += 1;
    if (!covers(s.nodes[ni->second], s.tasks[ti->second])) {
      flag(ConstraintKind::task_assignment, a.node_id, a.task_id, 0, 1,
           "task " + std::to_string(a.task_id) + " assigned to node " +
               std::to_string(a.node_id) + " outside its sensing range");
    }
    NodeTally& t = tally[ni->second];
    (a.mode == Mode::ps ? t.ps_tasks : t.vs_tasks) += 1;
  }

  for (std::size_t j = 0; j < s.tasks.size(); ++j) {
    if (task_count[j] != 1) {
      flag(ConstraintKind::task_assignment, -1, s.tasks[j].id, task_count[j], 1,
           "task " + std::to_string(s.tasks[j].id) + " assigned " +
               std::to_string(task_count[j]) + " times, expected exactly 1");
    }
  }

  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const SensorNode& node = s.nodes[i];
    const NodeTally& t = tally[i];
    if (virt[i]) {
      if (t.ps_tasks > 0) {
        flag(ConstraintKind::mode_exclusivity, node.id, -1, t.ps_tasks, 0,
             "virtualized node " + std::to_string(node.id) + " hosts " +
                 std::to_string(t.ps_tasks) + " PS task(s)");
      }
      if (t.vs_tasks == 0) {
        result.warnings.push_back("virtualized node " + std::to_string(node.id) +
                                  " hosts no virtual sensor");
      }
    } else {
      if (t.ps_tasks > 1) {
        flag(ConstraintKind::mode_exclusivity, node.id, -1, t.ps_tasks, 1,
             "node " + std::to_string(node.id) + " hosts " + std::to_string(t.ps_tasks) +
                 " PS tasks, at most 1 allowed");
      }
      if (t.vs_tasks > 0) {
        flag(ConstraintKind::mode_exclusivity, node.id, -1, t.vs_tasks, 0,
             "non-virtualized node " + std::to_string(node.id) + " hosts " +
                 std::to_string(t.vs_tasks) + " VS task(s)");
      }
    }
    if (t.vs_tasks > s.params.max_vs) {
      flag(ConstraintKind::vs_capacity, node.id, -1, t.vs_tasks, s.params.max_vs,
           "node " + std::to_string(node.id) + " hosts " + std::to_string(t.vs_tasks) +
               " virtual sensors, capacity is " + std::to_string(s.params.max_vs));
    }
    Energy use = t.ps_tasks * s.params.e_ps_nj + t.vs_tasks * s.params.e_vs_nj;
    if (virt[i]) use += s.params.e_ps_nj;
    if (use > node.budget_nj) {
      flag(ConstraintKind::energy_budget, node.id, -1, use, node.budget_nj,
           "node " + std::to_string(node.id) + " would draw " + std::to_string(use) +
               " nJ, budget is " + std::to_string(node.budget_nj) + " nJ");
    }
  }

  return result;
}

}  // namespace vsnopt
