#include <doctest.h>

#include <cstdlib>
#include <limits>

#include "test_support.hpp"
#include "vsnopt/rng.hpp"
#include "vsnopt/scenario.hpp"
#include "vsnopt/solver.hpp"

using namespace vsnopt;
using test::ScenarioBuilder;

namespace {

constexpr Energy kInf = std::numeric_limits<Energy>::max();

Energy optimal_or_inf(const SolveResult& r) {
  return r.status == SolveStatus::optimal ? r.cost.total_nj : kInf;
}

int vs_tasks_on(const AssignmentPlan& plan, int node_id) {
  int count = 0;
  for (const Assignment& a : plan.assignments)
    if (a.node_id == node_id && a.mode == Mode::vs) count += 1;
  return count;
}

}  // namespace

TEST_CASE("node_capacity folds the budget into the mode limits") {
  const EnergyParams params = test::standard_params();
  auto node = [](Energy budget) { return SensorNode{0, {10, 10}, budget, 30.0}; };

  SUBCASE("huge budget") {
    const NodeCapacity cap = node_capacity(node(1'900'000'000), params);
    CHECK(cap.ps_allowed);
    CHECK(cap.vs_capacity == 4);
  }
  SUBCASE("below the base running cost nothing fits") {
    const NodeCapacity cap = node_capacity(node(16'999), params);
    CHECK_FALSE(cap.ps_allowed);
    CHECK(cap.vs_capacity == 0);
  }
  SUBCASE("PS fits but no virtual sensor does") {
    const NodeCapacity cap = node_capacity(node(18'000), params);
    CHECK(cap.ps_allowed);
    CHECK(cap.vs_capacity == 0);
  }
  SUBCASE("partial virtual capacity") {
    CHECK(node_capacity(node(18'700), params).vs_capacity == 1);
    CHECK(node_capacity(node(22'099), params).vs_capacity == 2);
    CHECK(node_capacity(node(23'800), params).vs_capacity == 4);
  }
  SUBCASE("zero overhead grants full capacity once the base cost fits") {
    const EnergyParams zero_vs{17'000, 0, 4};
    CHECK(node_capacity(node(17'000), zero_vs).vs_capacity == 4);
    CHECK(node_capacity(node(16'000), zero_vs).vs_capacity == 0);
  }
}

TEST_CASE("brute force on the smallest instances") {
  SUBCASE("one node, two tasks: virtualization is forced") {
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 2'000'000'000)
                           .task(0, 50, 55)
                           .task(1, 55, 50)
                           .build();
    const SolveResult r = brute_force(s, 8);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 20'400);
    CHECK(vs_tasks_on(r.plan, 0) == 2);
  }

  SUBCASE("one node, one task: PS wins over VS") {
    const Scenario s =
        ScenarioBuilder().node(0, 50, 50, 2'000'000'000).task(0, 50, 55).build();
    const SolveResult r = brute_force(s, 8);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 17'000);
    CHECK(r.plan.assignments[0].mode == Mode::ps);
    CHECK(r.plan.virtualized.empty());
  }

  SUBCASE("uncovered task means infeasible") {
    const Scenario s =
        ScenarioBuilder().node(0, 10, 10, 2'000'000'000).task(0, 90, 90).build();
    CHECK(brute_force(s, 8).status == SolveStatus::infeasible);
  }

  SUBCASE("instances above the cap are refused with sizes") {
    ScenarioBuilder b;
    b.node(0, 50, 50, 2'000'000'000);
    for (int t = 0; t < 9; ++t) b.task(t, 50.0 + t, 50.0);
    CHECK_THROWS_WITH_AS(brute_force(b.build(), 8), doctest::Contains("9 tasks"),
                         std::invalid_argument);
  }
}

TEST_CASE("VSNOPT_BRUTE_CAP overrides the default cap") {
  unsetenv("VSNOPT_BRUTE_CAP");
  CHECK(default_brute_cap() == 8);
  setenv("VSNOPT_BRUTE_CAP", "11", 1);
  CHECK(default_brute_cap() == 11);
  setenv("VSNOPT_BRUTE_CAP", "banana", 1);
  CHECK_THROWS_AS(default_brute_cap(), std::invalid_argument);
  unsetenv("VSNOPT_BRUTE_CAP");
}

TEST_CASE("assignment subproblem routes tasks for a fixed mode vector") {
  // nodes 0 and 1 both cover both tasks
  const Scenario s = ScenarioBuilder()
                         .node(0, 50, 50, 2'000'000'000)
                         .node(1, 55, 50, 2'000'000'000)
                         .task(0, 52, 50)
                         .task(1, 53, 52)
                         .build();

  SUBCASE("virtualized node absorbs everything at the overhead rate") {
    const std::vector<NodeState> states{NodeState::virtualized, NodeState::physical};
    const Routing r = assignment_subproblem(s, states);
    REQUIRE(r.feasible);
    CHECK(r.vs_count == 2);
    CHECK(r.ps_count == 0);
    CHECK(r.routing_cost_nj == 3'400);
    for (const Assignment& a : r.task_routing) CHECK(a.node_id == 0);
  }

  SUBCASE("closing every node starves the tasks") {
    const std::vector<NodeState> states{NodeState::closed, NodeState::closed};
    CHECK_FALSE(assignment_subproblem(s, states).feasible);
  }

  SUBCASE("one physical node cannot take two tasks") {
    const std::vector<NodeState> states{NodeState::physical, NodeState::closed};
    CHECK_FALSE(assignment_subproblem(s, states).feasible);
  }

  SUBCASE("state vector must cover every node") {
    const std::vector<NodeState> states{NodeState::physical};
    CHECK_THROWS_AS(assignment_subproblem(s, states), std::invalid_argument);
  }
}

TEST_CASE("exact solver handles the analytic corners") {
  SUBCASE("a single node packing four tasks") {
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 2'000'000'000)
                           .task(0, 50, 45)
                           .task(1, 45, 50)
                           .task(2, 50, 55)
                           .task(3, 55, 50)
                           .build();
    const SolveResult r = solve_exact(s);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 23'800);
    CHECK(r.plan.virtualized == std::vector<int>{0});
    CHECK(vs_tasks_on(r.plan, 0) == 4);
  }

  SUBCASE("zero tasks cost nothing") {
    const Scenario s = ScenarioBuilder().node(0, 10, 10, 2'000'000'000).build();
    const SolveResult r = solve_exact(s);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 0);
    CHECK(r.plan.assignments.empty());
    CHECK(r.plan.virtualized.empty());
  }

  SUBCASE("a 18 kNJ budget admits PS hosting but not virtualization") {
    const Scenario one_task =
        ScenarioBuilder().node(0, 50, 50, 18'000).task(0, 50, 55).build();
    const SolveResult single = solve_exact(one_task);
    REQUIRE(single.status == SolveStatus::optimal);
    CHECK(single.cost.total_nj == 17'000);
    CHECK(single.plan.virtualized.empty());

    const Scenario two_tasks = ScenarioBuilder()
                                   .node(0, 50, 50, 18'000)
                                   .task(0, 50, 55)
                                   .task(1, 55, 50)
                                   .build();
    CHECK(solve_exact(two_tasks).status == SolveStatus::infeasible);
    CHECK(brute_force(two_tasks, 8).status == SolveStatus::infeasible);
  }
}

TEST_CASE("exact solver agrees with the exhaustive oracle") {
  SplitMix64 rng(1234);
  int optimal_seen = 0;
  int infeasible_seen = 0;
  for (int round = 0; round < 200; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult oracle = brute_force(s, 8);
    const SolveResult exact = solve_exact(s);
    REQUIRE(oracle.status == exact.status);
    if (oracle.status == SolveStatus::optimal) {
      CHECK(oracle.cost.total_nj == exact.cost.total_nj);
      CHECK(validate_plan(oracle.plan, s).ok());
      CHECK(validate_plan(exact.plan, s).ok());
      optimal_seen += 1;
    } else {
      infeasible_seen += 1;
    }
  }
  CHECK(optimal_seen > 0);
  CHECK(infeasible_seen > 0);
}

TEST_CASE("greedy warm start") {
  SUBCASE("coincides with exact when one node covers everything") {
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 2'000'000'000)
                           .task(0, 50, 45)
                           .task(1, 45, 50)
                           .task(2, 50, 55)
                           .task(3, 55, 50)
                           .build();
    const SolveResult g = greedy_upper_bound(s);
    REQUIRE(g.status == SolveStatus::optimal);
    CHECK(g.cost.total_nj == 23'800);
  }

  SUBCASE("may strand a task the exact solver can place") {
    // node 0 can host two VSs and covers all three tasks; node 1 only
    // covers task 0; greedily packing tasks 0 and 1 leaves task 2 stuck
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 21'000)
                           .node(1, 50, 17, 2'000'000'000)
                           .task(0, 50, 45)
                           .task(1, 50, 55)
                           .task(2, 55, 50)
                           .build();
    CHECK(greedy_upper_bound(s).status == SolveStatus::infeasible);
    const SolveResult exact = solve_exact(s);
    REQUIRE(exact.status == SolveStatus::optimal);
    CHECK(exact.cost.total_nj == 37'400);
  }

  SUBCASE("empty task set yields an empty plan") {
    const Scenario s = ScenarioBuilder().node(0, 10, 10, 2'000'000'000).build();
    const SolveResult g = greedy_upper_bound(s);
    REQUIRE(g.status == SolveStatus::optimal);
    CHECK(g.cost.total_nj == 0);
  }

  SUBCASE("is an upper bound on random instances") {
    SplitMix64 rng(4242);
    for (int round = 0; round < 100; ++round) {
      const Scenario s = test::random_micro_scenario(rng);
      const SolveResult g = greedy_upper_bound(s);
      if (g.status != SolveStatus::optimal) continue;
      const SolveResult exact = solve_exact(s);
      REQUIRE(exact.status == SolveStatus::optimal);
      CHECK(g.cost.total_nj >= exact.cost.total_nj);
    }
  }
}

TEST_CASE("traditional baseline") {
  SUBCASE("two tasks on two distinct nodes") {
    const Scenario s = ScenarioBuilder()
                           .node(0, 40, 50, 2'000'000'000)
                           .node(1, 60, 50, 2'000'000'000)
                           .task(0, 45, 50)
                           .task(1, 55, 50)
                           .build();
    const SolveResult r = solve_traditional(s);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 34'000);
    CHECK(r.plan.virtualized.empty());
    CHECK(r.plan.assignments[0].node_id != r.plan.assignments[1].node_id);
  }

  SUBCASE("two tasks sharing a single coverer") {
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 2'000'000'000)
                           .task(0, 50, 55)
                           .task(1, 55, 50)
                           .build();
    CHECK(solve_traditional(s).status == SolveStatus::infeasible);
  }

  SUBCASE("zero tasks") {
    const Scenario s = ScenarioBuilder().node(0, 10, 10, 2'000'000'000).build();
    const SolveResult r = solve_traditional(s);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 0);
  }

  SUBCASE("matching needs augmenting paths, not just first fit") {
    // task 0 is covered by both nodes, task 1 only by node 0: a greedy
    // match of task 0 to node 0 must be undone
    const Scenario s = ScenarioBuilder()
                           .node(0, 50, 50, 2'000'000'000)
                           .node(1, 50, 80, 2'000'000'000)
                           .task(0, 50, 60)
                           .task(1, 50, 40)
                           .build();
    const SolveResult r = solve_traditional(s);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.cost.total_nj == 34'000);
  }
}

TEST_CASE("structural optimality: no virtualized node hosts fewer than two VSs") {
  SplitMix64 rng(31337);
  for (int round = 0; round < 150; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult r = solve_exact(s);
    if (r.status != SolveStatus::optimal) continue;
    for (int id : r.plan.virtualized) CHECK(vs_tasks_on(r.plan, id) >= 2);
  }
}

TEST_CASE("cost floor holds on every solved instance") {
  SplitMix64 rng(777);
  for (int round = 0; round < 150; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult r = solve_exact(s);
    if (r.status != SolveStatus::optimal) continue;
    const Energy tasks = static_cast<Energy>(s.tasks.size());
    // with the standard constants: min(e_ps, e_ps/max_vs + e_vs) = 5950
    CHECK(r.cost.total_nj >= tasks * 5'950);
    // exact rational form, valid for any constants
    const Energy per_task_scaled =
        std::min(s.params.e_ps_nj * s.params.max_vs,
                 s.params.e_ps_nj + s.params.max_vs * s.params.e_vs_nj);
    CHECK(r.cost.total_nj * s.params.max_vs >= tasks * per_task_scaled);
  }
}

TEST_CASE("adding a node or dropping a task never hurts") {
  SplitMix64 rng(2718);
  for (int round = 0; round < 80; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const Energy base = optimal_or_inf(solve_exact(s));

    Scenario grown = s;
    SensorNode extra;
    extra.id = 100;
    extra.pos.x = rng.next_unit() * s.width_m;
    extra.pos.y = rng.next_unit() * s.height_m;
    extra.range_m = 30.0;
    extra.budget_nj = 2'000'000'000;
    grown.nodes.push_back(extra);
    CHECK(optimal_or_inf(solve_exact(grown)) <= base);

    if (!s.tasks.empty()) {
      Scenario shrunk = s;
      shrunk.tasks.erase(shrunk.tasks.begin() +
                         static_cast<long>(rng.next() % shrunk.tasks.size()));
      CHECK(optimal_or_inf(solve_exact(shrunk)) <= base);
    }
  }
}

TEST_CASE("scaling energies scales the cost and keeps the plan") {
  SplitMix64 rng(1618);
  for (int round = 0; round < 60; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult base = solve_exact(s);
    for (const Energy k : {2, 10, 1000}) {
      Scenario scaled = s;
      scaled.params.e_ps_nj *= k;
      scaled.params.e_vs_nj *= k;
      for (SensorNode& n : scaled.nodes) n.budget_nj *= k;
      const SolveResult r = solve_exact(scaled);
      REQUIRE(r.status == base.status);
      if (base.status != SolveStatus::optimal) continue;
      CHECK(r.cost.total_nj == base.cost.total_nj * k);
      CHECK(r.plan == base.plan);
    }
  }
}

TEST_CASE("whenever the baseline solves, the exact solver does at least as well") {
  SplitMix64 rng(555);
  for (int round = 0; round < 100; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult trad = solve_traditional(s);
    if (trad.status != SolveStatus::optimal) continue;
    const SolveResult exact = solve_exact(s);
    REQUIRE(exact.status == SolveStatus::optimal);
    CHECK(exact.cost.total_nj <= trad.cost.total_nj);
    CHECK(trad.cost.total_nj ==
          static_cast<Energy>(s.tasks.size()) * s.params.e_ps_nj);
  }
}

TEST_CASE("every recorded search bound underestimates its subtree") {
  SplitMix64 rng(90210);
  for (int round = 0; round < 40; ++round) {
    const Scenario s = test::random_micro_scenario(rng, {3, 3, 60.0, 30.0, true});
    std::vector<BnbTraceEntry> trace;
    (void)solve_exact(s, &trace);
    for (const BnbTraceEntry& entry : trace) {
      // exhaust the subtree: every completion of the undecided nodes
      std::vector<int> undecided;
      for (std::size_t i = 0; i < entry.fixing.size(); ++i)
        if (entry.fixing[i] == -1) undecided.push_back(static_cast<int>(i));
      Energy subtree_best = kInf;
      const std::size_t combos = std::size_t{1} << undecided.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        std::vector<NodeState> states(entry.fixing.size(), NodeState::physical);
        Energy fixed_charges = 0;
        for (std::size_t i = 0; i < entry.fixing.size(); ++i)
          if (entry.fixing[i] == 1) states[i] = NodeState::virtualized;
        for (std::size_t b = 0; b < undecided.size(); ++b)
          if (mask & (std::size_t{1} << b))
            states[static_cast<std::size_t>(undecided[b])] = NodeState::virtualized;
        for (std::size_t i = 0; i < states.size(); ++i)
          if (states[i] == NodeState::virtualized) fixed_charges += s.params.e_ps_nj;
        const Routing routing = assignment_subproblem(s, states);
        if (routing.feasible)
          subtree_best = std::min(subtree_best, fixed_charges + routing.routing_cost_nj);
      }
      if (subtree_best < kInf) CHECK(entry.bound_nj <= subtree_best);
    }
  }
}

TEST_CASE("zero virtualization overhead keeps the solver exact") {
  // with e_vs = 0 virtual capacity is max_vs outright and single-VS
  // nodes may tie PS hosting; exactness must survive the ties
  SplitMix64 rng(6006);
  int solved = 0;
  for (int round = 0; round < 120; ++round) {
    Scenario s = test::random_micro_scenario(rng);
    s.params.e_vs_nj = 0;
    const SolveResult oracle = brute_force(s, 8);
    const SolveResult exact = solve_exact(s);
    REQUIRE(oracle.status == exact.status);
    if (exact.status != SolveStatus::optimal) continue;
    CHECK(oracle.cost.total_nj == exact.cost.total_nj);
    CHECK(validate_plan(exact.plan, s).ok());
    solved += 1;
  }
  CHECK(solved > 0);
}

TEST_CASE("overhead above the node cost still solves exactly") {
  // e_vs > e_ps inverts the usual preference for packing
  SplitMix64 rng(6007);
  for (int round = 0; round < 120; ++round) {
    Scenario s = test::random_micro_scenario(rng);
    s.params.e_vs_nj = 20'000;
    const SolveResult oracle = brute_force(s, 8);
    const SolveResult exact = solve_exact(s);
    REQUIRE(oracle.status == exact.status);
    if (exact.status != SolveStatus::optimal) continue;
    CHECK(oracle.cost.total_nj == exact.cost.total_nj);
    CHECK(validate_plan(exact.plan, s).ok());
  }
}

TEST_CASE("solving twice is bit-for-bit repeatable") {
  SplitMix64 rng(8080);
  for (int round = 0; round < 30; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const SolveResult a = solve_exact(s);
    const SolveResult b = solve_exact(s);
    CHECK(a.status == b.status);
    CHECK(a.cost == b.cost);
    CHECK(a.plan == b.plan);
    CHECK(a.stats.nodes_explored == b.stats.nodes_explored);
    CHECK(a.stats.bound_prunes == b.stats.bound_prunes);
  }
}
