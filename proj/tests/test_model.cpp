#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "vsnopt/model.hpp"
#include "vsnopt/rng.hpp"

using namespace vsnopt;
using test::ScenarioBuilder;

namespace {

bool has_violation(const ValidationResult& r, ConstraintKind kind) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("coverage boundary is inclusive") {
  const SensorNode node{0, {0.0, 0.0}, 1'000'000, 30.0};
  CHECK(covers(node, SensingTask{0, {30.0, 0.0}}));    // exactly at range
  CHECK(covers(node, SensingTask{1, {0.0, 0.0}}));     // zero distance
  CHECK_FALSE(covers(node, SensingTask{2, {21.3, 21.3}}));  // sqrt(2)*21.3 > 30
}

TEST_CASE("plan_cost matches the two cost components") {
  const Scenario s = ScenarioBuilder()
                         .node(0, 10, 10, 2'000'000'000)
                         .node(1, 50, 50, 2'000'000'000)
                         .task(0, 12, 12)
                         .task(1, 14, 10)
                         .task(2, 52, 52)
                         .build();

  SUBCASE("virtualized pair plus one physical host") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::vs}, {1, 0, Mode::vs}, {2, 1, Mode::ps}};
    plan.virtualized = {0};
    const CostBreakdown cost = plan_cost(plan, s);
    CHECK(cost.c_ps_nj == 17'000);
    CHECK(cost.c_vs_nj == 20'400);
    CHECK(cost.total_nj == 37'400);
  }

  SUBCASE("empty plan on an empty task set") {
    const Scenario empty = ScenarioBuilder().node(0, 10, 10, 2'000'000'000).build();
    const CostBreakdown cost = plan_cost(AssignmentPlan{}, empty);
    CHECK(cost.c_ps_nj == 0);
    CHECK(cost.c_vs_nj == 0);
    CHECK(cost.total_nj == 0);
  }

  SUBCASE("single PS assignment") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::ps}};
    const CostBreakdown cost = plan_cost(plan, s);
    CHECK(cost.total_nj == 17'000);
    CHECK(cost.c_vs_nj == 0);
  }

  SUBCASE("unknown ids are rejected by name") {
    AssignmentPlan plan;
    plan.assignments = {{0, 7, Mode::ps}};
    CHECK_THROWS_WITH_AS(plan_cost(plan, s), doctest::Contains("unknown node 7"),
                         std::invalid_argument);
    plan.assignments = {{9, 0, Mode::ps}};
    CHECK_THROWS_WITH_AS(plan_cost(plan, s), doctest::Contains("unknown task 9"),
                         std::invalid_argument);
  }
}

TEST_CASE("node_energy_use per role") {
  const Scenario s = ScenarioBuilder()
                         .node(0, 10, 10, 2'000'000'000)
                         .node(1, 50, 50, 2'000'000'000)
                         .node(2, 90, 90, 2'000'000'000)
                         .task(0, 12, 12)
                         .task(1, 14, 10)
                         .task(2, 52, 52)
                         .build();
  AssignmentPlan plan;
  plan.assignments = {{0, 0, Mode::vs}, {1, 0, Mode::vs}, {2, 1, Mode::ps}};
  plan.virtualized = {0};

  CHECK(node_energy_use(plan, 2, s) == 0);         // idle
  CHECK(node_energy_use(plan, 0, s) == 20'400);    // virtualized, two VS
  CHECK(node_energy_use(plan, 1, s) == 17'000);    // PS host
  CHECK_THROWS_AS(node_energy_use(plan, 42, s), std::invalid_argument);
}

TEST_CASE("validate_plan flags each constraint") {
  const Scenario s = ScenarioBuilder()
                         .node(0, 10, 10, 2'000'000'000)
                         .node(1, 50, 50, 2'000'000'000)
                         .task(0, 12, 12)
                         .task(1, 14, 10)
                         .build();

  SUBCASE("double assignment") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::ps}, {0, 1, Mode::ps}, {1, 0, Mode::vs}};
    plan.virtualized = {0};
    const ValidationResult r = validate_plan(plan, s);
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, ConstraintKind::task_assignment));
  }

  SUBCASE("unassigned task") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::ps}};
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::task_assignment));
  }

  SUBCASE("assignment outside sensing range") {
    AssignmentPlan plan;
    plan.assignments = {{0, 1, Mode::ps}, {1, 0, Mode::ps}};  // node 1 is ~53 m away
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::task_assignment));
  }

  SUBCASE("five virtual sensors exceed a capacity of four") {
    const Scenario wide = ScenarioBuilder()
                              .node(0, 50, 50, 2'000'000'000)
                              .task(0, 50, 50)
                              .task(1, 51, 50)
                              .task(2, 52, 50)
                              .task(3, 53, 50)
                              .task(4, 54, 50)
                              .build();
    AssignmentPlan plan;
    for (int t = 0; t < 5; ++t) plan.assignments.push_back({t, 0, Mode::vs});
    plan.virtualized = {0};
    const ValidationResult r = validate_plan(plan, wide);
    CHECK_FALSE(r.ok());
    REQUIRE(has_violation(r, ConstraintKind::vs_capacity));
    for (const Violation& v : r.violations) {
      if (v.kind != ConstraintKind::vs_capacity) continue;
      CHECK(v.observed == 5);
      CHECK(v.allowed == 4);
      CHECK(v.node_id == 0);
    }
  }

  SUBCASE("budget rejects the virtualization overhead") {
    const Scenario tight = ScenarioBuilder()
                               .node(0, 50, 50, 18'000)
                               .task(0, 50, 50)
                               .build();
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::vs}};
    plan.virtualized = {0};
    const ValidationResult r = validate_plan(plan, tight);
    REQUIRE(has_violation(r, ConstraintKind::energy_budget));
    for (const Violation& v : r.violations) {
      CHECK(v.observed == 18'700);
      CHECK(v.allowed == 18'000);
    }
    // the same node hosting the task on its PS is fine
    AssignmentPlan ps_plan;
    ps_plan.assignments = {{0, 0, Mode::ps}};
    CHECK(validate_plan(ps_plan, tight).ok());
  }

  SUBCASE("PS task on a virtualized node") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::ps}, {1, 0, Mode::vs}};
    plan.virtualized = {0};
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::mode_exclusivity));
  }

  SUBCASE("VS task on a non-virtualized node") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::vs}, {1, 0, Mode::vs}};
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::mode_exclusivity));
  }

  SUBCASE("two PS tasks on one node") {
    AssignmentPlan plan;
    plan.assignments = {{0, 0, Mode::ps}, {1, 0, Mode::ps}};
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::mode_exclusivity));
  }

  SUBCASE("unknown references become violations, not errors") {
    AssignmentPlan plan;
    plan.assignments = {{0, 9, Mode::ps}, {1, 0, Mode::ps}};
    plan.virtualized = {42};
    const ValidationResult r = validate_plan(plan, s);
    CHECK(has_violation(r, ConstraintKind::reference));
  }

  SUBCASE("idle virtualized node is valid but warned about") {
    const Scenario two = ScenarioBuilder()
                             .node(0, 10, 10, 2'000'000'000)
                             .node(1, 90, 90, 2'000'000'000)
                             .task(0, 12, 12)
                             .build();
    AssignmentPlan warned;
    warned.assignments = {{0, 0, Mode::ps}};
    warned.virtualized = {1};
    const ValidationResult r = validate_plan(warned, two);
    CHECK(r.ok());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("node 1") != std::string::npos);
  }
}

TEST_CASE("cost decomposes exactly across nodes") {
  SplitMix64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const AssignmentPlan plan = test::random_plan(s, rng);
    Energy sum = 0;
    for (const SensorNode& n : s.nodes) sum += node_energy_use(plan, n.id, s);
    CHECK(plan_cost(plan, s).total_nj == sum);
  }
}

TEST_CASE("two independently coded validators agree") {
  SplitMix64 rng(7);
  int valid_seen = 0;
  int invalid_seen = 0;
  for (int round = 0; round < 1000; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const AssignmentPlan plan = test::random_plan(s, rng);
    const bool ours = validate_plan(plan, s).ok();
    const bool naive = test::naive_plan_ok(plan, s);
    CHECK(ours == naive);
    (ours ? valid_seen : invalid_seen) += 1;
  }
  // the generator must exercise both outcomes for the check to mean much
  CHECK(valid_seen > 0);
  CHECK(invalid_seen > 0);
}

TEST_CASE("scaling energies and budgets scales cost and keeps the verdict") {
  SplitMix64 rng(99);
  for (int round = 0; round < 100; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const AssignmentPlan plan = test::random_plan(s, rng);
    for (const Energy k : {2, 10, 1000}) {
      Scenario scaled = s;
      scaled.params.e_ps_nj *= k;
      scaled.params.e_vs_nj *= k;
      for (SensorNode& n : scaled.nodes) n.budget_nj *= k;
      CHECK(plan_cost(plan, scaled).total_nj == plan_cost(plan, s).total_nj * k);
      CHECK(validate_plan(plan, scaled).ok() == validate_plan(plan, s).ok());
    }
  }
}

TEST_CASE("every valid plan obeys the per-task cost floor") {
  // a PS task costs e_ps; a virtualized node with k tasks costs
  // e_ps + k*e_vs >= k*(e_ps/max_vs + e_vs); so any valid plan costs at
  // least |tasks| * min(e_ps, e_ps/max_vs + e_vs)
  SplitMix64 rng(60'660);
  int valid_seen = 0;
  for (int round = 0; round < 2000; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    const AssignmentPlan plan = test::random_plan(s, rng);
    if (!validate_plan(plan, s).ok()) continue;
    valid_seen += 1;
    const Energy tasks = static_cast<Energy>(s.tasks.size());
    const Energy per_task_scaled =
        std::min(s.params.e_ps_nj * s.params.max_vs,
                 s.params.e_ps_nj + s.params.max_vs * s.params.e_vs_nj);
    CHECK(plan_cost(plan, s).total_nj * s.params.max_vs >= tasks * per_task_scaled);
  }
  CHECK(valid_seen > 50);
}

TEST_CASE("plan cost is permutation invariant") {
  SplitMix64 rng(5150);
  std::mt19937 shuffler(1234);
  for (int round = 0; round < 100; ++round) {
    const Scenario s = test::random_micro_scenario(rng);
    AssignmentPlan plan = test::random_plan(s, rng);
    const CostBreakdown before = plan_cost(plan, s);
    std::shuffle(plan.assignments.begin(), plan.assignments.end(), shuffler);
    CHECK(plan_cost(plan, s) == before);
  }
}

TEST_CASE("check_scenario rejects malformed instances") {
  CHECK_THROWS_AS(ScenarioBuilder().node(0, 10, 10, 100).node(0, 20, 20, 100).build(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioBuilder().node(0, 200, 10, 100).build(), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioBuilder().node(0, 10, 10, -5).build(), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioBuilder().params(0, 0, 4).node(0, 10, 10, 100).build(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioBuilder().params(17'000, 1'700, 0).node(0, 10, 10, 100).build(),
                  std::invalid_argument);
}
