#include <doctest.h>

#include <random>

#include "instances.hpp"
#include "latticelink/planner.hpp"
#include "latticelink/scenario.hpp"
#include "oracles.hpp"

using namespace latticelink;

namespace {

World load_world(const std::string& name) {
    auto s = load_scenario(std::string(LATTICELINK_SCENARIO_DIR) + "/" + name + ".json");
    s.world.trace().set_recording(false);
    return std::move(s.world);
}

FaceAddress fa(const std::string& m, Direction d) { return {m, d}; }

std::size_t count_kind(const Plan& plan, std::size_t index) {
    return static_cast<std::size_t>(std::count_if(plan.actions.begin(), plan.actions.end(),
                                                  [&](const Action& a) { return a.index() == index; }));
}

}  // namespace

TEST_CASE("describe strings") {
    CHECK(describe(Couple{fa("A", Direction::PosX), fa("B", Direction::NegX)}) == "couple A:+X B:-X");
    CHECK(describe(Slide{"M", Direction::NegZ}) == "slide M -Z");
    CHECK(describe(DecoupleMale{fa("A", Direction::PosX)}) == "decouple-male A:+X");
    CHECK(describe(DecoupleFemale{fa("B", Direction::NegX)}) == "decouple-female B:-X");
    CHECK(describe(SetPower{"M", false}) == "set-power M off");
}

TEST_CASE("validate_plan examples") {
    World start;
    auto a = make_module("A", {0, 0, 0});
    a.anchored = true;
    REQUIRE(start.place_module(a).ok());
    auto b = make_module("B", {1, 1, 0});
    b.face(Direction::NegX) = FaceInterface::blank();
    REQUIRE(start.place_module(b).ok());

    World goal;
    REQUIRE(goal.place_module(a).ok());
    auto b_goal = b;
    b_goal.position = {1, 0, 0};
    b_goal.face(Direction::NegX) = FaceInterface::blank();
    REQUIRE(goal.place_module(b_goal).ok());
    REQUIRE(goal.couple(fa("A", Direction::PosX), fa("B", Direction::NegX)).code() == Errc::Blank);

    SUBCASE("a step coupling into a blank face is rejected at that step") {
        Plan plan{{Slide{"B", Direction::NegY}, Couple{fa("B", Direction::NegX), fa("A", Direction::PosX)},
                   Couple{fa("A", Direction::PosX), fa("B", Direction::NegX)}},
                  {}};
        const auto v = validate_plan(start, plan, goal);
        CHECK_FALSE(v.valid);
        CHECK(v.step == 1);
        CHECK(v.reason->code == Errc::Blank);
    }
    SUBCASE("hand-written two-module plan") {
        World plain_start;
        REQUIRE(plain_start.place_module(a).ok());
        REQUIRE(plain_start.place_module(make_module("B", {1, 1, 0})).ok());
        World plain_goal;
        REQUIRE(plain_goal.place_module(a).ok());
        REQUIRE(plain_goal.place_module(make_module("B", {1, 0, 0})).ok());
        REQUIRE(plain_goal.couple(fa("A", Direction::PosX), fa("B", Direction::NegX)).ok());

        Plan plan{{Slide{"B", Direction::NegY}, Couple{fa("A", Direction::PosX), fa("B", Direction::NegX)}}, {}};
        CHECK(validate_plan(plain_start, plan, plain_goal).valid);

        // The joint's gender is not part of the goal.
        Plan reversed{{Slide{"B", Direction::NegY}, Couple{fa("B", Direction::NegX), fa("A", Direction::PosX)}}, {}};
        CHECK(validate_plan(plain_start, reversed, plain_goal).valid);

        Plan short_plan{{Slide{"B", Direction::NegY}}, {}};
        const auto v = validate_plan(plain_start, short_plan, plain_goal);
        CHECK(v.step == 1);
        CHECK(v.reason->code == Errc::GoalMismatch);

        Plan bad_hash{plan.actions, {0, 0}};
        CHECK(validate_plan(plain_start, bad_hash, plain_goal).reason->code == Errc::HashMismatch);
    }
}

TEST_CASE("assembly plan is minimal and valid") {
    const World start = load_world("assembly_start");
    const World goal = load_world("assembly_goal");
    const auto result = plan_reconfiguration(start, goal);
    REQUIRE(result.plan.has_value());
    CHECK(validate_plan(start, *result.plan, goal).valid);
    CHECK(result.plan->step_hashes.size() == result.plan->cost());

    const auto bfs = oracle::bfs_solve(start, goal, bounding_region(start, goal, 1), true);
    REQUIRE(bfs.solvable);
    CHECK(bfs.depth == 3);
    CHECK(result.plan->cost() == bfs.depth);
}

TEST_CASE("fault removal needs single-sided decoupling from the female side") {
    const World start = load_world("fault_removal_start");
    const World goal = load_world("fault_removal_goal");
    const auto result = plan_reconfiguration(start, goal);
    REQUIRE(result.plan.has_value());
    CHECK(validate_plan(start, *result.plan, goal).valid);
    CHECK(count_kind(*result.plan, 3) == 2);  // DecoupleFemale
    CHECK(count_kind(*result.plan, 2) == 0);  // the failed side never acts
    CHECK(result.plan->cost() == 5);

    const auto bfs = oracle::bfs_solve(start, goal, bounding_region(start, goal, 1), false);
    REQUIRE(bfs.solvable);
    CHECK(bfs.depth == 5);
}

TEST_CASE("unreachable goal is reported as exhausted") {
    const World start = load_world("assembly_start");
    const World goal = load_world("unreachable_goal");
    const auto result = plan_reconfiguration(start, goal);
    CHECK_FALSE(result.plan.has_value());
    CHECK(result.exhausted);
}

TEST_CASE("budget bounds expansions") {
    const World start = load_world("fault_removal_start");
    const World goal = load_world("fault_removal_goal");
    PlannerOptions opts;
    opts.budget = 2;
    const auto result = plan_reconfiguration(start, goal, opts);
    CHECK_FALSE(result.plan.has_value());
    CHECK_FALSE(result.exhausted);
    CHECK(result.expanded == 2);
}

TEST_CASE("planner is deterministic") {
    const World start = load_world("fault_removal_start");
    const World goal = load_world("fault_removal_goal");
    const auto a = plan_reconfiguration(start, goal);
    const auto b = plan_reconfiguration(start, goal);
    REQUIRE(a.plan.has_value());
    REQUIRE(b.plan.has_value());
    CHECK(a.plan->step_hashes == b.plan->step_hashes);
    CHECK(a.expanded == b.expanded);
}

TEST_CASE("random small instances: solvability matches brute force, plans validate") {
    std::mt19937_64 rng(31337);
    std::size_t solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        const auto inst = instances::random_instance(rng, n, trial % 2 == 1);
        PlannerOptions opts;
        opts.region = inst.region;
        opts.power_actions = false;
        const auto result = plan_reconfiguration(inst.start, inst.goal, opts);
        const auto bfs = oracle::bfs_solve(inst.start, inst.goal, inst.region, false);
        CHECK(result.plan.has_value() == bfs.solvable);
        if (result.plan) {
            ++solved;
            CHECK(validate_plan(inst.start, *result.plan, inst.goal).valid);
            CHECK(result.plan->cost() >= bfs.depth);
        } else {
            CHECK(result.exhausted);
        }
    }
    CHECK(solved > 0);
}

TEST_CASE("identical start and goal give an empty plan") {
    const World w = load_world("fault_removal_start");
    const auto result = plan_reconfiguration(w, w);
    REQUIRE(result.plan.has_value());
    CHECK(result.plan->actions.empty());
    CHECK(validate_plan(w, *result.plan, w).valid);
}

TEST_CASE("plans for larger random instances validate") {
    // Soundness only: up to 8 modules in a 3x3x2 block, bounded budget.
    std::mt19937_64 rng(4242);
    const Region region{{0, 0, 0}, {2, 2, 1}};
    const auto cells = instances::cells_of(region);
    std::size_t found = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 5);
        std::vector<Module> prototypes;
        for (std::size_t i = 0; i < n; ++i) {
            prototypes.push_back(trial % 2 == 0 || i == 0 ? instances::uniform_module(i, FaceKind::Active, true)
                                                          : instances::mixed_module(i, true, rng));
        }
        const Cell anchor = cells[static_cast<std::size_t>(trial) % cells.size()];
        const World start = instances::grow(region, anchor, prototypes, false, rng);
        const World goal = instances::grow(region, anchor, prototypes, true, rng);
        if (start.modules().size() != n || goal.modules().size() != n) continue;
        PlannerOptions opts;
        opts.budget = 3000;
        opts.region = region;
        opts.power_actions = false;
        const auto result = plan_reconfiguration(start, goal, opts);
        if (!result.plan) continue;
        ++found;
        const auto v = validate_plan(start, *result.plan, goal);
        CHECK(v.valid);
    }
    CHECK(found > 0);
}
