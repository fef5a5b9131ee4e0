#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "latticelink/world.hpp"

namespace latticelink {

struct Slide {
    std::string module;
    Direction direction = Direction::PosX;
};
struct Couple {
    FaceAddress initiator;
    FaceAddress target;
};
struct DecoupleMale {
    FaceAddress male;
};
struct DecoupleFemale {
    FaceAddress female;
};
struct SetPower {
    std::string module;
    bool on = true;
};

using Action = std::variant<Slide, Couple, DecoupleMale, DecoupleFemale, SetPower>;

/// Stable one-line text; also the lexicographic tie-break order of the search.
std::string describe(const Action& action);

Status execute(World& world, const Action& action, const Misalignment& residual = {});

struct Plan {
    std::vector<Action> actions;
    std::vector<std::uint64_t> step_hashes;  // world hash after each action; may be empty

    std::size_t cost() const { return actions.size(); }
};

enum class GoalMatch : std::uint8_t { ShapeOnly, ExactIds };

/// Occupied cells with their world-frame face kinds plus the set of joined face
/// pairs; module ids too for ExactIds. The world must also be fully anchored.
bool goal_reached(const World& world, const World& goal, GoalMatch match);

/// Goal cells not matched, extra occupied cells, and joint mismatches.
std::size_t goal_mismatch(const World& world, const World& goal, GoalMatch match);

struct PlanValidation {
    bool valid = true;
    std::size_t step = 0;  // index of the failing action; actions.size() for a goal mismatch
    std::optional<Failure> reason;

    static PlanValidation ok() { return {}; }
    static PlanValidation invalid_at(std::size_t step, Failure reason) { return {false, step, std::move(reason)}; }
};

/// Replays the plan through the world and protocol engines. No step may leave
/// an unanchored multi-module assembly behind.
PlanValidation validate_plan(const World& start, const Plan& plan, const World& goal,
                             GoalMatch match = GoalMatch::ShapeOnly);

struct Region {
    Cell lo;
    Cell hi;

    bool contains(Cell c) const {
        return c.x >= lo.x && c.y >= lo.y && c.z >= lo.z && c.x <= hi.x && c.y <= hi.y && c.z <= hi.z;
    }
};

/// Box around every occupied cell of both worlds, grown by `margin` cells.
Region bounding_region(const World& a, const World& b, int margin);

/// Actions worth trying from this world, sorted by describe(). Execution still decides feasibility.
std::vector<Action> candidate_actions(const World& world, bool power_actions);

struct PlannerOptions {
    std::size_t budget = 200000;  // node expansions
    GoalMatch match = GoalMatch::ShapeOnly;
    int region_margin = 1;
    std::optional<Region> region;
    bool power_actions = true;
};

struct PlanSearchResult {
    std::optional<Plan> plan;
    std::size_t expanded = 0;
    bool exhausted = false;  // search space emptied, so no plan exists in the region
};

/// Best-first search over world states ordered by cost-so-far plus goal
/// mismatch, ties broken by generation order.
PlanSearchResult plan_reconfiguration(const World& start, const World& goal, const PlannerOptions& options = {});

}  // namespace latticelink
