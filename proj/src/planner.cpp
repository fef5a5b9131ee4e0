#include "latticelink/planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_set>

namespace latticelink {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using FaceSlot = std::pair<Cell, Direction>;

std::string shape_signature(const Module& m, GoalMatch match) {
    std::string sig;
    for (auto d : kAllDirections) sig += to_string(m.face_toward(d).kind()).front();
    if (match == GoalMatch::ExactIds) sig += "#" + m.id;
    return sig;
}

std::map<Cell, std::string> cell_signatures(const World& w, GoalMatch match) {
    std::map<Cell, std::string> out;
    for (const auto& [id, m] : w.modules()) out.emplace(m.position, shape_signature(m, match));
    return out;
}

std::set<std::pair<FaceSlot, FaceSlot>> joint_slots(const World& w) {
    std::set<std::pair<FaceSlot, FaceSlot>> out;
    for (const auto& j : w.joints()) {
        if (!j.locked) continue;
        const Module& a = *w.find(j.male_side.module);
        const Module& b = *w.find(j.female_side.module);
        FaceSlot sa{a.position, a.orientation.to_world(j.male_side.face)};
        FaceSlot sb{b.position, b.orientation.to_world(j.female_side.face)};
        if (sb < sa) std::swap(sa, sb);
        out.emplace(sa, sb);
    }
    return out;
}

template <class Set>
std::size_t symmetric_difference_size(const Set& a, const Set& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x) ? 0 : 1;
    for (const auto& x : b) n += a.count(x) ? 0 : 1;
    return n;
}

}  // namespace

std::string describe(const Action& action) {
    return std::visit(Overloaded{
                          [](const Couple& a) { return "couple " + a.initiator.str() + " " + a.target.str(); },
                          [](const DecoupleFemale& a) { return "decouple-female " + a.female.str(); },
                          [](const DecoupleMale& a) { return "decouple-male " + a.male.str(); },
                          [](const SetPower& a) { return "set-power " + a.module + (a.on ? " on" : " off"); },
                          [](const Slide& a) { return "slide " + a.module + " " + std::string(to_string(a.direction)); },
                      },
                      action);
}

Status execute(World& world, const Action& action, const Misalignment& residual) {
    return std::visit(Overloaded{
                          [&](const Slide& a) { return world.slide_module(a.module, a.direction); },
                          [&](const Couple& a) -> Status {
                              auto j = world.couple(a.initiator, a.target, residual);
                              if (!j) return j.failure();
                              return ok_status();
                          },
                          [&](const DecoupleMale& a) { return world.decouple_from_male(a.male); },
                          [&](const DecoupleFemale& a) { return world.decouple_from_female(a.female); },
                          [&](const SetPower& a) { return world.set_power(a.module, a.on); },
                      },
                      action);
}

bool goal_reached(const World& world, const World& goal, GoalMatch match) {
    return world.modules().size() == goal.modules().size() &&
           cell_signatures(world, match) == cell_signatures(goal, match) &&
           joint_slots(world) == joint_slots(goal) && world.connectivity_check().ok;
}

std::size_t goal_mismatch(const World& world, const World& goal, GoalMatch match) {
    const auto have = cell_signatures(world, match);
    const auto want = cell_signatures(goal, match);
    std::size_t cells = 0;
    for (const auto& [cell, sig] : want) {
        auto it = have.find(cell);
        if (it == have.end() || it->second != sig) ++cells;
    }
    for (const auto& [cell, sig] : have) cells += want.count(cell) ? 0 : 1;
    return cells + symmetric_difference_size(joint_slots(world), joint_slots(goal));
}

PlanValidation validate_plan(const World& start, const Plan& plan, const World& goal, GoalMatch match) {
    World world = start;
    world.trace().set_recording(false);
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        auto status = execute(world, plan.actions[i]);
        if (!status) return PlanValidation::invalid_at(i, status.failure());
        const auto floating = world.floating_assemblies();
        if (!floating.empty()) {
            return PlanValidation::invalid_at(i, Failure{Errc::FloatingStructure, floating.front()});
        }
        if (i < plan.step_hashes.size() && plan.step_hashes[i] != world.state_hash()) {
            return PlanValidation::invalid_at(i, Failure{Errc::HashMismatch, describe(plan.actions[i])});
        }
    }
    if (!goal_reached(world, goal, match)) {
        return PlanValidation::invalid_at(plan.actions.size(), Failure{Errc::GoalMismatch, "final world"});
    }
    return PlanValidation::ok();
}

Region bounding_region(const World& a, const World& b, int margin) {
    Region r{{0, 0, 0}, {0, 0, 0}};
    bool first = true;
    for (const World* w : {&a, &b}) {
        for (const auto& [id, m] : w->modules()) {
            const Cell c = m.position;
            if (first) {
                r = {c, c};
                first = false;
            }
            r.lo = {std::min(r.lo.x, c.x), std::min(r.lo.y, c.y), std::min(r.lo.z, c.z)};
            r.hi = {std::max(r.hi.x, c.x), std::max(r.hi.y, c.y), std::max(r.hi.z, c.z)};
        }
    }
    r.lo = r.lo - Vec3i{margin, margin, margin};
    r.hi = r.hi + Vec3i{margin, margin, margin};
    return r;
}

std::vector<Action> candidate_actions(const World& world, bool power_actions) {
    std::vector<Action> out;
    for (const auto& [id, m] : world.modules()) {
        if (!m.anchored && !world.has_joints(id)) {
            for (auto d : kAllDirections) out.push_back(Slide{id, d});
        }
        for (auto d : kAllDirections) {
            const FaceAddress self{id, d};
            const FaceInterface& f = m.face(d);
            if (const Joint* j = world.joint_at(self)) {
                if (j->male_side == self) out.push_back(DecoupleMale{self});
                if (j->female_side == self && f.is_active()) out.push_back(DecoupleFemale{self});
                continue;
            }
            if (!f.is_active() || f.connector().state != ConnectorState::FemaleLock) continue;
            if (auto target = world.facing(self)) {
                const FaceInterface* t = world.face(*target);
                if (t && t->kind() != FaceKind::Blank && !world.joint_at(*target)) {
                    out.push_back(Couple{self, *target});
                }
            }
        }
        if (power_actions) out.push_back(SetPower{id, !m.powered});
    }
    std::sort(out.begin(), out.end(),
              [](const Action& a, const Action& b) { return describe(a) < describe(b); });
    return out;
}

PlanSearchResult plan_reconfiguration(const World& start, const World& goal, const PlannerOptions& options) {
    PlanSearchResult result;
    World root = start;
    root.trace().set_recording(false);
    if (goal_reached(root, goal, options.match)) {
        result.plan = Plan{};
        return result;
    }
    if (!goal.connectivity_check().ok || goal.modules().size() != start.modules().size()) {
        result.exhausted = true;
        return result;
    }
    const Region region = options.region.value_or(bounding_region(start, goal, options.region_margin));

    struct Node {
        World world;
        std::size_t parent;
        std::optional<Action> action;
        std::size_t depth;
    };
    std::vector<Node> nodes;
    nodes.push_back({root, 0, std::nullopt, 0});

    using Entry = std::tuple<std::size_t, std::size_t, std::size_t>;  // f, h, node index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    open.emplace(goal_mismatch(root, goal, options.match), goal_mismatch(root, goal, options.match), 0);
    std::unordered_set<std::string> seen{root.canonical_key()};

    auto build_plan = [&](std::size_t index) {
        Plan plan;
        for (std::size_t i = index; i != 0; i = nodes[i].parent) plan.actions.push_back(*nodes[i].action);
        std::reverse(plan.actions.begin(), plan.actions.end());
        World replay = root;
        for (const auto& a : plan.actions) {
            execute(replay, a);
            plan.step_hashes.push_back(replay.state_hash());
        }
        return plan;
    };

    while (!open.empty() && result.expanded < options.budget) {
        const auto [f, h, index] = open.top();
        open.pop();
        ++result.expanded;
        const World current = nodes[index].world;
        const std::size_t depth = nodes[index].depth;

        for (const auto& action : candidate_actions(current, options.power_actions)) {
            World next = current;
            if (!execute(next, action)) continue;
            if (const auto* slide = std::get_if<Slide>(&action)) {
                if (!region.contains(next.find(slide->module)->position)) continue;
            }
            if (!next.floating_assemblies().empty()) continue;
            if (!seen.insert(next.canonical_key()).second) continue;

            const std::size_t child_h = goal_mismatch(next, goal, options.match);
            nodes.push_back({std::move(next), index, action, depth + 1});
            const std::size_t child = nodes.size() - 1;
            if (goal_reached(nodes[child].world, goal, options.match)) {
                result.plan = build_plan(child);
                return result;
            }
            open.emplace(depth + 1 + child_h, child_h, child);
        }
    }
    result.exhausted = open.empty();
    return result;
}

}  // namespace latticelink
