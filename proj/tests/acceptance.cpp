// Acceptance checks: one PASS/FAIL line per criterion, exit code 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "instances.hpp"
#include "latticelink/planner.hpp"
#include "latticelink/runner.hpp"
#include "oracles.hpp"

using namespace latticelink;

namespace {

using S = ConnectorState;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
    void require(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

FaceAddress fa(const std::string& m, Direction d) { return {m, d}; }

std::string scenario(const std::string& name) { return std::string(LATTICELINK_SCENARIO_DIR) + "/" + name + ".json"; }

double peak_current(const Trace& trace) {
    double peak = 0.0;
    for (const auto& e : trace.events()) {
        if (e.kind == EventKind::CurrentSample) peak = std::max(peak, std::get<CurrentSample>(e.payload).current_ma);
    }
    return peak;
}

World pair_world(FaceKind kind_b, bool b_powered, bool recording = true) {
    World w;
    w.trace().set_recording(recording);
    auto a = make_module("A", {0, 0, 0});
    a.anchored = true;
    w.place_module(a);
    auto b = make_module("B", {1, 0, 0}, kind_b);
    b.powered = b_powered;
    w.place_module(b);
    return w;
}

Outcome criterion1() {
    Outcome o;
    const auto start = Clock::now();
    {
        const auto r = run_scenario_file(scenario("fig4_coupling"));
        o.require(r.exit_code == kExitOk, "coupling scenario exit code");
        o.require(state_history(r.world.trace(), "A:+X") ==
                      std::vector<S>{S::FemaleLock, S::FemaleUnlock, S::MaleUnlock, S::MaleLock},
                  "coupling sequence on the initiator");
        o.require(state_changes(r.world.trace(), "B:-X").empty(), "coupling moved the target");
    }
    {
        const auto r = run_scenario_file(scenario("fig4_decouple_male"));
        o.require(r.exit_code == kExitOk, "male decoupling exit code");
        o.require(state_history(r.world.trace(), "A:+X") ==
                      std::vector<S>{S::MaleLock, S::MaleUnlock, S::FemaleUnlock, S::FemaleLock},
                  "male decoupling sequence");
        o.require(state_changes(r.world.trace(), "B:-X").empty(), "male decoupling moved the female side");
    }
    {
        const auto r = run_scenario_file(scenario("fig4_decouple_female"));
        o.require(r.exit_code == kExitOk, "female decoupling exit code");
        o.require(state_history(r.world.trace(), "B:-X") ==
                      std::vector<S>{S::FemaleLock, S::FemaleUnlock, S::MaleUnlock, S::MaleLock, S::MaleUnlock,
                                     S::FemaleUnlock, S::FemaleLock},
                  "seven-stage female decoupling");
        o.require(state_history(r.world.trace(), "A:+X") ==
                      std::vector<S>{S::MaleLock, S::MaleUnlock, S::FemaleUnlock, S::FemaleLock},
                  "uncontrolled side sequence");
        for (const auto& c : state_changes(r.world.trace(), "A:+X")) {
            o.require(c.cause == DriveCause::BackDriven, "uncontrolled side moved other than by back-drive");
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    o.require(secs < 1.0, "runtime over 1 s");
    if (o.pass) o.detail = "three sequences exact, " + std::to_string(secs) + " s";
    return o;
}

Outcome criterion2() {
    Outcome o;
    double worst = 0.0;
    std::size_t blocked_cases = 0;
    // Misaligned beyond tolerance on each axis, both signs, active and passive targets.
    for (auto kind : {FaceKind::Active, FaceKind::Passive}) {
        for (int axis = 0; axis < 3; ++axis) {
            for (double mag : {-3.0, -2.51, 2.51, 3.0, 10.0}) {
                World w = pair_world(kind, false);
                Misalignment m;
                (axis == 0 ? m.dx_mm : axis == 1 ? m.dy_mm : m.dyaw_deg) = mag;
                const auto r = w.couple(fa("A", Direction::PosX), fa("B", Direction::NegX), m);
                ++blocked_cases;
                o.require(r.code() == Errc::Misaligned, "misaligned coupling did not abort");
                const double peak = peak_current(w.trace());
                worst = std::max(worst, peak);
                o.require(peak == 150.0, "ceiling not reached exactly on a blocked attempt");
                o.require(w.find("A")->face(Direction::PosX).connector().state == S::FemaleLock, "not FemaleLock");
                o.require(w.joints().empty(), "joint left behind");
                o.require(w.audit().empty(), "invariant violated");
            }
        }
    }
    // Absent target: refused before any motion, nothing reaches the ceiling.
    {
        World w = pair_world(FaceKind::Active, true);
        const auto r = w.couple(fa("A", Direction::PosY), fa("B", Direction::PosY));
        o.require(!r.ok(), "coupling into an empty cell succeeded");
        o.require(w.joints().empty(), "joint toward empty cell");
        o.require(w.find("A")->face(Direction::PosY).connector().state == S::FemaleLock, "absent target moved");
    }
    // Successful couplings never reach the ceiling; no trace exceeds 151 mA.
    for (const char* name : {"fig4_coupling", "fig4_decouple_male", "fig4_decouple_female", "fig6_success",
                             "fig6_blocked", "random_misalignment", "load_test"}) {
        const auto r = run_scenario_file(scenario(name));
        const double peak = peak_current(r.world.trace());
        worst = std::max(worst, peak);
        const bool failed = std::string(name) == "fig6_blocked";
        o.require((peak >= 150.0) == failed, std::string("ceiling hit iff failure broken in ") + name);
    }
    o.require(worst <= 151.0, "current above 151 mA");
    if (o.pass) o.detail = std::to_string(blocked_cases) + " blocked attempts at 150 mA, max " + std::to_string(worst);
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto start = Clock::now();
    const World base = pair_world(FaceKind::Active, true, false);
    std::size_t ok_count = 0;
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j)
            for (int k = 0; k <= 10; ++k) {
                const Misalignment m{-2.5 + 0.5 * i, -2.5 + 0.5 * j, -2.5 + 0.5 * k};
                World w = base;
                const auto r = w.couple(fa("A", Direction::PosX), fa("B", Direction::NegX), m);
                if (r.ok() && w.joints().size() == 1) ++ok_count;
            }
    o.require(ok_count == 11 * 11 * 11, "a grid point inside tolerance failed");
    std::size_t rejected = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (double mag : {-2.51, 2.51}) {
            Misalignment m;
            (axis == 0 ? m.dx_mm : axis == 1 ? m.dy_mm : m.dyaw_deg) = mag;
            World w = base;
            if (w.couple(fa("A", Direction::PosX), fa("B", Direction::NegX), m).code() == Errc::Misaligned) ++rejected;
        }
    }
    o.require(rejected == 6, "2.51 accepted on some axis");
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    o.require(secs < 5.0, "runtime over 5 s");
    if (o.pass) o.detail = "1331/1331 inside, 6/6 rejected at 2.51, " + std::to_string(secs) + " s";
    return o;
}

Outcome criterion4() {
    Outcome o;
    for (auto kind : {FaceKind::Active, FaceKind::Passive}) {
        World w = pair_world(kind, true);
        if (!w.couple(fa("A", Direction::PosX), fa("B", Direction::NegX)).ok()) {
            o.fail("coupling failed");
            continue;
        }
        w.set_power("A", false);
        w.set_power("B", false);
        o.require(w.propagate_power().empty(), "modules still energized");
        const auto f = fa("B", Direction::NegX);
        o.require(!w.check_load(f, {0, 0, 129.01}).value().holds, "129.01 N axial held");
        o.require(w.check_load(f, {0, 0, 129.0}).value().holds, "129 N axial failed");
        o.require(w.check_load(f, {300.0, 0, 0}).value().holds, "300 N shear x failed");
        o.require(w.check_load(f, {0, 300.0, 0}).value().holds, "300 N shear y failed");
    }
    if (o.pass) o.detail = "129 holds, 129.01 fails, 300 shear holds, unpowered";
    return o;
}

Outcome criterion5() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> length(1, 30);
    std::uniform_int_distribution<int> which(0, 3);
    std::bernoulli_distribution coin(0.5);
    const World base = [] {
        World w = pair_world(FaceKind::Active, true, false);
        w.couple(fa("A", Direction::PosX), fa("B", Direction::NegX));
        return w;
    }();
    for (int schedule = 0; schedule < 1000 && o.pass; ++schedule) {
        World w = base;
        const int n = length(rng);
        for (int step = 0; step < n; ++step) {
            switch (which(rng)) {
                case 0: w.set_power("A", coin(rng)); break;
                case 1: w.set_power("B", coin(rng)); break;
                case 2: w.set_power("A", false), w.set_power("B", false); break;
                default: w.set_power("A", true), w.set_power("B", true); break;
            }
            o.require(w.joints().size() == 1 && w.joints().front().locked, "joint destroyed by a power toggle");
            o.require(holds_when_unpowered(w.joints().front()).ok(), "joint does not hold unpowered");
            o.require(w.find("A")->face(Direction::PosX).connector().state == S::MaleLock, "male side moved");
            o.require(w.find("B")->face(Direction::NegX).connector().state == S::FemaleLock, "female side moved");
        }
        o.require(w.audit().empty(), "invariant violated");
    }
    if (o.pass) o.detail = "1000 schedules, joint intact";
    return o;
}

Outcome criterion6() {
    Outcome o;
    const Cell centre{1, 1, 1};
    std::vector<Cell> cells = instances::cells_of({{0, 0, 0}, {2, 2, 2}});
    cells.erase(std::remove(cells.begin(), cells.end(), centre), cells.end());
    std::size_t checked = 0;
    std::size_t counterexamples = 0;
    auto verify = [&](const World& w) {
        for (auto dir : kAllDirections) {
            const bool got = w.can_slide("M", dir).value();
            // Independent rule: false iff destination occupied, mover protrudes,
            // or a protruding face points into a swept cell.
            if (got != oracle::slide_allowed(w, "M", dir)) ++counterexamples;
            ++checked;
        }
    };
    // One neighbour anywhere in the block, any face in any state, any mover face state.
    for (const Cell c : cells)
        for (auto face : kAllDirections)
            for (int s = 0; s < 4; ++s)
                for (int mover_state = 0; mover_state < 4; ++mover_state) {
                    World w;
                    auto n = make_module("N", c);
                    n.face(face).connector().state = state_at(s);
                    auto m = make_module("M", centre);
                    m.face(Direction::PosX).connector().state = state_at(mover_state);
                    w.place_module(n);
                    w.place_module(m);
                    verify(w);
                }
    // Every pair of neighbours, each with one protruding face in any direction.
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            for (auto fi : kAllDirections)
                for (auto fj : kAllDirections) {
                    World w;
                    auto a = make_module("N1", cells[i]);
                    a.face(fi).connector().state = S::MaleUnlock;
                    auto b = make_module("N2", cells[j]);
                    b.face(fj).connector().state = S::MaleLock;
                    w.place_module(a);
                    w.place_module(b);
                    w.place_module(make_module("M", centre));
                    verify(w);
                }
    o.require(counterexamples == 0, std::to_string(counterexamples) + " counterexamples");
    o.detail = std::to_string(checked) + " slide checks, " + std::to_string(counterexamples) + " counterexamples";
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto start = Clock::now();
    std::mt19937_64 rng(7);
    std::size_t total = 0;
    std::size_t solvable = 0;
    std::size_t mismatches = 0;
    std::size_t invalid = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const int count = n == 4 ? 40 : 60;
        for (int t = 0; t < count; ++t) {
            const auto inst = instances::random_instance(rng, n, t % 2 == 1);
            const bool power = t % 3 == 0;
            PlannerOptions opts;
            opts.region = inst.region;
            opts.power_actions = power;
            const auto planned = plan_reconfiguration(inst.start, inst.goal, opts);
            const auto bfs = oracle::bfs_solve(inst.start, inst.goal, inst.region, power);
            ++total;
            if (planned.plan.has_value() != bfs.solvable) ++mismatches;
            if (planned.plan) {
                ++solvable;
                if (!validate_plan(inst.start, *planned.plan, inst.goal).valid) ++invalid;
            } else if (!planned.exhausted) {
                ++mismatches;  // budget ran out: no verdict
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    o.require(mismatches == 0, std::to_string(mismatches) + " solvability mismatches");
    o.require(invalid == 0, std::to_string(invalid) + " invalid plans");
    o.require(secs < 60.0, "runtime over 60 s");
    o.detail = std::to_string(total) + " instances, " + std::to_string(solvable) + " solvable, " +
               std::to_string(mismatches) + " mismatches, " + std::to_string(secs) + " s";
    return o;
}

Outcome criterion8() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::size_t worlds = 0;
    std::size_t failures = 0;
    const Region region{{0, 0, 0}, {2, 2, 1}};
    while (worlds < 200) {
        const std::size_t n = 2 + worlds % 5;
        std::vector<Module> prototypes;
        std::vector<Orientation> orientations(n);
        std::uniform_int_distribution<int> rotation(0, Orientation::kCount - 1);
        for (std::size_t i = 0; i < n; ++i) {
            prototypes.push_back(i == 0 ? instances::uniform_module(0, FaceKind::Active, true)
                                        : instances::mixed_module(i, true, rng));
            if (i > 0) orientations[i] = *Orientation::from_index(rotation(rng));
        }
        const auto cells = instances::cells_of(region);
        const Cell anchor = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
        World w = instances::grow(region, anchor, prototypes, orientations, true, rng);
        if (w.modules().size() != n) continue;
        w.trace().set_recording(false);

        // Joints whose female side is an active, powered, healthy module.
        std::vector<Joint> eligible;
        for (const auto& j : w.joints()) {
            if (w.face(j.female_side)->is_active()) eligible.push_back(j);
        }
        if (eligible.empty()) continue;
        const Joint j = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
        switch (worlds % 3) {
            case 0: w.set_failed(j.male_side.module, true); break;
            case 1: w.set_power(j.male_side.module, false); break;
            default:
                w.set_failed(j.male_side.module, true);
                w.set_power(j.male_side.module, false);
                break;
        }
        ++worlds;
        const auto status = w.decouple_from_female(j.female_side);
        const bool gone = !w.joint_at(j.female_side) && !w.joint_at(j.male_side);
        const bool flat = w.face(j.female_side)->flat() && w.face(j.male_side)->flat();
        if (!status || !gone || !flat || !w.audit().empty()) ++failures;
    }
    o.require(failures == 0, std::to_string(failures) + " fault removals failed");

    // Active-passive round trips in every direction with residual misalignment.
    std::uniform_real_distribution<double> residual(-2.5, 2.5);
    std::size_t trips = 0;
    std::size_t trip_failures = 0;
    for (int t = 0; t < 200; ++t) {
        const Direction d = kAllDirections[static_cast<std::size_t>(t) % 6];
        World w;
        w.trace().set_recording(false);
        auto a = make_module("A", {0, 0, 0});
        a.anchored = true;
        w.place_module(a);
        w.place_module(make_module("P", normal(d), FaceKind::Passive));
        const FaceAddress active{"A", d};
        const FaceAddress passive{"P", opposite(d)};
        ++trips;
        const bool coupled = w.couple(active, passive, {residual(rng), residual(rng), residual(rng)}).ok();
        const bool released = coupled && w.decouple_from_male(active).ok();
        if (!released || !w.joints().empty() || !w.face(active)->flat() || !w.audit().empty()) ++trip_failures;
    }
    o.require(trip_failures == 0, std::to_string(trip_failures) + " active-passive round trips failed");
    o.detail = std::to_string(worlds) + " fault worlds, " + std::to_string(failures) + " failures; " +
               std::to_string(trips) + " active-passive round trips, " + std::to_string(trip_failures) + " failures";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 protocol trace reproduction", criterion1}, {"2 fail-safe", criterion2},
        {"3 misalignment gate", criterion3},           {"4 load capacities", criterion4},
        {"5 unpowered persistence", criterion5},       {"6 flat-slide soundness", criterion6},
        {"7 planner oracle equivalence", criterion7},  {"8 fault removal", criterion8},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const Outcome o = run();
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
