#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "latticelink/runner.hpp"
#include "latticelink/scenario.hpp"

using namespace latticelink;
namespace fs = std::filesystem;

namespace {

using S = ConnectorState;

fs::path scenario_path(const std::string& name) { return fs::path(LATTICELINK_SCENARIO_DIR) / (name + ".json"); }

RunReport run(const std::string& name, RunOptions opts = {}) { return run_scenario_file(scenario_path(name), opts); }

double peak_current(const Trace& trace) {
    double peak = 0.0;
    for (const auto& e : trace.events()) {
        if (e.kind == EventKind::CurrentSample) peak = std::max(peak, std::get<CurrentSample>(e.payload).current_ma);
    }
    return peak;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("latticelink_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("bundled scenarios round-trip through JSON") {
    for (const auto& entry : fs::directory_iterator(LATTICELINK_SCENARIO_DIR)) {
        CAPTURE(entry.path().string());
        const auto scenario = load_scenario(entry.path());
        const auto once = scenario_to_json(scenario);
        const auto twice = scenario_to_json(scenario_from_json(once));
        CHECK(once == twice);
    }
}

TEST_CASE("plan JSON round-trip") {
    Plan plan{{Slide{"B", Direction::NegY}, Couple{{"A", Direction::PosX}, {"B", Direction::NegX}},
               DecoupleMale{{"A", Direction::PosX}}, DecoupleFemale{{"B", Direction::NegX}}, SetPower{"B", false}},
              {1, 0xffffffffffffffffULL, 3, 4, 5}};
    const auto j = plan_to_json(plan);
    const Plan back = plan_from_json(j);
    CHECK(back.step_hashes == plan.step_hashes);
    REQUIRE(back.actions.size() == plan.actions.size());
    for (std::size_t i = 0; i < plan.actions.size(); ++i) CHECK(describe(back.actions[i]) == describe(plan.actions[i]));
    CHECK(plan_to_json(back) == j);
}

TEST_CASE("coupling scenario drives only the initiator") {
    const auto r = run("fig4_coupling");
    CHECK(r.exit_code == kExitOk);
    CHECK(state_history(r.world.trace(), "A:+X") ==
          std::vector<S>{S::FemaleLock, S::FemaleUnlock, S::MaleUnlock, S::MaleLock});
    CHECK(state_changes(r.world.trace(), "B:-X").empty());
    CHECK(r.world.joints().size() == 1);
}

TEST_CASE("male-side decoupling scenario") {
    const auto r = run("fig4_decouple_male");
    CHECK(r.exit_code == kExitOk);
    CHECK(state_history(r.world.trace(), "A:+X") ==
          std::vector<S>{S::MaleLock, S::MaleUnlock, S::FemaleUnlock, S::FemaleLock});
    CHECK(state_changes(r.world.trace(), "B:-X").empty());
    CHECK(r.world.joints().empty());
}

TEST_CASE("female-side decoupling scenario") {
    const auto r = run("fig4_decouple_female");
    CHECK(r.exit_code == kExitOk);
    CHECK(state_history(r.world.trace(), "B:-X") ==
          std::vector<S>{S::FemaleLock, S::FemaleUnlock, S::MaleUnlock, S::MaleLock, S::MaleUnlock, S::FemaleUnlock,
                         S::FemaleLock});
    const auto changes = state_changes(r.world.trace(), "A:+X");
    CHECK(state_history(r.world.trace(), "A:+X") ==
          std::vector<S>{S::MaleLock, S::MaleUnlock, S::FemaleUnlock, S::FemaleLock});
    for (const auto& c : changes) CHECK(c.cause == DriveCause::BackDriven);
    CHECK(r.world.joints().empty());
}

TEST_CASE("blocked coupling hits the ceiling and retracts; aligned coupling does not") {
    const auto blocked = run("fig6_blocked");
    CHECK(blocked.exit_code == kExitOk);  // the failure is expected by the script
    CHECK(peak_current(blocked.world.trace()) == 150.0);
    CHECK(blocked.world.find("A")->face(Direction::PosX).connector().state == S::FemaleLock);
    CHECK(blocked.world.joints().empty());

    const auto ok = run("fig6_success");
    CHECK(ok.exit_code == kExitOk);
    CHECK(peak_current(ok.world.trace()) < 150.0);
    CHECK(ok.world.joints().size() == 1);
}

TEST_CASE("load scenario and empty script") {
    CHECK(run("load_test").exit_code == kExitOk);
    const auto empty = run("empty");
    CHECK(empty.exit_code == kExitOk);
    CHECK(empty.steps == 0);
    for (const auto& e : empty.world.trace().events()) CHECK(e.kind != EventKind::Action);
}

TEST_CASE("every final joint has a creation event") {
    for (const char* name : {"fig4_coupling", "fig6_success", "random_misalignment", "load_test",
                             "fault_removal_start", "fig4_decouple_female"}) {
        CAPTURE(name);
        const auto r = run(name);
        for (const auto& j : r.world.joints()) {
            bool created = false;
            for (const auto& e : r.world.trace().events()) {
                if (e.kind != EventKind::JointEvent || e.subject != j.male_side.str()) continue;
                created = created || std::get<Note>(e.payload).tag == "created";
            }
            CHECK(created);
        }
    }
}

TEST_CASE("unexpected outcomes give exit code 1") {
    auto scenario = load_scenario(scenario_path("fig6_blocked"));
    scenario.script.front().expect.reset();
    CHECK(run_scenario(scenario).exit_code == kExitFailure);

    auto wrong = load_scenario(scenario_path("fig6_success"));
    wrong.script.front().expect = Errc::Misaligned;
    CHECK(run_scenario(wrong).exit_code == kExitFailure);
}

TEST_CASE("input errors give exit code 2") {
    const auto dir = scratch_dir("bad_input");
    {
        std::ofstream(dir / "broken.json") << "{ not json";
        std::ofstream(dir / "schema.json") << R"({"schema": "something.else", "version": 1})";
        std::ofstream(dir / "action.json")
            << R"({"schema": "latticelink.scenario", "version": 1, "world": {"modules": []},
                  "script": [{"action": "teleport"}]})";
    }
    for (const char* name : {"broken.json", "schema.json", "action.json", "missing.json"}) {
        CAPTURE(name);
        const auto r = run_scenario_file(dir / name);
        CHECK(r.exit_code == kExitInputError);
        CHECK_FALSE(r.diagnostics.empty());
    }
}

TEST_CASE("runs are deterministic and write trace files") {
    const auto d1 = scratch_dir("det1");
    const auto d2 = scratch_dir("det2");
    RunOptions o1{d1, std::nullopt, {}};
    RunOptions o2{d2, std::nullopt, {}};
    CHECK(run("random_misalignment", o1).exit_code == kExitOk);
    CHECK(run("random_misalignment", o2).exit_code == kExitOk);
    CHECK(slurp(d1 / "trace.jsonl") == slurp(d2 / "trace.jsonl"));
    CHECK(slurp(d1 / "series.csv") == slurp(d2 / "series.csv"));
    CHECK(slurp(d1 / "series.csv").rfind("time_s,tick,connector,state,angle_deg,current_ma,limit_ma\n", 0) == 0);

    const auto d3 = scratch_dir("det3");
    RunOptions o3{d3, 7, {}};
    run("random_misalignment", o3);
    CHECK(slurp(d1 / "trace.jsonl") != slurp(d3 / "trace.jsonl"));
}

TEST_CASE("trace is complete: state changes chain up to the final states") {
    for (const char* name : {"fig4_coupling", "fig4_decouple_male", "fig4_decouple_female", "fig6_blocked",
                             "random_misalignment"}) {
        CAPTURE(name);
        const auto r = run(name);
        std::int64_t last_tick = 0;
        for (const auto& e : r.world.trace().events()) {
            CHECK(e.tick >= last_tick);
            last_tick = e.tick;
        }
        for (const auto& [id, m] : r.world.modules()) {
            for (auto d : kAllDirections) {
                if (!m.face(d).is_active()) continue;
                const std::string subject = FaceAddress{id, d}.str();
                const auto changes = state_changes(r.world.trace(), subject);
                for (std::size_t i = 1; i < changes.size(); ++i) CHECK(changes[i].from == changes[i - 1].to);
                for (const auto& c : changes) CHECK(are_adjacent(c.from, c.to));
                if (!changes.empty()) CHECK(changes.back().to == m.face(d).connector().state);
            }
        }
    }
}

TEST_CASE("config overrides") {
    const auto slow = run("fig4_coupling");
    const auto fast = run("fig4_coupling", RunOptions{std::nullopt, std::nullopt, {"servo.stage_delay_s=0"}});
    CHECK(fast.exit_code == kExitOk);
    CHECK(fast.world.trace().tick() < slow.world.trace().tick());

    WorldConfig cfg;
    apply_override(cfg, "load.axial_n=100");
    CHECK(cfg.load.axial_n == 100.0);
    CHECK_THROWS_AS(apply_override(cfg, "load.nonsense=1"), ScenarioError);
    CHECK_THROWS_AS(apply_override(cfg, "novalue"), ScenarioError);
    const auto bad = run("fig4_coupling", RunOptions{std::nullopt, std::nullopt, {"servo.speed_deg_s=-1"}});
    CHECK(bad.exit_code == kExitInputError);
}
