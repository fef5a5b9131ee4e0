#include "latticelink/runner.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

namespace latticelink {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void emit_files(const Trace& trace, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream jsonl(dir / "trace.jsonl");
    write_trace_jsonl(trace, jsonl);
    std::ofstream csv(dir / "series.csv");
    write_series_csv(trace, csv);
}

}  // namespace

double unit_symmetric(std::uint64_t bits) {
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
}

json event_to_json(const Event& e) {
    json j{{"tick", e.tick}, {"t", e.time_s}, {"subject", e.subject}, {"kind", std::string(to_string(e.kind))}};
    std::visit(Overloaded{
                   [&](const StateChange& c) {
                       j["from"] = std::string(to_string(c.from));
                       j["to"] = std::string(to_string(c.to));
                       j["cause"] = std::string(to_string(c.cause));
                   },
                   [&](const CurrentSample& s) {
                       j["state"] = std::string(to_string(s.state));
                       j["angle_deg"] = s.angle_deg;
                       j["current_ma"] = s.current_ma;
                       j["limit_ma"] = s.current_limit_ma;
                   },
                   [&](const Note& n) {
                       if (e.kind == EventKind::Error) {
                           j["code"] = n.tag;
                       } else if (e.kind == EventKind::JointEvent) {
                           j["event"] = n.tag;
                       }
                       j["detail"] = n.text;
                   },
               },
               e.payload);
    return j;
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
    for (const auto& e : trace.events()) out << event_to_json(e).dump() << '\n';
}

void write_series_csv(const Trace& trace, std::ostream& out) {
    out << "time_s,tick,connector,state,angle_deg,current_ma,limit_ma\n";
    char buf[256];
    for (const auto& e : trace.events()) {
        if (e.kind != EventKind::CurrentSample) continue;
        const auto& s = std::get<CurrentSample>(e.payload);
        std::snprintf(buf, sizeof buf, "%.4f,%lld,%s,%s,%.4f,%.3f,%.1f\n", e.time_s, static_cast<long long>(e.tick),
                      e.subject.c_str(), std::string(to_string(s.state)).c_str(), s.angle_deg, s.current_ma,
                      s.current_limit_ma);
        out << buf;
    }
}

RunReport run_scenario(Scenario scenario, const RunOptions& options) {
    RunReport report;
    report.world = std::move(scenario.world);
    World& world = report.world;
    std::mt19937_64 rng(options.seed.value_or(scenario.seed));

    auto residual_for = [&](const ScriptStep& step) {
        if (step.misalignment) return *step.misalignment;
        const auto& policy = scenario.misalignment;
        if (policy.mode == MisalignmentPolicy::Mode::Fixed) return policy.fixed;
        Misalignment m;
        m.dx_mm = policy.envelope.dx_mm * unit_symmetric(rng());
        m.dy_mm = policy.envelope.dy_mm * unit_symmetric(rng());
        m.dyaw_deg = policy.envelope.dyaw_deg * unit_symmetric(rng());
        return m;
    };

    for (const auto& step : scenario.script) {
        ++report.steps;
        const std::string where = "step " + std::to_string(report.steps);
        std::visit(Overloaded{
                       [&](const Action& action) {
                           const Misalignment residual = residual_for(step);
                           if (const auto* c = std::get_if<Couple>(&action)) {
                               char buf[128];
                               std::snprintf(buf, sizeof buf, "dx_mm=%.6f dy_mm=%.6f dyaw_deg=%.6f", residual.dx_mm,
                                             residual.dy_mm, residual.dyaw_deg);
                               world.trace().joint_event(c->initiator.str(), "residual", buf);
                           }
                           const auto status = execute(world, action, residual);
                           if (status && step.expect) {
                               report.diagnostics.push_back(where + ": expected " +
                                                            std::string(to_string(*step.expect)) + ", succeeded");
                           } else if (!status && (!step.expect || *step.expect != status.code())) {
                               report.diagnostics.push_back(where + " (" + describe(action) +
                                                            "): " + status.failure().message());
                           }
                       },
                       [&](const LoadStep& l) {
                           const auto verdict = world.check_load(l.face, l.load);
                           if (!verdict) {
                               report.diagnostics.push_back(where + " (load): " + verdict.failure().message());
                               world.trace().error(l.face.str(), std::string(to_string(verdict.code())));
                               return;
                           }
                           std::string text = verdict->holds ? "holds" : "fails on";
                           for (auto axis : verdict->failed_axes) text += " " + std::string(to_string(axis));
                           world.trace().joint_event(l.face.str(), "load", text);
                           const bool expected = l.expect_holds.value_or(true);
                           if (verdict->holds != expected) {
                               report.diagnostics.push_back(where + " (load on " + l.face.str() + "): " + text);
                           }
                       },
                       [&](const FailStep& f) {
                           const auto status = world.set_failed(f.module, f.failed);
                           if (!status) {
                               report.diagnostics.push_back(where + ": " + status.failure().message());
                           } else {
                               world.trace().action(f.module, f.failed ? "inject failure" : "clear failure");
                           }
                       },
                   },
                   step.op);
    }

    for (const auto& problem : world.audit()) report.diagnostics.push_back("invariant: " + problem);
    report.exit_code = report.diagnostics.empty() ? kExitOk : kExitFailure;
    if (options.out_dir) emit_files(world.trace(), *options.out_dir);
    return report;
}

RunReport run_scenario_file(const std::filesystem::path& path, const RunOptions& options) {
    Scenario scenario;
    try {
        scenario = load_scenario(path, options.overrides);
    } catch (const ScenarioError& e) {
        RunReport report;
        report.exit_code = kExitInputError;
        report.diagnostics.push_back(path.string() + ": " + e.what());
        return report;
    }
    return run_scenario(std::move(scenario), options);
}

}  // namespace latticelink
