// Python bindings. Failures of physical operations come back as the error
// code name (None on success); malformed input raises ValueError.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "latticelink/planner.hpp"
#include "latticelink/runner.hpp"
#include "latticelink/scenario.hpp"

namespace py = pybind11;
namespace ll = latticelink;

namespace {

using MaybeCode = std::optional<std::string>;

MaybeCode code_of(const ll::Status& s) {
    if (s) return std::nullopt;
    return std::string(ll::to_string(s.code()));
}

ll::FaceAddress face(const std::string& text) {
    auto f = ll::parse_face_address(text);
    if (!f) throw py::value_error("bad face address: " + text);
    return *f;
}

ll::Direction direction(const std::string& text) {
    auto d = ll::parse_direction(text);
    if (!d) throw py::value_error("bad direction: " + text);
    return *d;
}

ll::World load_world(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    try {
        return ll::load_scenario(path, overrides).world;
    } catch (const ll::ScenarioError& e) {
        throw py::value_error(e.what());
    }
}

ll::Plan parse_plan(const std::string& text) {
    try {
        return ll::plan_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw py::value_error(e.what());
    } catch (const ll::ScenarioError& e) {
        throw py::value_error(e.what());
    }
}

ll::GoalMatch match(bool exact_ids) { return exact_ids ? ll::GoalMatch::ExactIds : ll::GoalMatch::ShapeOnly; }

py::dict module_dict(const ll::Module& m) {
    py::dict d;
    d["id"] = m.id;
    d["position"] = py::make_tuple(m.position.x, m.position.y, m.position.z);
    d["orientation"] = m.orientation.index();
    d["powered"] = m.powered;
    d["anchored"] = m.anchored;
    d["failed"] = m.failed;
    return d;
}

py::dict validation_dict(const ll::PlanValidation& v) {
    py::dict d;
    d["valid"] = v.valid;
    d["step"] = v.step;
    d["code"] = v.reason ? py::cast(std::string(ll::to_string(v.reason->code))) : py::none();
    d["message"] = v.reason ? py::cast(v.reason->message()) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lattice modular-robot coupling simulator and reconfiguration planner";

    py::class_<ll::World>(m, "World")
        .def(py::init<>())
        .def_static("from_file", &load_world, py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
                    "Load the world section of a scenario file.")
        .def_static(
            "from_json",
            [](const std::string& text) {
                try {
                    return ll::world_from_json(nlohmann::json::parse(text), {});
                } catch (const std::exception& e) {
                    throw py::value_error(e.what());
                }
            },
            py::arg("text"))
        .def("to_json", [](const ll::World& w) { return ll::world_to_json(w).dump(); })
        .def("modules",
             [](const ll::World& w) {
                 py::list out;
                 for (const auto& [id, mod] : w.modules()) out.append(module_dict(mod));
                 return out;
             })
        .def("joints",
             [](const ll::World& w) {
                 std::vector<std::pair<std::string, std::string>> out;
                 for (const auto& j : w.joints()) out.emplace_back(j.male_side.str(), j.female_side.str());
                 return out;
             },
             "(male face, female face) pairs")
        .def("connector_state",
             [](const ll::World& w, const std::string& f) -> MaybeCode {
                 const auto* iface = w.face(face(f));
                 if (!iface || !iface->is_active()) return std::nullopt;
                 return std::string(ll::to_string(iface->connector().state));
             },
             py::arg("face"), "State of an active face, None for passive or blank faces.")
        .def("slide",
             [](ll::World& w, const std::string& id, const std::string& dir) {
                 return code_of(w.slide_module(id, direction(dir)));
             },
             py::arg("module"), py::arg("direction"))
        .def("can_slide",
             [](const ll::World& w, const std::string& id, const std::string& dir) {
                 const auto r = w.can_slide(id, direction(dir));
                 if (!r) throw py::value_error(r.failure().message());
                 return *r;
             },
             py::arg("module"), py::arg("direction"))
        .def("couple",
             [](ll::World& w, const std::string& initiator, const std::string& target, double dx, double dy,
                double dyaw) {
                 const auto r = w.couple(face(initiator), face(target), ll::Misalignment{dx, dy, dyaw});
                 return r ? MaybeCode{} : MaybeCode{std::string(ll::to_string(r.code()))};
             },
             py::arg("initiator"), py::arg("target"), py::arg("dx_mm") = 0.0, py::arg("dy_mm") = 0.0,
             py::arg("dyaw_deg") = 0.0)
        .def("decouple_from_male",
             [](ll::World& w, const std::string& f) { return code_of(w.decouple_from_male(face(f))); },
             py::arg("male_face"))
        .def("decouple_from_female",
             [](ll::World& w, const std::string& f) { return code_of(w.decouple_from_female(face(f))); },
             py::arg("female_face"))
        .def("set_power", [](ll::World& w, const std::string& id, bool on) { return code_of(w.set_power(id, on)); },
             py::arg("module"), py::arg("on"))
        .def("set_failed",
             [](ll::World& w, const std::string& id, bool failed) { return code_of(w.set_failed(id, failed)); },
             py::arg("module"), py::arg("failed") = true)
        .def("check_load",
             [](const ll::World& w, const std::string& f, double shear_x, double shear_y, double axial) {
                 const auto v = w.check_load(face(f), {shear_x, shear_y, axial});
                 if (!v) throw py::value_error(v.failure().message());
                 return v->holds;
             },
             py::arg("face"), py::arg("shear_x_n") = 0.0, py::arg("shear_y_n") = 0.0, py::arg("axial_n") = 0.0,
             "True when the joint holds; positive axial is tension.")
        .def("energized",
             [](const ll::World& w) {
                 const auto s = w.propagate_power();
                 return std::vector<std::string>(s.begin(), s.end());
             })
        .def("floating", [](const ll::World& w) { return w.connectivity_check().floating; },
             "Modules not connected to an anchor.")
        .def("audit", &ll::World::audit)
        .def("state_hash", &ll::World::state_hash)
        .def("state_history",
             [](const ll::World& w, const std::string& subject) {
                 std::vector<std::string> out;
                 for (auto s : ll::state_history(w.trace(), subject)) out.emplace_back(ll::to_string(s));
                 return out;
             },
             py::arg("subject"))
        .def("trace_jsonl",
             [](const ll::World& w) {
                 std::ostringstream os;
                 ll::write_trace_jsonl(w.trace(), os);
                 return os.str();
             })
        .def("copy", [](const ll::World& w) { return ll::World(w); });

    m.def(
        "run_scenario",
        [](const std::filesystem::path& path, std::optional<std::filesystem::path> out_dir,
           std::optional<std::uint64_t> seed, std::vector<std::string> overrides) {
            ll::RunOptions options{std::move(out_dir), seed, std::move(overrides)};
            auto report = ll::run_scenario_file(path, options);
            py::dict d;
            d["exit_code"] = report.exit_code;
            d["steps"] = report.steps;
            d["diagnostics"] = report.diagnostics;
            d["world"] = std::move(report.world);
            return d;
        },
        py::arg("path"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
        py::arg("overrides") = std::vector<std::string>{},
        "Run a scenario file. Exit codes: 0 ok, 1 unexpected outcome, 2 input error.");

    m.def(
        "plan",
        [](const ll::World& start, const ll::World& goal, std::size_t budget, bool exact_ids, bool power_actions,
           int margin) {
            ll::PlannerOptions options;
            options.budget = budget;
            options.match = match(exact_ids);
            options.power_actions = power_actions;
            options.region_margin = margin;
            const auto r = ll::plan_reconfiguration(start, goal, options);
            py::dict d;
            d["found"] = r.plan.has_value();
            d["expanded"] = r.expanded;
            d["exhausted"] = r.exhausted;
            if (r.plan) {
                std::vector<std::string> steps;
                for (const auto& a : r.plan->actions) steps.push_back(ll::describe(a));
                d["actions"] = steps;
                d["plan_json"] = ll::plan_to_json(*r.plan).dump();
            } else {
                d["actions"] = py::none();
                d["plan_json"] = py::none();
            }
            return d;
        },
        py::arg("start"), py::arg("goal"), py::arg("budget") = 200000, py::arg("exact_ids") = false,
        py::arg("power_actions") = true, py::arg("margin") = 1);

    m.def(
        "validate_plan",
        [](const ll::World& start, const std::string& plan_json, const ll::World& goal, bool exact_ids) {
            return validation_dict(ll::validate_plan(start, parse_plan(plan_json), goal, match(exact_ids)));
        },
        py::arg("start"), py::arg("plan_json"), py::arg("goal"), py::arg("exact_ids") = false);

    m.def(
        "check_alignment",
        [](double dx, double dy, double dyaw) { return ll::check_alignment({dx, dy, dyaw}); }, py::arg("dx_mm"),
        py::arg("dy_mm"), py::arg("dyaw_deg"), "Whether a residual misalignment is within coupling tolerance.");

    m.attr("__version__") = "0.1.0";
}
