#include "latticelink/scenario.hpp"

#include <fstream>
#include <sstream>

namespace latticelink {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T get_as(const json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        fail(std::string("bad value for '") + what + "': " + e.what());
    }
}

template <class T>
void merge_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = get_as<T>(j.at(key), key);
}

FaceAddress face_from(const json& j, const char* key) {
    const auto text = get_as<std::string>(require(j, key), key);
    auto addr = parse_face_address(text);
    if (!addr) fail("bad face address '" + text + "' (expected <module>:<+X|-X|+Y|-Y|+Z|-Z>)");
    return *addr;
}

Direction direction_from(const json& j, const char* key) {
    const auto text = get_as<std::string>(require(j, key), key);
    auto d = parse_direction(text);
    if (!d) fail("bad direction '" + text + "'");
    return *d;
}

Cell cell_from(const json& j) {
    const auto v = get_as<std::vector<int>>(j, "position");
    if (v.size() != 3) fail("position must have three integers");
    return {v[0], v[1], v[2]};
}

json misalignment_to_json(const Misalignment& m) {
    return json{{"dx_mm", m.dx_mm}, {"dy_mm", m.dy_mm}, {"dyaw_deg", m.dyaw_deg}};
}

Misalignment misalignment_from_json(const json& j) {
    Misalignment m;
    merge_field(j, "dx_mm", m.dx_mm);
    merge_field(j, "dy_mm", m.dy_mm);
    merge_field(j, "dyaw_deg", m.dyaw_deg);
    return m;
}

json load_to_json(const LoadVector& l) {
    return json{{"shear_x_n", l.shear_x_n}, {"shear_y_n", l.shear_y_n}, {"axial_z_n", l.axial_z_n}};
}

json face_to_json(const FaceInterface& f) {
    json j{{"kind", std::string(to_string(f.kind()))}};
    if (f.is_active()) {
        j["state"] = std::string(to_string(f.connector().state));
        if (!f.connector().servo.torque_enabled) j["torque_enabled"] = false;
    }
    return j;
}

FaceInterface face_from_json(const json& j, const std::string& connector_id, const ServoConfig& servo) {
    const std::string kind_text = j.is_string() ? j.get<std::string>() : get_as<std::string>(require(j, "kind"), "kind");
    const auto kind = parse_face_kind(kind_text);
    if (!kind) fail("bad face kind '" + kind_text + "'");
    switch (*kind) {
        case FaceKind::Passive: return FaceInterface::passive();
        case FaceKind::Blank: return FaceInterface::blank();
        case FaceKind::Active: break;
    }
    ConnectorState state = ConnectorState::FemaleLock;
    if (j.is_object() && j.contains("state")) {
        const auto text = get_as<std::string>(j.at("state"), "state");
        auto s = parse_connector_state(text);
        if (!s) fail("bad connector state '" + text + "'");
        state = *s;
    }
    Connector c = make_connector(connector_id, servo, state);
    if (j.is_object()) merge_field(j, "torque_enabled", c.servo.torque_enabled);
    return FaceInterface::active(std::move(c));
}

void check_schema(const json& j, const char* schema, int version) {
    if (!j.is_object()) fail("top level must be an object");
    const auto name = get_as<std::string>(require(j, "schema"), "schema");
    if (name != schema) fail("schema '" + name + "' is not '" + schema + "'");
    const auto v = get_as<int>(require(j, "version"), "version");
    if (v != version) fail("unsupported " + std::string(schema) + " version " + std::to_string(v));
}

std::optional<Errc> expect_from(const json& j) {
    if (!j.contains("expect")) return std::nullopt;
    const auto text = get_as<std::string>(j.at("expect"), "expect");
    auto code = parse_errc(text);
    if (!code) fail("unknown expected failure '" + text + "'");
    return code;
}

json step_to_json(const ScriptStep& step) {
    json j = std::visit(Overloaded{
                            [](const Action& a) { return action_to_json(a); },
                            [](const LoadStep& l) {
                                json out{{"action", "load"}, {"face", l.face.str()}, {"load", load_to_json(l.load)}};
                                if (l.expect_holds) out["expect"] = *l.expect_holds ? "holds" : "fails";
                                return out;
                            },
                            [](const FailStep& f) {
                                return json{{"action", "set_failed"}, {"module", f.module}, {"failed", f.failed}};
                            },
                        },
                        step.op);
    if (step.misalignment) j["misalignment"] = misalignment_to_json(*step.misalignment);
    if (step.expect) j["expect"] = std::string(to_string(*step.expect));
    return j;
}

ScriptStep step_from_json(const json& j) {
    ScriptStep step;
    const auto kind = get_as<std::string>(require(j, "action"), "action");
    if (kind == "load") {
        LoadStep l;
        l.face = face_from(j, "face");
        const json& lj = require(j, "load");
        merge_field(lj, "shear_x_n", l.load.shear_x_n);
        merge_field(lj, "shear_y_n", l.load.shear_y_n);
        merge_field(lj, "axial_z_n", l.load.axial_z_n);
        if (j.contains("expect")) {
            const auto e = get_as<std::string>(j.at("expect"), "expect");
            if (e != "holds" && e != "fails") fail("load expect must be 'holds' or 'fails'");
            l.expect_holds = e == "holds";
        }
        step.op = l;
        return step;
    }
    if (kind == "set_failed") {
        FailStep f;
        f.module = get_as<std::string>(require(j, "module"), "module");
        merge_field(j, "failed", f.failed);
        step.op = f;
        return step;
    }
    step.op = action_from_json(j);
    if (j.contains("misalignment")) step.misalignment = misalignment_from_json(j.at("misalignment"));
    step.expect = expect_from(j);
    return step;
}

}  // namespace

json config_to_json(const WorldConfig& cfg) {
    const auto& s = cfg.servo;
    return json{
        {"servo",
         {{"angles_deg", s.angles.degrees},
          {"speed_deg_s", s.speed_deg_s},
          {"dt_s", s.dt_s},
          {"idle_current_ma", s.idle_current_ma},
          {"protrusion_current_limit_ma", s.protrusion_current_limit_ma},
          {"nominal_current_limit_ma", s.nominal_current_limit_ma},
          {"stall_window_s", s.stall_window_s},
          {"angle_tolerance_deg", s.angle_tolerance_deg},
          {"contact_fraction", s.contact_fraction},
          {"stage_delay_s", s.stage_delay_s}}},
        {"protocol",
         {{"tolerance_xy_mm", cfg.protocol.tolerance_xy_mm},
          {"tolerance_yaw_deg", cfg.protocol.tolerance_yaw_deg},
          {"passive_contacts", cfg.protocol.passive_contacts}}},
        {"load", {{"shear_n", cfg.load.shear_n}, {"axial_n", cfg.load.axial_n}}},
        {"passive_load", {{"shear_n", cfg.passive_load.shear_n}, {"axial_n", cfg.passive_load.axial_n}}},
        {"energized_can_actuate", cfg.energized_can_actuate},
    };
}

void merge_config(WorldConfig& cfg, const json& j) {
    if (!j.is_object()) fail("config must be an object");
    static const std::vector<std::string> sections{"servo", "protocol", "load", "passive_load",
                                                   "energized_can_actuate"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(sections.begin(), sections.end(), key) == sections.end()) fail("unknown config section '" + key + "'");
    }
    const json known = config_to_json(cfg);
    for (const auto& section : {"servo", "protocol", "load", "passive_load"}) {
        if (!j.contains(section)) continue;
        for (const auto& [key, value] : j.at(section).items()) {
            if (!known.at(section).contains(key)) fail(std::string("unknown config key '") + section + "." + key + "'");
        }
    }
    if (j.contains("servo")) {
        const json& s = j.at("servo");
        merge_field(s, "angles_deg", cfg.servo.angles.degrees);
        merge_field(s, "speed_deg_s", cfg.servo.speed_deg_s);
        merge_field(s, "dt_s", cfg.servo.dt_s);
        merge_field(s, "idle_current_ma", cfg.servo.idle_current_ma);
        merge_field(s, "protrusion_current_limit_ma", cfg.servo.protrusion_current_limit_ma);
        merge_field(s, "nominal_current_limit_ma", cfg.servo.nominal_current_limit_ma);
        merge_field(s, "stall_window_s", cfg.servo.stall_window_s);
        merge_field(s, "angle_tolerance_deg", cfg.servo.angle_tolerance_deg);
        merge_field(s, "contact_fraction", cfg.servo.contact_fraction);
        merge_field(s, "stage_delay_s", cfg.servo.stage_delay_s);
    }
    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        merge_field(p, "tolerance_xy_mm", cfg.protocol.tolerance_xy_mm);
        merge_field(p, "tolerance_yaw_deg", cfg.protocol.tolerance_yaw_deg);
        merge_field(p, "passive_contacts", cfg.protocol.passive_contacts);
    }
    for (auto [section, target] : {std::pair{"load", &cfg.load}, std::pair{"passive_load", &cfg.passive_load}}) {
        if (!j.contains(section)) continue;
        merge_field(j.at(section), "shear_n", target->shear_n);
        merge_field(j.at(section), "axial_n", target->axial_n);
    }
    merge_field(j, "energized_can_actuate", cfg.energized_can_actuate);

    if (!cfg.servo.angles.strictly_increasing()) fail("servo.angles_deg must be strictly increasing");
    if (!(cfg.servo.dt_s > 0.0) || !(cfg.servo.speed_deg_s > 0.0)) fail("servo.dt_s and speed_deg_s must be positive");
    if (!(cfg.servo.stall_window_s > 0.0)) fail("servo.stall_window_s must be positive");
    if (cfg.servo.contact_fraction < 0.0 || cfg.servo.contact_fraction >= 1.0) {
        fail("servo.contact_fraction must lie in [0, 1)");
    }
}

void apply_override(WorldConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) fail("override must look like section.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json patch = json::object();
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        patch[path] = value;
    } else {
        patch[path.substr(0, dot)][path.substr(dot + 1)] = value;
    }
    merge_config(cfg, patch);
}

json world_to_json(const World& world) {
    json modules = json::array();
    for (const auto& [id, m] : world.modules()) {
        json faces = json::object();
        for (auto d : kAllDirections) faces[std::string(to_string(d))] = face_to_json(m.face(d));
        modules.push_back(json{{"id", id},
                               {"position", {m.position.x, m.position.y, m.position.z}},
                               {"orientation", m.orientation.index()},
                               {"anchored", m.anchored},
                               {"powered", m.powered},
                               {"failed", m.failed},
                               {"mass_g", m.mass_g},
                               {"faces", faces}});
    }
    json joints = json::array();
    for (const auto& j : world.joints()) {
        joints.push_back(json{{"male", j.male_side.str()}, {"female", j.female_side.str()}});
    }
    return json{{"modules", modules}, {"joints", joints}};
}

World world_from_json(const json& j, WorldConfig cfg) {
    World world(std::move(cfg));
    const ServoConfig& servo = world.config().servo;
    for (const json& mj : get_as<json::array_t>(require(j, "modules"), "modules")) {
        Module m;
        m.id = get_as<std::string>(require(mj, "id"), "id");
        if (m.id.empty() || m.id.find(':') != std::string::npos) fail("module id must be non-empty without ':'");
        m.position = cell_from(require(mj, "position"));
        if (mj.contains("orientation")) {
            auto o = Orientation::from_index(get_as<int>(mj.at("orientation"), "orientation"));
            if (!o) fail("orientation must be an index in [0, 24)");
            m.orientation = *o;
        }
        merge_field(mj, "anchored", m.anchored);
        merge_field(mj, "powered", m.powered);
        merge_field(mj, "failed", m.failed);
        merge_field(mj, "mass_g", m.mass_g);

        const json faces = mj.contains("faces") ? mj.at("faces") : json("active");
        for (auto d : kAllDirections) {
            const std::string key{to_string(d)};
            const std::string cid = FaceAddress{m.id, d}.str();
            if (faces.is_string()) {
                m.face(d) = face_from_json(faces, cid, servo);
            } else if (faces.is_object()) {
                for (const auto& [k, v] : faces.items()) {
                    if (!parse_direction(k)) fail("bad face key '" + k + "' in module " + m.id);
                }
                m.face(d) = faces.contains(key) ? face_from_json(faces.at(key), cid, servo) : FaceInterface::blank();
            } else {
                fail("faces must be a kind string or an object keyed by face");
            }
        }
        if (auto s = world.place_module(std::move(m)); !s) fail(s.failure().message());
    }
    if (j.contains("joints")) {
        for (const json& jj : get_as<json::array_t>(j.at("joints"), "joints")) {
            if (auto s = world.add_locked_joint(face_from(jj, "male"), face_from(jj, "female")); !s) {
                fail("joint: " + s.failure().message());
            }
        }
    }
    return world;
}

json action_to_json(const Action& action) {
    return std::visit(
        Overloaded{
            [](const Slide& a) {
                return json{{"action", "slide"}, {"module", a.module}, {"direction", std::string(to_string(a.direction))}};
            },
            [](const Couple& a) {
                return json{{"action", "couple"}, {"initiator", a.initiator.str()}, {"target", a.target.str()}};
            },
            [](const DecoupleMale& a) { return json{{"action", "decouple_male"}, {"face", a.male.str()}}; },
            [](const DecoupleFemale& a) { return json{{"action", "decouple_female"}, {"face", a.female.str()}}; },
            [](const SetPower& a) { return json{{"action", "set_power"}, {"module", a.module}, {"on", a.on}}; },
        },
        action);
}

Action action_from_json(const json& j) {
    const auto kind = get_as<std::string>(require(j, "action"), "action");
    if (kind == "slide") return Slide{get_as<std::string>(require(j, "module"), "module"), direction_from(j, "direction")};
    if (kind == "couple") return Couple{face_from(j, "initiator"), face_from(j, "target")};
    if (kind == "decouple_male") return DecoupleMale{face_from(j, "face")};
    if (kind == "decouple_female") return DecoupleFemale{face_from(j, "face")};
    if (kind == "set_power") {
        return SetPower{get_as<std::string>(require(j, "module"), "module"), get_as<bool>(require(j, "on"), "on")};
    }
    fail("unknown action '" + kind + "'");
}

json plan_to_json(const Plan& plan) {
    json actions = json::array();
    for (const auto& a : plan.actions) actions.push_back(action_to_json(a));
    json hashes = json::array();
    for (auto h : plan.step_hashes) {
        std::ostringstream os;
        os << std::hex << h;
        hashes.push_back(os.str());
    }
    return json{{"schema", "latticelink.plan"},
                {"version", kPlanSchemaVersion},
                {"cost", plan.cost()},
                {"actions", actions},
                {"step_hashes", hashes}};
}

Plan plan_from_json(const json& j) {
    check_schema(j, "latticelink.plan", kPlanSchemaVersion);
    Plan plan;
    for (const json& a : get_as<json::array_t>(require(j, "actions"), "actions")) plan.actions.push_back(action_from_json(a));
    if (j.contains("step_hashes")) {
        for (const json& h : get_as<json::array_t>(j.at("step_hashes"), "step_hashes")) {
            const auto text = get_as<std::string>(h, "step_hashes");
            try {
                plan.step_hashes.push_back(std::stoull(text, nullptr, 16));
            } catch (const std::exception&) {
                fail("bad step hash '" + text + "'");
            }
        }
        if (!plan.step_hashes.empty() && plan.step_hashes.size() != plan.actions.size()) {
            fail("step_hashes must match the action count");
        }
    }
    return plan;
}

json scenario_to_json(const Scenario& scenario) {
    json j{{"schema", "latticelink.scenario"},
           {"version", kScenarioSchemaVersion},
           {"name", scenario.name},
           {"seed", scenario.seed},
           {"config", config_to_json(scenario.world.config())},
           {"world", world_to_json(scenario.world)}};
    json mis = scenario.misalignment.mode == MisalignmentPolicy::Mode::Fixed
                   ? json{{"mode", "fixed"}, {"value", misalignment_to_json(scenario.misalignment.fixed)}}
                   : json{{"mode", "random"}, {"envelope", misalignment_to_json(scenario.misalignment.envelope)}};
    j["misalignment"] = mis;
    json script = json::array();
    for (const auto& step : scenario.script) script.push_back(step_to_json(step));
    j["script"] = script;
    return j;
}

Scenario scenario_from_json(const json& j, const std::vector<std::string>& overrides) {
    check_schema(j, "latticelink.scenario", kScenarioSchemaVersion);
    WorldConfig cfg;
    if (j.contains("config")) merge_config(cfg, j.at("config"));
    for (const auto& o : overrides) apply_override(cfg, o);

    Scenario s;
    merge_field(j, "name", s.name);
    merge_field(j, "seed", s.seed);
    s.world = world_from_json(require(j, "world"), cfg);
    if (j.contains("misalignment")) {
        const json& mj = j.at("misalignment");
        const auto mode = get_as<std::string>(require(mj, "mode"), "mode");
        if (mode == "fixed") {
            s.misalignment.mode = MisalignmentPolicy::Mode::Fixed;
            if (mj.contains("value")) s.misalignment.fixed = misalignment_from_json(mj.at("value"));
        } else if (mode == "random") {
            s.misalignment.mode = MisalignmentPolicy::Mode::Random;
            s.misalignment.envelope = misalignment_from_json(require(mj, "envelope"));
        } else {
            fail("misalignment mode must be 'fixed' or 'random'");
        }
    }
    if (j.contains("script")) {
        for (const json& step : get_as<json::array_t>(j.at("script"), "script")) s.script.push_back(step_from_json(step));
    }
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(path.string() + " is not valid JSON");
    return j;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    return scenario_from_json(read_json_file(path), overrides);
}

Plan load_plan(const std::filesystem::path& path) { return plan_from_json(read_json_file(path)); }

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace latticelink
