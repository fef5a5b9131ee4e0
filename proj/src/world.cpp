#include "latticelink/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>

namespace latticelink {

Module make_module(std::string id, Cell position, FaceKind kind, const ServoConfig& servo) {
    Module m;
    m.id = std::move(id);
    m.position = position;
    for (auto d : kAllDirections) {
        switch (kind) {
            case FaceKind::Active:
                m.face(d) = FaceInterface::active(make_connector(FaceAddress{m.id, d}.str(), servo));
                break;
            case FaceKind::Passive: m.face(d) = FaceInterface::passive(); break;
            case FaceKind::Blank: m.face(d) = FaceInterface::blank(); break;
        }
    }
    return m;
}

std::string_view to_string(LoadAxis axis) {
    switch (axis) {
        case LoadAxis::X: return "X";
        case LoadAxis::Y: return "Y";
        case LoadAxis::Z: return "Z";
    }
    return "?";
}

Result<LoadVerdict> check_load(const Joint& joint, const LoadVector& load, const LoadCapacity& capacity) {
    if (!joint.locked) return Failure{Errc::NotLocked, joint.male_side.str()};
    LoadVerdict verdict;
    if (std::abs(load.shear_x_n) > capacity.shear_n) verdict.failed_axes.push_back(LoadAxis::X);
    if (std::abs(load.shear_y_n) > capacity.shear_n) verdict.failed_axes.push_back(LoadAxis::Y);
    if (load.axial_z_n > capacity.axial_n) verdict.failed_axes.push_back(LoadAxis::Z);
    verdict.holds = verdict.failed_axes.empty();
    return verdict;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

World::World(WorldConfig config) : config_(std::move(config)), trace_(config_.servo.dt_s) {}

Module* World::find_mut(const std::string& id) {
    auto it = modules_.find(id);
    return it == modules_.end() ? nullptr : &it->second;
}

const Module* World::find(const std::string& id) const {
    auto it = modules_.find(id);
    return it == modules_.end() ? nullptr : &it->second;
}

std::optional<std::string> World::module_at(Cell c) const {
    auto it = occupancy_.find(c);
    if (it == occupancy_.end()) return std::nullopt;
    return it->second;
}

FaceInterface* World::face_mut(const FaceAddress& f) {
    Module* m = find_mut(f.module);
    return m ? &m->face(f.face) : nullptr;
}

const FaceInterface* World::face(const FaceAddress& f) const {
    const Module* m = find(f.module);
    return m ? &m->face(f.face) : nullptr;
}

Joint* World::joint_mut(const FaceAddress& f) {
    for (auto& j : joints_) {
        if (j.involves(f)) return &j;
    }
    return nullptr;
}

const Joint* World::joint_at(const FaceAddress& f) const {
    for (const auto& j : joints_) {
        if (j.involves(f)) return &j;
    }
    return nullptr;
}

bool World::has_joints(const std::string& module_id) const {
    return std::any_of(joints_.begin(), joints_.end(), [&](const Joint& j) {
        return j.male_side.module == module_id || j.female_side.module == module_id;
    });
}

std::optional<FaceAddress> World::facing(const FaceAddress& f) const {
    const Module* m = find(f.module);
    if (!m) return std::nullopt;
    const Direction world_dir = m->orientation.to_world(f.face);
    const auto other_id = module_at(neighbor(m->position, world_dir));
    if (!other_id) return std::nullopt;
    const Module& other = modules_.at(*other_id);
    return FaceAddress{other.id, other.orientation.to_local(opposite(world_dir))};
}

Status World::place_module(Module m) {
    if (occupancy_.count(m.position)) {
        return Failure{Errc::CellOccupied, to_string(m.position) + " holds " + occupancy_.at(m.position)};
    }
    if (modules_.count(m.id)) return Failure{Errc::CellOccupied, "duplicate module id " + m.id};
    for (auto d : kAllDirections) {
        auto& face = m.face(d);
        if (face.is_active()) face.connector().id = FaceAddress{m.id, d}.str();
    }
    occupancy_[m.position] = m.id;
    const std::string id = m.id;
    modules_.emplace(id, std::move(m));
    sync_power();
    return ok_status();
}

Result<bool> World::can_slide(const std::string& module_id, Direction dir) const {
    const Module* m = find(module_id);
    if (!m) return Failure{Errc::UnknownModule, module_id};
    if (has_joints(module_id)) return Failure{Errc::ModuleJointed, module_id};
    if (m->anchored) return false;

    const Cell from = m->position;
    const Cell to = neighbor(from, dir);
    if (occupancy_.count(to)) return false;
    for (const auto& f : m->faces) {
        if (!f.flat()) return false;
    }
    // Every neighbour face touching the swept cells must be flat.
    for (const Cell swept : {from, to}) {
        for (auto d : kAllDirections) {
            const Cell n = neighbor(swept, d);
            if (n == from || n == to) continue;
            const auto other = module_at(n);
            if (other && !modules_.at(*other).face_toward(opposite(d)).flat()) return false;
        }
    }
    return true;
}

Status World::slide_module(const std::string& module_id, Direction dir) {
    const auto slidable = can_slide(module_id, dir);
    if (!slidable) return slidable.failure();
    Module& m = *find_mut(module_id);
    if (!*slidable) {
        if (m.anchored) return Failure{Errc::ModuleAnchored, module_id};
        return Failure{Errc::SlideBlocked, module_id + " toward " + std::string(to_string(dir))};
    }
    occupancy_.erase(m.position);
    m.position = neighbor(m.position, dir);
    occupancy_[m.position] = module_id;
    trace_.action(module_id, "slide " + std::string(to_string(dir)) + " to " + to_string(m.position));
    return ok_status();
}

ProtocolEnv World::env() { return ProtocolEnv{config_.servo, config_.protocol, trace_}; }

Result<Joint> World::couple(const FaceAddress& initiator, const FaceAddress& target, const Misalignment& residual) {
    Module* a = find_mut(initiator.module);
    Module* b = find_mut(target.module);
    if (!a) return Failure{Errc::UnknownModule, initiator.module};
    if (!b) return Failure{Errc::UnknownModule, target.module};
    trace_.action(initiator.str(), "couple " + initiator.str() + " -> " + target.str());
    const auto opposite_face = facing(initiator);
    if (!opposite_face || *opposite_face != target) {
        return Failure{Errc::NotAdjacent, initiator.str() + " does not face " + target.str()};
    }

    Misalignment mis = residual;
    mis.dyaw_deg += 90.0 * relative_yaw_quarters(a->orientation, initiator.face, b->orientation, target.face);
    auto joint = latticelink::couple(FaceHandle{initiator, a->face(initiator.face)},
                                     FaceHandle{target, b->face(target.face)}, mis, env());
    if (!joint) {
        trace_.error(initiator.str(), std::string(to_string(joint.code())), joint.failure().detail);
        return joint;
    }
    joints_.push_back(*joint);
    sync_power();
    return joint;
}

std::pair<Result<Joint>, Result<Joint>> World::couple_simultaneously(const FaceAddress& a, const FaceAddress& b,
                                                                     const Misalignment& residual) {
    if (b < a) {
        auto later = couple(b, a, residual);
        auto second = couple(a, b, residual);
        return {std::move(second), std::move(later)};
    }
    auto first = couple(a, b, residual);
    auto second = couple(b, a, residual);
    return {std::move(first), std::move(second)};
}

Status World::decouple_from_male(const FaceAddress& male) {
    trace_.action(male.str(), "decouple from male side " + male.str());
    Joint* joint = joint_mut(male);
    if (!joint || joint->male_side != male) {
        trace_.error(male.str(), std::string(to_string(Errc::NoJoint)));
        return Failure{Errc::NoJoint, male.str() + " is not the male side of a joint"};
    }
    const FaceAddress female = joint->female_side;
    auto status = latticelink::decouple_from_male(*joint, FaceHandle{male, *face_mut(male)},
                                                  FaceHandle{female, *face_mut(female)}, env());
    if (!status) {
        trace_.error(male.str(), std::string(to_string(status.code())), status.failure().detail);
        return status;
    }
    remove_unlocked_joints();
    sync_power();
    return status;
}

Status World::decouple_from_female(const FaceAddress& female) {
    trace_.action(female.str(), "decouple from female side " + female.str());
    Joint* joint = joint_mut(female);
    if (!joint || joint->female_side != female) {
        trace_.error(female.str(), std::string(to_string(Errc::NoJoint)));
        return Failure{Errc::NoJoint, female.str() + " is not the female side of a joint"};
    }
    const FaceAddress male = joint->male_side;
    const bool male_reachable = joint->electrical && reachable(male.module);
    auto status = latticelink::decouple_from_female(*joint, FaceHandle{male, *face_mut(male)},
                                                    FaceHandle{female, *face_mut(female)}, male_reachable, env());
    if (!status) {
        trace_.error(female.str(), std::string(to_string(status.code())), status.failure().detail);
        return status;
    }
    remove_unlocked_joints();
    sync_power();
    return status;
}

Status World::set_power(const std::string& module_id, bool on) {
    Module* m = find_mut(module_id);
    if (!m) return Failure{Errc::UnknownModule, module_id};
    m->powered = on;
    trace_.action(module_id, on ? "power on" : "power off");
    sync_power();
    return ok_status();
}

Status World::set_failed(const std::string& module_id, bool failed) {
    Module* m = find_mut(module_id);
    if (!m) return Failure{Errc::UnknownModule, module_id};
    m->failed = failed;
    sync_power();
    return ok_status();
}

Status World::add_locked_joint(const FaceAddress& male, const FaceAddress& female) {
    Module* a = find_mut(male.module);
    Module* b = find_mut(female.module);
    if (!a) return Failure{Errc::UnknownModule, male.module};
    if (!b) return Failure{Errc::UnknownModule, female.module};
    const auto opposite_face = facing(male);
    if (!opposite_face || *opposite_face != female) return Failure{Errc::NotAdjacent, male.str()};
    FaceInterface& mf = a->face(male.face);
    FaceInterface& ff = b->face(female.face);
    if (!mf.is_active()) return Failure{Errc::InitiatorNotActive, male.str()};
    if (ff.kind() == FaceKind::Blank || mf.kind() == FaceKind::Blank) return Failure{Errc::Blank, female.str()};
    if (mf.engaged_with() || ff.engaged_with()) return Failure{Errc::TargetNotFemale, "face already jointed"};

    Connector& mc = mf.connector();
    mc.state = ConnectorState::MaleLock;
    mc.servo.angle_deg = mc.servo.goal_angle_deg = config_.servo.angles.angle(ConnectorState::MaleLock);
    if (ff.is_active()) {
        Connector& fc = ff.connector();
        fc.state = ConnectorState::FemaleLock;
        fc.servo.angle_deg = fc.servo.goal_angle_deg = config_.servo.angles.angle(ConnectorState::FemaleLock);
    }
    mf.set_engaged_with(female.str());
    ff.set_engaged_with(male.str());

    Joint j;
    j.male_side = male;
    j.female_side = female;
    j.locked = true;
    j.electrical = ff.is_active() || config_.protocol.passive_contacts;
    j.relative_yaw_deg = 90 * relative_yaw_quarters(a->orientation, male.face, b->orientation, female.face);
    joints_.push_back(j);
    trace_.joint_event(male.str(), "created", male.str() + " male, " + female.str() + " female (initial)");
    sync_power();
    return ok_status();
}

Result<LoadVerdict> World::check_load(const FaceAddress& f, const LoadVector& load) const {
    const Joint* joint = joint_at(f);
    if (!joint) return Failure{Errc::NoJoint, f.str()};
    const FaceInterface* female = face(joint->female_side);
    const LoadCapacity& capacity =
        female && female->kind() == FaceKind::Passive ? config_.passive_load : config_.load;
    return latticelink::check_load(*joint, load, capacity);
}

std::set<std::string> World::propagate_power() const {
    std::set<std::string> energized;
    std::deque<std::string> queue;
    for (const auto& [id, m] : modules_) {
        if (m.powered) {
            energized.insert(id);
            queue.push_back(id);
        }
    }
    while (!queue.empty()) {
        const std::string id = queue.front();
        queue.pop_front();
        for (const auto& j : joints_) {
            if (!j.locked || !j.electrical) continue;
            std::string other;
            if (j.male_side.module == id) other = j.female_side.module;
            else if (j.female_side.module == id) other = j.male_side.module;
            else continue;
            if (energized.insert(other).second) queue.push_back(other);
        }
    }
    return energized;
}

bool World::reachable(const std::string& module_id) const {
    const Module* m = find(module_id);
    return m && !m->failed && propagate_power().count(module_id) > 0;
}

void World::sync_power() {
    const auto energized = propagate_power();
    for (auto& [id, m] : modules_) {
        const bool can_actuate =
            !m.failed && energized.count(id) > 0 && (m.powered || config_.energized_can_actuate);
        for (auto& face : m.faces) {
            if (!face.is_active()) continue;
            auto& servo = face.connector().servo;
            servo.powered = can_actuate;
            if (!can_actuate) servo.measured_current_ma = 0.0;
        }
    }
}

void World::remove_unlocked_joints() {
    joints_.erase(std::remove_if(joints_.begin(), joints_.end(), [](const Joint& j) { return !j.locked; }),
                  joints_.end());
}

namespace {

// Undirected joint graph restricted to locked joints.
std::map<std::string, std::vector<std::string>> joint_graph(const std::map<std::string, Module>& modules,
                                                            const std::vector<Joint>& joints) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [id, m] : modules) adj[id];
    for (const auto& j : joints) {
        if (!j.locked) continue;
        adj[j.male_side.module].push_back(j.female_side.module);
        adj[j.female_side.module].push_back(j.male_side.module);
    }
    return adj;
}

}  // namespace

ConnectivityReport World::connectivity_check() const {
    const auto adj = joint_graph(modules_, joints_);
    std::set<std::string> seen;
    std::deque<std::string> queue;
    for (const auto& [id, m] : modules_) {
        if (m.anchored) {
            seen.insert(id);
            queue.push_back(id);
        }
    }
    while (!queue.empty()) {
        const std::string id = queue.front();
        queue.pop_front();
        for (const auto& n : adj.at(id)) {
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    ConnectivityReport report;
    for (const auto& [id, m] : modules_) {
        if (!seen.count(id)) report.floating.push_back(id);
    }
    report.ok = report.floating.empty();
    return report;
}

std::vector<std::string> World::floating_assemblies() const {
    const auto adj = joint_graph(modules_, joints_);
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& [start, m] : modules_) {
        if (seen.count(start)) continue;
        std::vector<std::string> component{start};
        seen.insert(start);
        bool anchored = false;
        for (std::size_t i = 0; i < component.size(); ++i) {
            anchored = anchored || modules_.at(component[i]).anchored;
            for (const auto& n : adj.at(component[i])) {
                if (seen.insert(n).second) component.push_back(n);
            }
        }
        if (!anchored && component.size() > 1) out.insert(out.end(), component.begin(), component.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string World::canonical_key() const {
    std::string key;
    key.reserve(modules_.size() * 32 + joints_.size() * 24);
    const auto number = [&key](long long v) { key += std::to_string(v); };
    for (const auto& [id, m] : modules_) {
        key += id;
        key += '@';
        number(m.position.x);
        key += ',';
        number(m.position.y);
        key += ',';
        number(m.position.z);
        key += 'o';
        number(m.orientation.index());
        key += m.powered ? 'P' : 'p';
        key += m.failed ? 'F' : 'f';
        key += m.anchored ? 'A' : 'a';
        key += '[';
        for (const auto& face : m.faces) {
            switch (face.kind()) {
                // Torque hold is left out: a holding servo is always reachable
                // for a release request, so it never changes an outcome.
                case FaceKind::Active: key += static_cast<char>('0' + path_index(face.connector().state)); break;
                case FaceKind::Passive: key += 'P'; break;
                case FaceKind::Blank: key += 'B'; break;
            }
        }
        key += ']';
    }
    std::vector<std::string> joints;
    joints.reserve(joints_.size());
    for (const auto& j : joints_) {
        joints.push_back(j.male_side.str() + ">" + j.female_side.str() + (j.locked ? "L" : "u") +
                         (j.electrical ? "E" : "n"));
    }
    std::sort(joints.begin(), joints.end());
    for (const auto& j : joints) {
        key += '|';
        key += j;
    }
    return key;
}

std::uint64_t World::state_hash() const { return fnv1a64(canonical_key()); }

}  // namespace latticelink

namespace latticelink {

std::vector<std::string> World::audit() const {
    std::vector<std::string> problems;

    std::map<Cell, std::string> rebuilt;
    for (const auto& [id, m] : modules_) {
        if (!rebuilt.emplace(m.position, id).second) problems.push_back("two modules in " + to_string(m.position));
    }
    if (rebuilt != occupancy_) problems.push_back("occupancy map disagrees with module positions");

    for (const auto& j : joints_) {
        const std::string name = j.male_side.str() + " / " + j.female_side.str();
        const Module* a = find(j.male_side.module);
        const Module* b = find(j.female_side.module);
        if (!a || !b) {
            problems.push_back("joint references a missing module: " + name);
            continue;
        }
        const Direction out = a->orientation.to_world(j.male_side.face);
        if (b->position != neighbor(a->position, out) || b->orientation.to_world(j.female_side.face) != opposite(out)) {
            problems.push_back("joint faces are not adjacent and opposing: " + name);
        }
        if (j.relative_yaw_deg % 90 != 0 || j.relative_yaw_deg < 0 || j.relative_yaw_deg >= 360) {
            problems.push_back("joint yaw is not a quarter turn: " + name);
        }
        const FaceInterface& mf = a->face(j.male_side.face);
        const FaceInterface& ff = b->face(j.female_side.face);
        if (j.locked) {
            if (!mf.is_active() || mf.connector().state != ConnectorState::MaleLock) {
                problems.push_back("locked joint without a MaleLock male side: " + name);
            }
            if (ff.kind() == FaceKind::Blank ||
                (ff.is_active() && ff.connector().state != ConnectorState::FemaleLock)) {
                problems.push_back("locked joint without a female side: " + name);
            }
        }
        if (mf.engaged_with() != j.female_side.str() || ff.engaged_with() != j.male_side.str()) {
            problems.push_back("engagement bookkeeping disagrees with joint: " + name);
        }
    }

    for (const auto& [id, m] : modules_) {
        for (auto d : kAllDirections) {
            const FaceAddress addr{id, d};
            const FaceInterface& f = m.face(d);
            if (f.engaged_with() && !joint_at(addr)) problems.push_back(addr.str() + " engaged without a joint");
            if (f.is_active() && !angle_consistent(f.connector(), config_.servo)) {
                problems.push_back(addr.str() + " angle inconsistent with state");
            }
        }
    }
    return problems;
}

}  // namespace latticelink
