#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "latticelink/geometry.hpp"
#include "latticelink/protocol.hpp"
#include "latticelink/result.hpp"
#include "latticelink/trace.hpp"

namespace latticelink {

inline constexpr double kModuleMassG = 840.0;

struct Module {
    std::string id;
    Cell position;
    Orientation orientation;
    std::array<FaceInterface, 6> faces;  // indexed by local face
    bool powered = true;                 // own supply
    bool anchored = false;
    bool failed = false;                 // malfunctioning: never actuates or answers
    double mass_g = kModuleMassG;

    FaceInterface& face(Direction local) { return faces[index_of(local)]; }
    const FaceInterface& face(Direction local) const { return faces[index_of(local)]; }
    /// Face presented toward a world direction.
    const FaceInterface& face_toward(Direction world) const { return face(orientation.to_local(world)); }
};

/// Builds a module whose faces all share one kind; active faces start in
/// FemaleLock with connector ids "<id>:<face>".
Module make_module(std::string id, Cell position, FaceKind kind = FaceKind::Active, const ServoConfig& servo = {});

/// Forces on a joint in its face frame. Positive axial is tension.
struct LoadVector {
    double shear_x_n = 0.0;
    double shear_y_n = 0.0;
    double axial_z_n = 0.0;
};

struct LoadCapacity {
    double shear_n = 300.0;
    double axial_n = 129.0;
};

enum class LoadAxis : std::uint8_t { X, Y, Z };
std::string_view to_string(LoadAxis axis);

struct LoadVerdict {
    bool holds = true;
    std::vector<LoadAxis> failed_axes;
};

/// Per-axis static capacity check. Axes are independent; compression never fails.
Result<LoadVerdict> check_load(const Joint& joint, const LoadVector& load, const LoadCapacity& capacity = {});

struct WorldConfig {
    ServoConfig servo;
    ProtocolConfig protocol;
    LoadCapacity load;
    LoadCapacity passive_load;  // joints whose female side is a passive interface
    // Modules without their own supply may actuate when fed over contacts.
    bool energized_can_actuate = true;
};

struct ConnectivityReport {
    bool ok = true;
    std::vector<std::string> floating;
};

/// Cubic lattice: module registry, occupancy, joints and the event trace.
/// Every mutation goes through the member operations so occupancy and power
/// stay in sync.
class World {
public:
    explicit World(WorldConfig config = {});

    const WorldConfig& config() const { return config_; }
    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }

    Status place_module(Module m);

    const std::map<std::string, Module>& modules() const { return modules_; }
    const Module* find(const std::string& id) const;
    std::optional<std::string> module_at(Cell c) const;
    const FaceInterface* face(const FaceAddress& f) const;

    const std::vector<Joint>& joints() const { return joints_; }
    const Joint* joint_at(const FaceAddress& f) const;
    bool has_joints(const std::string& module_id) const;

    /// Opposing face across the lattice, if a module occupies that cell.
    std::optional<FaceAddress> facing(const FaceAddress& f) const;

    Result<bool> can_slide(const std::string& module_id, Direction dir) const;
    Status slide_module(const std::string& module_id, Direction dir);

    Result<Joint> couple(const FaceAddress& initiator, const FaceAddress& target, const Misalignment& residual = {});
    /// Both faces of a pair start coupling in the same tick; the lower face
    /// address runs first and the other sees a non-female target.
    std::pair<Result<Joint>, Result<Joint>> couple_simultaneously(const FaceAddress& a, const FaceAddress& b,
                                                                  const Misalignment& residual = {});
    Status decouple_from_male(const FaceAddress& male);
    Status decouple_from_female(const FaceAddress& female);
    Status set_power(const std::string& module_id, bool on);
    Status set_failed(const std::string& module_id, bool failed);

    /// Inserts an already-locked joint (scenario loading); connectors are set
    /// to MaleLock / FemaleLock.
    Status add_locked_joint(const FaceAddress& male, const FaceAddress& female);

    Result<LoadVerdict> check_load(const FaceAddress& f, const LoadVector& load) const;

    std::set<std::string> propagate_power() const;
    ConnectivityReport connectivity_check() const;
    /// Unanchored components with more than one module. A lone jointless
    /// module is held by the assembler and does not count.
    std::vector<std::string> floating_assemblies() const;

    /// Whether a module can exchange messages over its joints.
    bool reachable(const std::string& module_id) const;

    /// Invariant audit: occupancy bijection, joint geometry and gender,
    /// engagement bookkeeping, connector angle consistency. Empty when clean.
    std::vector<std::string> audit() const;

    /// Canonical state text (positions, connector states, joints, power).
    std::string canonical_key() const;
    std::uint64_t state_hash() const;

private:
    Module* find_mut(const std::string& id);
    FaceInterface* face_mut(const FaceAddress& f);
    Joint* joint_mut(const FaceAddress& f);
    void sync_power();
    ProtocolEnv env();
    void remove_unlocked_joints();

    WorldConfig config_;
    std::map<std::string, Module> modules_;
    std::map<Cell, std::string> occupancy_;
    std::vector<Joint> joints_;
    Trace trace_;
};

std::uint64_t fnv1a64(std::string_view text);

}  // namespace latticelink
