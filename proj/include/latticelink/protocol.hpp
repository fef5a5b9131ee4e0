#pragma once

#include <optional>
#include <string>

#include "latticelink/connector.hpp"
#include "latticelink/geometry.hpp"
#include "latticelink/result.hpp"
#include "latticelink/trace.hpp"

namespace latticelink {

enum class FaceKind : std::uint8_t { Active, Passive, Blank };

std::string_view to_string(FaceKind kind);
std::optional<FaceKind> parse_face_kind(std::string_view text);

/// What a module presents on one face. Passive faces are permanently flat and
/// female-like; blank faces never take part in a joint.
class FaceInterface {
public:
    FaceInterface() = default;
    static FaceInterface active(Connector connector);
    static FaceInterface passive();
    static FaceInterface blank();

    FaceKind kind() const { return kind_; }
    bool is_active() const { return kind_ == FaceKind::Active; }

    Connector& connector() { return *connector_; }
    const Connector& connector() const { return *connector_; }

    /// Nothing protrudes past the face plane.
    bool flat() const;

    const std::optional<std::string>& engaged_with() const;
    void set_engaged_with(std::optional<std::string> peer);

private:
    FaceKind kind_ = FaceKind::Blank;
    std::optional<Connector> connector_;
    std::optional<std::string> passive_mate_;
};

struct FaceAddress {
    std::string module;
    Direction face = Direction::PosX;

    std::string str() const;
    auto operator<=>(const FaceAddress&) const = default;
};

std::optional<FaceAddress> parse_face_address(std::string_view text);

/// Residual pose error when the assembler pushes two faces flush. Z offset,
/// roll and pitch are zero by construction.
struct Misalignment {
    double dx_mm = 0.0;
    double dy_mm = 0.0;
    double dyaw_deg = 0.0;
};

struct ProtocolConfig {
    double tolerance_xy_mm = 2.5;
    double tolerance_yaw_deg = 2.5;
    // Passive interfaces carry mating contact pads.
    bool passive_contacts = true;
};

struct Joint {
    FaceAddress male_side;
    FaceAddress female_side;
    bool locked = false;
    bool electrical = false;
    int relative_yaw_deg = 0;

    bool involves(const FaceAddress& f) const { return male_side == f || female_side == f; }
    const FaceAddress& other(const FaceAddress& f) const { return male_side == f ? female_side : male_side; }
};

struct FaceHandle {
    FaceAddress address;
    FaceInterface& iface;
};

struct ProtocolEnv {
    const ServoConfig& servo;
    const ProtocolConfig& protocol;
    Trace& trace;
};

/// Closed tolerance box on x/y offset and on yaw measured from the nearest
/// quarter turn.
bool check_alignment(const Misalignment& mis, const ProtocolConfig& cfg = {});

/// Nearest quarter turn of a yaw value, in [0, 4).
int yaw_quarter(double dyaw_deg);

/// Single-sided coupling: the initiator walks FemaleLock -> MaleLock into a
/// flat target that is never actuated.
Result<Joint> couple(FaceHandle initiator, FaceHandle target, const Misalignment& mis, const ProtocolEnv& env);

/// Male side walks MaleLock -> FemaleLock; the female side is untouched.
Status decouple_from_male(Joint& joint, FaceHandle male, FaceHandle female, const ProtocolEnv& env);

/// Female side drives itself to MaleLock while back-driving the peer to
/// FemaleLock, then releases as the new male side. A powered peer that can be
/// reached over the electrical contacts is first told to release torque.
Status decouple_from_female(Joint& joint, FaceHandle male, FaceHandle female, bool male_reachable,
                            const ProtocolEnv& env);

/// Locked joints are self-retaining with both servos unpowered.
Result<bool> holds_when_unpowered(const Joint& joint);

}  // namespace latticelink
