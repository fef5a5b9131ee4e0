#include "latticelink/protocol.hpp"

#include <cmath>
#include <utility>

namespace latticelink {

std::string_view to_string(FaceKind kind) {
    switch (kind) {
        case FaceKind::Active: return "active";
        case FaceKind::Passive: return "passive";
        case FaceKind::Blank: return "blank";
    }
    return "?";
}

std::optional<FaceKind> parse_face_kind(std::string_view text) {
    for (auto k : {FaceKind::Active, FaceKind::Passive, FaceKind::Blank}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

FaceInterface FaceInterface::active(Connector connector) {
    FaceInterface f;
    f.kind_ = FaceKind::Active;
    f.connector_ = std::move(connector);
    return f;
}

FaceInterface FaceInterface::passive() {
    FaceInterface f;
    f.kind_ = FaceKind::Passive;
    return f;
}

FaceInterface FaceInterface::blank() { return FaceInterface{}; }

bool FaceInterface::flat() const { return kind_ != FaceKind::Active || is_flat(connector_->state); }

const std::optional<std::string>& FaceInterface::engaged_with() const {
    return kind_ == FaceKind::Active ? connector_->engaged_with : passive_mate_;
}

void FaceInterface::set_engaged_with(std::optional<std::string> peer) {
    if (kind_ == FaceKind::Active) {
        connector_->engaged_with = std::move(peer);
    } else {
        passive_mate_ = std::move(peer);
    }
}

std::string FaceAddress::str() const { return module + ":" + std::string(to_string(face)); }

std::optional<FaceAddress> parse_face_address(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    const auto dir = parse_direction(text.substr(colon + 1));
    if (!dir) return std::nullopt;
    return FaceAddress{std::string(text.substr(0, colon)), *dir};
}

bool check_alignment(const Misalignment& mis, const ProtocolConfig& cfg) {
    if (!std::isfinite(mis.dx_mm) || !std::isfinite(mis.dy_mm) || !std::isfinite(mis.dyaw_deg)) return false;
    // remainder() is exact and lands in [-45, 45].
    const double yaw_residual = std::remainder(mis.dyaw_deg, 90.0);
    return std::abs(mis.dx_mm) <= cfg.tolerance_xy_mm && std::abs(mis.dy_mm) <= cfg.tolerance_xy_mm &&
           std::abs(yaw_residual) <= cfg.tolerance_yaw_deg;
}

int yaw_quarter(double dyaw_deg) {
    const auto q = static_cast<long>(std::llround(dyaw_deg / 90.0)) % 4;
    return static_cast<int>(q < 0 ? q + 4 : q);
}

Result<Joint> couple(FaceHandle initiator, FaceHandle target, const Misalignment& mis, const ProtocolEnv& env) {
    if (initiator.iface.kind() == FaceKind::Blank || target.iface.kind() == FaceKind::Blank) {
        return Failure{Errc::Blank, "blank face cannot couple"};
    }
    if (!initiator.iface.is_active()) {
        return Failure{Errc::InitiatorNotActive, initiator.address.str() + " has no actuator"};
    }
    Connector& conn = initiator.iface.connector();
    if (!conn.servo.powered) {
        return Failure{Errc::InitiatorUnpowered, initiator.address.str()};
    }
    if (target.iface.engaged_with() ||
        (target.iface.is_active() && target.iface.connector().state != ConnectorState::FemaleLock)) {
        return Failure{Errc::TargetNotFemale, target.address.str()};
    }
    if (conn.state != ConnectorState::FemaleLock || conn.engaged_with) {
        return Failure{Errc::InitiatorNotReady, initiator.address.str() + " is not a free FemaleLock"};
    }

    const bool aligned = check_alignment(mis, env.protocol);
    const auto report = command_transition(conn, ConnectorState::MaleLock, env.servo, env.trace, !aligned);
    if (report.outcome == TransitionOutcome::Blocked) {
        return Failure{Errc::Misaligned, initiator.address.str() + " -> " + target.address.str()};
    }
    if (report.outcome == TransitionOutcome::Unpowered) {
        return Failure{Errc::InitiatorUnpowered, initiator.address.str()};
    }

    Joint joint;
    joint.male_side = initiator.address;
    joint.female_side = target.address;
    joint.locked = true;
    joint.electrical = target.iface.is_active() || env.protocol.passive_contacts;
    joint.relative_yaw_deg = 90 * yaw_quarter(mis.dyaw_deg);
    initiator.iface.set_engaged_with(target.address.str());
    target.iface.set_engaged_with(initiator.address.str());
    env.trace.joint_event(initiator.address.str(), "created",
                          initiator.address.str() + " male, " + target.address.str() + " female");
    return joint;
}

Status decouple_from_male(Joint& joint, FaceHandle male, FaceHandle female, const ProtocolEnv& env) {
    if (!joint.locked) return Failure{Errc::NotLocked, male.address.str()};
    if (joint.male_side != male.address || joint.female_side != female.address) {
        return Failure{Errc::NoJoint, male.address.str() + " / " + female.address.str()};
    }
    if (!male.iface.is_active() || !male.iface.connector().servo.powered) {
        return Failure{Errc::MaleUnpowered, male.address.str()};
    }

    const auto report = command_transition(male.iface.connector(), ConnectorState::FemaleLock, env.servo, env.trace);
    if (report.outcome != TransitionOutcome::Completed) {
        return Failure{Errc::MaleUnpowered, male.address.str()};
    }
    male.iface.set_engaged_with(std::nullopt);
    female.iface.set_engaged_with(std::nullopt);
    joint.locked = false;
    env.trace.joint_event(male.address.str(), "destroyed",
                          male.address.str() + " released " + female.address.str());
    return ok_status();
}

Status decouple_from_female(Joint& joint, FaceHandle male, FaceHandle female, bool male_reachable,
                            const ProtocolEnv& env) {
    if (!joint.locked) return Failure{Errc::NotLocked, female.address.str()};
    if (joint.male_side != male.address || joint.female_side != female.address) {
        return Failure{Errc::NoJoint, male.address.str() + " / " + female.address.str()};
    }
    if (!female.iface.is_active()) return Failure{Errc::FemaleSideNotActive, female.address.str()};
    Connector& driver = female.iface.connector();
    Connector& peer = male.iface.connector();
    if (!driver.servo.powered) return Failure{Errc::FemaleUnpowered, female.address.str()};

    if (peer.servo.holding()) {
        if (!male_reachable) {
            return Failure{Errc::BackDriveResisted, male.address.str() + " is holding and unreachable"};
        }
        peer.servo.torque_enabled = false;
        env.trace.joint_event(male.address.str(), "torque-release", "requested by " + female.address.str());
    }

    // Stages (g) -> (d): role reversal under back-drive.
    std::optional<Failure> back_drive_failure;
    const auto report = command_transition(driver, ConnectorState::MaleLock, env.servo, env.trace, false,
                                           [&](double delta) {
                                               if (back_drive_failure) return;
                                               auto r = back_drive(peer, delta, env.servo, env.trace);
                                               if (!r) back_drive_failure = r.failure();
                                           });
    if (back_drive_failure) return *back_drive_failure;
    if (report.outcome != TransitionOutcome::Completed || peer.state != ConnectorState::FemaleLock) {
        return Failure{Errc::BackDriveResisted, male.address.str() + " did not reach FemaleLock"};
    }
    std::swap(joint.male_side, joint.female_side);
    env.trace.joint_event(female.address.str(), "role-reversal", female.address.str() + " is now male");

    // Stages (d) -> (a): ordinary release from the new male side.
    return decouple_from_male(joint, female, male, env);
}

Result<bool> holds_when_unpowered(const Joint& joint) {
    if (!joint.locked) return Failure{Errc::NotLocked, joint.male_side.str()};
    return true;
}

}  // namespace latticelink
