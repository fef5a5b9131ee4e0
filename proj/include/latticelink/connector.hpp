#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "latticelink/connector_state.hpp"
#include "latticelink/result.hpp"
#include "latticelink/trace.hpp"

namespace latticelink {

/// Nominal servo shaft angle for each connector state, in path order.
struct StateAngleTable {
    std::array<double, 4> degrees{0.0, 45.0, 90.0, 135.0};

    double angle(ConnectorState s) const { return degrees[static_cast<std::size_t>(path_index(s))]; }
    bool strictly_increasing() const;
};

struct ServoConfig {
    StateAngleTable angles;
    double speed_deg_s = 90.0;
    double dt_s = 0.01;
    double idle_current_ma = 20.0;
    // Goal current while the hooks protrude (FemaleUnlock -> MaleUnlock).
    double protrusion_current_limit_ma = 150.0;
    // Goal current for every other segment.
    double nominal_current_limit_ma = 900.0;
    double stall_window_s = 0.2;
    double angle_tolerance_deg = 1.0;
    // Fraction of the FemaleUnlock -> MaleUnlock travel after which protruding
    // hooks meet a misaligned or obstructing face.
    double contact_fraction = 0.2;
    // Hold time after each reached state (demonstration pauses); 0 by default.
    double stage_delay_s = 0.0;

    std::int64_t stall_window_ticks() const;
    std::int64_t stage_delay_ticks() const;
};

struct ServoModel {
    double angle_deg = 0.0;
    double goal_angle_deg = 0.0;
    double goal_current_limit_ma = 900.0;
    double measured_current_ma = 0.0;
    bool powered = true;
    bool torque_enabled = true;
    double speed_deg_s = 90.0;

    /// Actively holding position; such a servo resists back-drive.
    bool holding() const { return powered && torque_enabled; }
};

struct Connector {
    std::string id;
    ConnectorState state = ConnectorState::FemaleLock;
    ServoModel servo;
    std::optional<std::string> engaged_with;

    // Segment in progress (adjacent target) and how long the shaft has stalled on it.
    std::optional<ConnectorState> moving_to;
    std::int64_t stall_ticks = 0;
};

Connector make_connector(std::string id, const ServoConfig& cfg, ConnectorState state = ConnectorState::FemaleLock,
                         bool powered = true);

double state_angle(ConnectorState state, const StateAngleTable& table = {});

/// Angle within tolerance of the nominal angle of its state.
bool angle_consistent(const Connector& conn, const ServoConfig& cfg);

enum class TransitionOutcome : std::uint8_t { Completed, Blocked, Unpowered };

struct TransitionReport {
    TransitionOutcome outcome;
    std::vector<ConnectorState> visited;
    double peak_current_ma = 0.0;
};

/// Called once per tick with the signed angle the shaft advanced that tick.
using TickObserver = std::function<void(double angle_delta_deg)>;

/// Drives the connector along the actuation path to `target`, one adjacent
/// segment at a time. `obstructed` puts external resistance on the hooks while
/// they protrude; the fail-safe then retracts to FemaleLock.
TransitionReport command_transition(Connector& conn, ConnectorState target, const ServoConfig& cfg, Trace& trace,
                                    bool obstructed = false, const TickObserver& on_tick = {});

/// Advances a FemaleUnlock -> MaleUnlock segment by one tick and reports
/// whether the current has sat at the goal-current ceiling for the stall
/// window. Returns false for a connector not in that segment.
bool detect_blockage(Connector& conn, bool external_resistance, const ServoConfig& cfg, Trace& trace);

/// Forced motion of an engaged, torque-free connector. The driver turning by
/// +delta turns this shaft by -delta; state follows each nominal angle crossed.
Result<ConnectorState> back_drive(Connector& conn, double driver_angle_delta_deg, const ServoConfig& cfg,
                                  Trace& trace);

}  // namespace latticelink
