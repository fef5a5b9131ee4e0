#include "latticelink/connector.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace latticelink {
namespace {

// Accumulated per-tick steps drift; anything this close to a target angle is
// snapped onto it.
constexpr double kSnapEpsilonDeg = 1e-9;

bool is_protrusion_segment(ConnectorState from, ConnectorState to) {
    return from == ConnectorState::FemaleUnlock && to == ConnectorState::MaleUnlock;
}

double contact_angle(const ServoConfig& cfg) {
    const double start = cfg.angles.angle(ConnectorState::FemaleUnlock);
    const double end = cfg.angles.angle(ConnectorState::MaleUnlock);
    return start + cfg.contact_fraction * (end - start);
}

void begin_segment(Connector& conn, ConnectorState next, const ServoConfig& cfg) {
    conn.moving_to = next;
    conn.stall_ticks = 0;
    conn.servo.goal_angle_deg = cfg.angles.angle(next);
    conn.servo.goal_current_limit_ma = is_protrusion_segment(conn.state, next) ? cfg.protrusion_current_limit_ma
                                                                               : cfg.nominal_current_limit_ma;
}

void end_segment(Connector& conn, const ServoConfig& cfg) {
    conn.moving_to.reset();
    conn.stall_ticks = 0;
    conn.servo.goal_current_limit_ma = cfg.nominal_current_limit_ma;
}

void sample(const Connector& conn, Trace& trace) {
    trace.current_sample(conn.id, conn.state, conn.servo.angle_deg, conn.servo.measured_current_ma,
                         conn.servo.goal_current_limit_ma);
}

// One tick of position control toward goal_angle. Returns true once the shaft
// has been stalled against resistance with the current at its ceiling for the
// whole stall window.
bool step_servo(Connector& conn, bool resistance, const ServoConfig& cfg, Trace& trace) {
    auto& servo = conn.servo;
    const double remaining = servo.goal_angle_deg - servo.angle_deg;
    const double max_step = servo.speed_deg_s * cfg.dt_s;

    bool stalled = false;
    if (resistance && remaining > 0.0) {
        const double contact = contact_angle(cfg);
        if (servo.angle_deg >= contact) {
            stalled = true;
        } else if (contact - servo.angle_deg <= max_step + kSnapEpsilonDeg) {
            servo.angle_deg = contact;
        } else {
            servo.angle_deg += max_step;
        }
    } else if (std::abs(remaining) <= max_step + kSnapEpsilonDeg) {
        servo.angle_deg = servo.goal_angle_deg;
    } else {
        servo.angle_deg += remaining > 0.0 ? max_step : -max_step;
    }

    const std::int64_t window = cfg.stall_window_ticks();
    double current = cfg.idle_current_ma;
    if (stalled) {
        ++conn.stall_ticks;
        const double ramp = std::min(1.0, static_cast<double>(conn.stall_ticks) / static_cast<double>(window));
        current = cfg.idle_current_ma + (servo.goal_current_limit_ma - cfg.idle_current_ma) * ramp;
    } else {
        conn.stall_ticks = 0;
    }
    servo.measured_current_ma = std::min(current, servo.goal_current_limit_ma);

    trace.advance();
    sample(conn, trace);
    return stalled && conn.stall_ticks >= window && servo.measured_current_ma >= servo.goal_current_limit_ma;
}

void hold_stage(Connector& conn, const ServoConfig& cfg, Trace& trace) {
    const std::int64_t ticks = cfg.stage_delay_ticks();
    for (std::int64_t i = 0; i < ticks; ++i) {
        conn.servo.measured_current_ma = cfg.idle_current_ma;
        trace.advance();
        sample(conn, trace);
    }
}

// Drives the current segment to completion. Returns false if the fail-safe fired.
bool run_segment(Connector& conn, bool obstructed, const ServoConfig& cfg, Trace& trace, const TickObserver& on_tick,
                 double& peak) {
    const bool protruding = is_protrusion_segment(conn.state, *conn.moving_to);
    while (conn.servo.angle_deg != conn.servo.goal_angle_deg) {
        const double before = conn.servo.angle_deg;
        const bool blocked = protruding ? detect_blockage(conn, obstructed, cfg, trace)
                                        : step_servo(conn, false, cfg, trace);
        peak = std::max(peak, conn.servo.measured_current_ma);
        if (on_tick) on_tick(conn.servo.angle_deg - before);
        if (blocked) return false;
    }
    return true;
}

void retract_to_female_lock(Connector& conn, const ServoConfig& cfg, Trace& trace, TransitionReport& report) {
    while (conn.state != ConnectorState::FemaleLock ||
           conn.servo.angle_deg != cfg.angles.angle(ConnectorState::FemaleLock)) {
        const ConnectorState next =
            conn.state == ConnectorState::FemaleLock ? conn.state : state_at(path_index(conn.state) - 1);
        const ConnectorState from = conn.state;
        begin_segment(conn, next, cfg);
        while (conn.servo.angle_deg != conn.servo.goal_angle_deg) {
            step_servo(conn, false, cfg, trace);
            report.peak_current_ma = std::max(report.peak_current_ma, conn.servo.measured_current_ma);
        }
        end_segment(conn, cfg);
        if (next != from) {
            trace.state_change(conn.id, from, next, DriveCause::FailSafe);
            conn.state = next;
            report.visited.push_back(next);
        }
    }
}

}  // namespace

bool StateAngleTable::strictly_increasing() const {
    for (std::size_t i = 0; i + 1 < degrees.size(); ++i) {
        if (!(degrees[i] < degrees[i + 1])) return false;
    }
    return true;
}

std::int64_t ServoConfig::stall_window_ticks() const {
    return std::max<std::int64_t>(1, std::llround(stall_window_s / dt_s));
}

std::int64_t ServoConfig::stage_delay_ticks() const {
    return std::max<std::int64_t>(0, std::llround(stage_delay_s / dt_s));
}

Connector make_connector(std::string id, const ServoConfig& cfg, ConnectorState state, bool powered) {
    Connector conn;
    conn.id = std::move(id);
    conn.state = state;
    conn.servo.angle_deg = cfg.angles.angle(state);
    conn.servo.goal_angle_deg = conn.servo.angle_deg;
    conn.servo.goal_current_limit_ma = cfg.nominal_current_limit_ma;
    conn.servo.powered = powered;
    conn.servo.speed_deg_s = cfg.speed_deg_s;
    return conn;
}

double state_angle(ConnectorState state, const StateAngleTable& table) { return table.angle(state); }

bool angle_consistent(const Connector& conn, const ServoConfig& cfg) {
    return std::abs(conn.servo.angle_deg - cfg.angles.angle(conn.state)) <= cfg.angle_tolerance_deg;
}

bool detect_blockage(Connector& conn, bool external_resistance, const ServoConfig& cfg, Trace& trace) {
    if (!conn.servo.powered || !conn.moving_to || !is_protrusion_segment(conn.state, *conn.moving_to)) {
        return false;
    }
    return step_servo(conn, external_resistance, cfg, trace);
}

TransitionReport command_transition(Connector& conn, ConnectorState target, const ServoConfig& cfg, Trace& trace,
                                    bool obstructed, const TickObserver& on_tick) {
    TransitionReport report{TransitionOutcome::Completed, {conn.state}, 0.0};
    if (!conn.servo.powered) {
        report.outcome = TransitionOutcome::Unpowered;
        return report;
    }
    conn.servo.torque_enabled = true;

    const auto path = path_between(conn.state, target);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const ConnectorState next = path[i];
        begin_segment(conn, next, cfg);
        if (!run_segment(conn, obstructed, cfg, trace, on_tick, report.peak_current_ma)) {
            trace.error(conn.id, std::string(to_string(Errc::Blocked)),
                        "goal current ceiling held for the stall window; retracting");
            end_segment(conn, cfg);
            retract_to_female_lock(conn, cfg, trace, report);
            report.outcome = TransitionOutcome::Blocked;
            return report;
        }
        end_segment(conn, cfg);
        trace.state_change(conn.id, conn.state, next, DriveCause::Commanded);
        conn.state = next;
        report.visited.push_back(next);
        hold_stage(conn, cfg, trace);
    }
    return report;
}

Result<ConnectorState> back_drive(Connector& conn, double driver_angle_delta_deg, const ServoConfig& cfg,
                                  Trace& trace) {
    if (conn.servo.holding()) {
        return Failure{Errc::BackDriveResisted, conn.id + " is powered and holding position"};
    }
    if (!conn.engaged_with) {
        return Failure{Errc::NotEngaged, conn.id + " has no engaged peer"};
    }

    const double lo = cfg.angles.angle(ConnectorState::FemaleLock);
    const double hi = cfg.angles.angle(ConnectorState::MaleLock);
    double angle = std::clamp(conn.servo.angle_deg - driver_angle_delta_deg, lo, hi);
    for (auto s : kAllStates) {
        if (std::abs(angle - cfg.angles.angle(s)) < kSnapEpsilonDeg) angle = cfg.angles.angle(s);
    }
    conn.servo.angle_deg = angle;
    conn.servo.goal_angle_deg = angle;
    conn.servo.measured_current_ma = 0.0;

    int idx = path_index(conn.state);
    while (idx > 0 && angle <= cfg.angles.angle(state_at(idx - 1))) {
        trace.state_change(conn.id, state_at(idx), state_at(idx - 1), DriveCause::BackDriven);
        --idx;
    }
    while (idx < 3 && angle >= cfg.angles.angle(state_at(idx + 1))) {
        trace.state_change(conn.id, state_at(idx), state_at(idx + 1), DriveCause::BackDriven);
        ++idx;
    }
    conn.state = state_at(idx);
    if (driver_angle_delta_deg != 0.0) sample(conn, trace);
    return conn.state;
}

}  // namespace latticelink
