#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "latticelink/connector_state.hpp"

namespace latticelink {

enum class EventKind : std::uint8_t { StateChange, CurrentSample, JointEvent, Action, Error };

/// What moved the hooks. Back-driven motion is not a servo command.
enum class DriveCause : std::uint8_t { Commanded, BackDriven, FailSafe };

std::string_view to_string(EventKind kind);
std::string_view to_string(DriveCause cause);

struct StateChange {
    ConnectorState from;
    ConnectorState to;
    DriveCause cause;
};

struct CurrentSample {
    ConnectorState state;
    double angle_deg;
    double current_ma;
    double current_limit_ma;
};

struct Note {
    std::string tag;   // e.g. "created", "destroyed", "torque-release", error code
    std::string text;
};

struct Event {
    std::int64_t tick = 0;
    double time_s = 0.0;
    std::string subject;
    EventKind kind = EventKind::Action;
    std::variant<StateChange, CurrentSample, Note> payload;
};

/// Simulation clock plus the ordered event stream. Time is kept as an integer
/// tick count so identical schedules give bit-identical timestamps.
class Trace {
public:
    explicit Trace(double dt_s = 0.01, bool recording = true) : dt_(dt_s), recording_(recording) {}

    double dt() const { return dt_; }
    std::int64_t tick() const { return tick_; }
    double now() const { return static_cast<double>(tick_) * dt_; }
    void advance(std::int64_t ticks = 1) { tick_ += ticks; }

    bool recording() const { return recording_; }
    void set_recording(bool on) { recording_ = on; }

    void state_change(std::string_view subject, ConnectorState from, ConnectorState to, DriveCause cause);
    void current_sample(std::string_view subject, ConnectorState state, double angle_deg, double current_ma,
                        double limit_ma);
    void joint_event(std::string_view subject, std::string tag, std::string text = {});
    void action(std::string_view subject, std::string text);
    void error(std::string_view subject, std::string tag, std::string text = {});

    const std::vector<Event>& events() const { return events_; }
    void clear() { events_.clear(); }

private:
    void push(std::string_view subject, EventKind kind, decltype(Event::payload) payload);

    double dt_;
    std::int64_t tick_ = 0;
    bool recording_;
    std::vector<Event> events_;
};

/// State-change records for one subject, reduced to the sequence of states it
/// occupied (first `from`, then every `to`).
std::vector<ConnectorState> state_history(const Trace& trace, std::string_view subject);

/// Same, restricted to transitions with the given cause.
std::vector<StateChange> state_changes(const Trace& trace, std::string_view subject);

}  // namespace latticelink
