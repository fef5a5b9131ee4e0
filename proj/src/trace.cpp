#include "latticelink/trace.hpp"

#include <utility>

namespace latticelink {

std::vector<ConnectorState> path_between(ConnectorState from, ConnectorState to) {
    std::vector<ConnectorState> out;
    const int a = path_index(from);
    const int b = path_index(to);
    const int step = a <= b ? 1 : -1;
    for (int i = a;; i += step) {
        out.push_back(state_at(i));
        if (i == b) break;
    }
    return out;
}

std::string_view to_string(ConnectorState s) {
    switch (s) {
        case ConnectorState::FemaleLock: return "FemaleLock";
        case ConnectorState::FemaleUnlock: return "FemaleUnlock";
        case ConnectorState::MaleUnlock: return "MaleUnlock";
        case ConnectorState::MaleLock: return "MaleLock";
    }
    return "?";
}

std::optional<ConnectorState> parse_connector_state(std::string_view name) {
    for (auto s : kAllStates) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::StateChange: return "state-change";
        case EventKind::CurrentSample: return "current-sample";
        case EventKind::JointEvent: return "joint-event";
        case EventKind::Action: return "action";
        case EventKind::Error: return "error";
    }
    return "?";
}

std::string_view to_string(DriveCause cause) {
    switch (cause) {
        case DriveCause::Commanded: return "commanded";
        case DriveCause::BackDriven: return "back-driven";
        case DriveCause::FailSafe: return "fail-safe";
    }
    return "?";
}

void Trace::push(std::string_view subject, EventKind kind, decltype(Event::payload) payload) {
    if (!recording_) return;
    Event e;
    e.tick = tick_;
    e.time_s = now();
    e.subject = std::string(subject);
    e.kind = kind;
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
}

void Trace::state_change(std::string_view subject, ConnectorState from, ConnectorState to, DriveCause cause) {
    push(subject, EventKind::StateChange, StateChange{from, to, cause});
}

void Trace::current_sample(std::string_view subject, ConnectorState state, double angle_deg, double current_ma,
                           double limit_ma) {
    push(subject, EventKind::CurrentSample, CurrentSample{state, angle_deg, current_ma, limit_ma});
}

void Trace::joint_event(std::string_view subject, std::string tag, std::string text) {
    push(subject, EventKind::JointEvent, Note{std::move(tag), std::move(text)});
}

void Trace::action(std::string_view subject, std::string text) {
    push(subject, EventKind::Action, Note{"action", std::move(text)});
}

void Trace::error(std::string_view subject, std::string tag, std::string text) {
    push(subject, EventKind::Error, Note{std::move(tag), std::move(text)});
}

std::vector<StateChange> state_changes(const Trace& trace, std::string_view subject) {
    std::vector<StateChange> out;
    for (const auto& e : trace.events()) {
        if (e.kind == EventKind::StateChange && e.subject == subject) {
            out.push_back(std::get<StateChange>(e.payload));
        }
    }
    return out;
}

std::vector<ConnectorState> state_history(const Trace& trace, std::string_view subject) {
    std::vector<ConnectorState> out;
    for (const auto& c : state_changes(trace, subject)) {
        if (out.empty()) out.push_back(c.from);
        out.push_back(c.to);
    }
    return out;
}

}  // namespace latticelink
