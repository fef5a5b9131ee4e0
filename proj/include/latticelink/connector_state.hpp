#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace latticelink {

/// The four hook positions of the sequential-hermaphrodite connector, in
/// actuation-path order. Only neighbours on this path are reachable in one step.
enum class ConnectorState : std::uint8_t {
    FemaleLock = 0,
    FemaleUnlock = 1,
    MaleUnlock = 2,
    MaleLock = 3,
};

inline constexpr std::array<ConnectorState, 4> kAllStates = {
    ConnectorState::FemaleLock, ConnectorState::FemaleUnlock,
    ConnectorState::MaleUnlock, ConnectorState::MaleLock};

constexpr int path_index(ConnectorState s) { return static_cast<int>(s); }

constexpr ConnectorState state_at(int index) { return static_cast<ConnectorState>(index); }

/// Hooks and shroud are housed below the face plane.
constexpr bool is_flat(ConnectorState s) {
    return s == ConnectorState::FemaleLock || s == ConnectorState::FemaleUnlock;
}

constexpr bool is_male(ConnectorState s) { return !is_flat(s); }

constexpr bool are_adjacent(ConnectorState a, ConnectorState b) {
    const int d = path_index(a) - path_index(b);
    return d == 1 || d == -1;
}

/// States visited walking from `from` to `to`, both ends included.
std::vector<ConnectorState> path_between(ConnectorState from, ConnectorState to);

std::string_view to_string(ConnectorState s);
std::optional<ConnectorState> parse_connector_state(std::string_view name);

}  // namespace latticelink
