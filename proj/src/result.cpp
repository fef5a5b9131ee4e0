#include "latticelink/result.hpp"

#include <array>
#include <utility>

namespace latticelink {
namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 25> kErrcNames{{
    {Errc::Unpowered, "Unpowered"},
    {Errc::Blocked, "Blocked"},
    {Errc::BackDriveResisted, "BackDriveResisted"},
    {Errc::NotEngaged, "NotEngaged"},
    {Errc::Misaligned, "Misaligned"},
    {Errc::TargetNotFemale, "TargetNotFemale"},
    {Errc::InitiatorUnpowered, "InitiatorUnpowered"},
    {Errc::InitiatorNotActive, "InitiatorNotActive"},
    {Errc::InitiatorNotReady, "InitiatorNotReady"},
    {Errc::Blank, "Blank"},
    {Errc::MaleUnpowered, "MaleUnpowered"},
    {Errc::FemaleUnpowered, "FemaleUnpowered"},
    {Errc::FemaleSideNotActive, "FemaleSideNotActive"},
    {Errc::NotLocked, "NotLocked"},
    {Errc::CellOccupied, "CellOccupied"},
    {Errc::UnknownModule, "UnknownModule"},
    {Errc::NotAdjacent, "NotAdjacent"},
    {Errc::ModuleJointed, "ModuleJointed"},
    {Errc::ModuleAnchored, "ModuleAnchored"},
    {Errc::SlideBlocked, "SlideBlocked"},
    {Errc::NoJoint, "NoJoint"},
    {Errc::FloatingStructure, "FloatingStructure"},
    {Errc::OutOfRegion, "OutOfRegion"},
    {Errc::HashMismatch, "HashMismatch"},
    {Errc::GoalMismatch, "GoalMismatch"},
}};

}  // namespace

std::string_view to_string(Errc code) {
    for (const auto& [c, name] : kErrcNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

std::optional<Errc> parse_errc(std::string_view name) {
    for (const auto& [c, n] : kErrcNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::string Failure::message() const {
    std::string out{to_string(code)};
    if (!detail.empty()) {
        out += ": ";
        out += detail;
    }
    return out;
}

}  // namespace latticelink
