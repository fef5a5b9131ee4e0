#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace latticelink {

/// Failure codes shared by the connector, protocol, world and planner layers.
enum class Errc : std::uint8_t {
    // connector
    Unpowered,
    Blocked,
    BackDriveResisted,
    NotEngaged,
    // coupling protocols
    Misaligned,
    TargetNotFemale,
    InitiatorUnpowered,
    InitiatorNotActive,
    InitiatorNotReady,
    Blank,
    MaleUnpowered,
    FemaleUnpowered,
    FemaleSideNotActive,
    NotLocked,
    // lattice world
    CellOccupied,
    UnknownModule,
    NotAdjacent,
    ModuleJointed,
    ModuleAnchored,
    SlideBlocked,
    NoJoint,
    FloatingStructure,
    OutOfRegion,
    HashMismatch,
    GoalMismatch,
};

std::string_view to_string(Errc code);
std::optional<Errc> parse_errc(std::string_view name);

struct Failure {
    Errc code;
    std::string detail;

    std::string message() const;
};

/// Value-or-failure return used by every fallible domain operation. Protocol
/// failures are ordinary outcomes here (the planner probes thousands of them),
/// so they are not thrown.
template <class T>
class Result {
public:
    Result(T value) : data_(std::move(value)) {}
    Result(Failure failure) : data_(std::move(failure)) {}
    Result(Errc code, std::string detail = {}) : data_(Failure{code, std::move(detail)}) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::logic_error("Result::value on failure: " + failure().message());
        return std::get<T>(data_);
    }
    T& value() & {
        if (!ok()) throw std::logic_error("Result::value on failure: " + failure().message());
        return std::get<T>(data_);
    }
    T&& value() && {
        if (!ok()) throw std::logic_error("Result::value on failure: " + failure().message());
        return std::get<T>(std::move(data_));
    }
    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

    const Failure& failure() const& { return std::get<Failure>(data_); }
    Errc code() const { return failure().code; }

private:
    std::variant<T, Failure> data_;
};

using Status = Result<std::monostate>;

inline Status ok_status() { return Status{std::monostate{}}; }

}  // namespace latticelink
