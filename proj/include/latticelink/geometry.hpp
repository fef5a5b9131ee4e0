#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace latticelink {

/// Lattice pitch between neighbouring cell centres.
inline constexpr double kCellPitchMm = 120.0;

/// Face normals. Used both for a module's local faces and for world directions.
enum class Direction : std::uint8_t { PosX = 0, NegX = 1, PosY = 2, NegY = 3, PosZ = 4, NegZ = 5 };

inline constexpr std::array<Direction, 6> kAllDirections = {Direction::PosX, Direction::NegX, Direction::PosY,
                                                            Direction::NegY, Direction::PosZ, Direction::NegZ};

struct Vec3i {
    int x = 0;
    int y = 0;
    int z = 0;

    auto operator<=>(const Vec3i&) const = default;
};

constexpr Vec3i operator+(Vec3i a, Vec3i b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3i operator-(Vec3i a, Vec3i b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3i operator-(Vec3i a) { return {-a.x, -a.y, -a.z}; }
constexpr int dot(Vec3i a, Vec3i b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3i cross(Vec3i a, Vec3i b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

using Cell = Vec3i;

constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }
Vec3i normal(Direction d);
Direction opposite(Direction d);
std::optional<Direction> direction_from_normal(Vec3i v);
inline Cell neighbor(Cell c, Direction d) { return c + normal(d); }

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);
std::string to_string(Cell c);

/// One of the 24 proper rotations of the cube, stored as an index into a
/// fixed table. Index 0 is the identity.
class Orientation {
public:
    static constexpr int kCount = 24;

    constexpr Orientation() = default;
    static std::optional<Orientation> from_index(int index);

    int index() const { return index_; }
    Direction to_world(Direction local) const;
    Direction to_local(Direction world) const;
    Vec3i rotate(Vec3i v) const;

    /// Face-permutation table: world direction of each local face.
    const std::array<Direction, 6>& face_table() const;

    bool operator==(const Orientation&) const = default;

private:
    explicit constexpr Orientation(int index) : index_(index) {}
    int index_ = 0;
};

/// Relative yaw, in quarter turns about the mating normal, between two
/// opposing faces. Connectors are 90-degree symmetric so any value mates.
int relative_yaw_quarters(Orientation a, Direction local_face_a, Orientation b, Direction local_face_b);

}  // namespace latticelink
