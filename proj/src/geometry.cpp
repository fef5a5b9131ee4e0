#include "latticelink/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace latticelink {
namespace {

using Matrix = std::array<Vec3i, 3>;  // rows

struct RotationTable {
    std::array<Matrix, Orientation::kCount> matrices{};
    std::array<std::array<Direction, 6>, Orientation::kCount> faces{};
};

int determinant(const Matrix& m) { return dot(m[0], cross(m[1], m[2])); }

Vec3i multiply(const Matrix& m, Vec3i v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }

// Signed permutation matrices with determinant +1, in a fixed enumeration
// order that starts with the identity.
RotationTable build_table() {
    RotationTable table;
    std::array<int, 3> perm{0, 1, 2};
    std::vector<Matrix> found;
    do {
        for (int signs = 0; signs < 8; ++signs) {
            Matrix m{};
            for (int row = 0; row < 3; ++row) {
                Vec3i r{};
                const int s = (signs >> row) & 1 ? -1 : 1;
                if (perm[row] == 0) r.x = s;
                if (perm[row] == 1) r.y = s;
                if (perm[row] == 2) r.z = s;
                m[row] = r;
            }
            if (determinant(m) == 1) found.push_back(m);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (found.size() != Orientation::kCount) throw std::logic_error("cube rotation group must have 24 elements");

    for (std::size_t i = 0; i < found.size(); ++i) {
        table.matrices[i] = found[i];
        for (auto d : kAllDirections) {
            table.faces[i][index_of(d)] = *direction_from_normal(multiply(found[i], normal(d)));
        }
    }
    return table;
}

const RotationTable& rotations() {
    static const RotationTable table = build_table();
    return table;
}

// In-plane reference axis carried by each local face, for yaw bookkeeping.
Direction reference_axis(Direction face) {
    switch (face) {
        case Direction::PosX:
        case Direction::NegX: return Direction::PosY;
        case Direction::PosY:
        case Direction::NegY: return Direction::PosZ;
        case Direction::PosZ:
        case Direction::NegZ: return Direction::PosX;
    }
    return Direction::PosX;
}

}  // namespace

Vec3i normal(Direction d) {
    switch (d) {
        case Direction::PosX: return {1, 0, 0};
        case Direction::NegX: return {-1, 0, 0};
        case Direction::PosY: return {0, 1, 0};
        case Direction::NegY: return {0, -1, 0};
        case Direction::PosZ: return {0, 0, 1};
        case Direction::NegZ: return {0, 0, -1};
    }
    return {};
}

Direction opposite(Direction d) { return static_cast<Direction>(index_of(d) ^ 1U); }

std::optional<Direction> direction_from_normal(Vec3i v) {
    for (auto d : kAllDirections) {
        if (normal(d) == v) return d;
    }
    return std::nullopt;
}

std::string_view to_string(Direction d) {
    static constexpr std::array<std::string_view, 6> names{"+X", "-X", "+Y", "-Y", "+Z", "-Z"};
    return names[index_of(d)];
}

std::optional<Direction> parse_direction(std::string_view text) {
    for (auto d : kAllDirections) {
        if (to_string(d) == text) return d;
    }
    return std::nullopt;
}

std::string to_string(Cell c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
}

std::optional<Orientation> Orientation::from_index(int index) {
    if (index < 0 || index >= kCount) return std::nullopt;
    return Orientation{index};
}

Direction Orientation::to_world(Direction local) const { return rotations().faces[index_][index_of(local)]; }

Direction Orientation::to_local(Direction world) const {
    const auto& faces = rotations().faces[index_];
    for (auto d : kAllDirections) {
        if (faces[index_of(d)] == world) return d;
    }
    throw std::logic_error("orientation face table is not a permutation");
}

Vec3i Orientation::rotate(Vec3i v) const { return multiply(rotations().matrices[index_], v); }

const std::array<Direction, 6>& Orientation::face_table() const { return rotations().faces[index_]; }

int relative_yaw_quarters(Orientation a, Direction local_face_a, Orientation b, Direction local_face_b) {
    const Vec3i n = normal(a.to_world(local_face_a));
    if (normal(b.to_world(local_face_b)) != -n) throw std::invalid_argument("faces do not oppose");
    Vec3i u = a.rotate(normal(reference_axis(local_face_a)));
    const Vec3i target = b.rotate(normal(reference_axis(local_face_b)));
    for (int k = 0; k < 4; ++k) {
        if (u == target) return k;
        u = cross(n, u);
    }
    throw std::logic_error("reference axes are not coplanar");
}

}  // namespace latticelink
