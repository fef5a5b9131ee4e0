#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "latticelink/planner.hpp"
#include "latticelink/world.hpp"

namespace latticelink {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kPlanSchemaVersion = 1;

/// Malformed or schema-invalid input file.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadStep {
    FaceAddress face;
    LoadVector load;
    std::optional<bool> expect_holds;
};

/// Fault injection: mark a module as malfunctioning (or repaired).
struct FailStep {
    std::string module;
    bool failed = true;
};

struct ScriptStep {
    std::variant<Action, LoadStep, FailStep> op;
    std::optional<Misalignment> misalignment;  // couple only; overrides the policy
    std::optional<Errc> expect;                // expected protocol failure
};

struct MisalignmentPolicy {
    enum class Mode : std::uint8_t { Fixed, Random };
    Mode mode = Mode::Fixed;
    Misalignment fixed;
    Misalignment envelope;  // uniform in [-envelope, +envelope] per axis
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    World world;
    MisalignmentPolicy misalignment;
    std::vector<ScriptStep> script;
};

nlohmann::json config_to_json(const WorldConfig& cfg);
/// Merges a (possibly partial) config object over `cfg`.
void merge_config(WorldConfig& cfg, const nlohmann::json& j);
/// Applies "section.key=value" (value parsed as JSON, else taken as a string).
void apply_override(WorldConfig& cfg, const std::string& assignment);

nlohmann::json world_to_json(const World& world);
World world_from_json(const nlohmann::json& j, WorldConfig cfg);

nlohmann::json action_to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j, const std::vector<std::string>& overrides = {});

nlohmann::json read_json_file(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
Plan load_plan(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace latticelink
