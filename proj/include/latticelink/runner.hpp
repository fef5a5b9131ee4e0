#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latticelink/scenario.hpp"

namespace latticelink {

/// Process exit codes shared by the CLI and the Python entry points.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInputError = 2 };

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;  // trace.jsonl + series.csv when set
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

struct RunReport {
    int exit_code = kExitOk;
    std::size_t steps = 0;
    std::vector<std::string> diagnostics;  // unexpected failures, invariant violations
    World world;
};

/// Executes the script through the engine. Unexpected protocol failures and
/// invariant violations make the exit code 1.
RunReport run_scenario(Scenario scenario, const RunOptions& options = {});

/// File entry point: parse problems give exit code 2 with a diagnostic.
RunReport run_scenario_file(const std::filesystem::path& path, const RunOptions& options = {});

nlohmann::json event_to_json(const Event& event);
void write_trace_jsonl(const Trace& trace, std::ostream& out);
/// Angle/current time series, one row per current sample.
void write_series_csv(const Trace& trace, std::ostream& out);

/// Uniform draw in [-1, 1) from a 64-bit generator output; identical on every platform.
double unit_symmetric(std::uint64_t bits);

}  // namespace latticelink
