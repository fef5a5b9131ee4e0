// Command-line front end: run scenarios, plan and validate reconfigurations,
// audit world files.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "latticelink/planner.hpp"
#include "latticelink/runner.hpp"
#include "latticelink/scenario.hpp"

namespace ll = latticelink;

namespace {

struct PlanArgs {
    std::string start;
    std::string goal;
    std::size_t budget = 200000;
    std::string out = "plan.json";
    bool exact_ids = false;
    int margin = 1;
    bool no_power = false;
};

ll::GoalMatch match_mode(bool exact) { return exact ? ll::GoalMatch::ExactIds : ll::GoalMatch::ShapeOnly; }

void print_validation(const ll::PlanValidation& v, const ll::Plan& plan) {
    if (v.valid) {
        std::cout << "validation: valid (" << plan.cost() << " actions)\n";
        return;
    }
    std::cout << "validation: invalid at step " << v.step;
    if (v.step < plan.actions.size()) std::cout << " (" << ll::describe(plan.actions[v.step]) << ")";
    std::cout << ": " << v.reason->message() << '\n';
}

int cmd_run(const std::string& path, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
            const std::vector<std::string>& overrides) {
    ll::RunOptions options;
    options.out_dir = std::filesystem::path(out_dir);
    options.seed = seed;
    options.overrides = overrides;
    const auto report = ll::run_scenario_file(path, options);
    for (const auto& d : report.diagnostics) std::cerr << d << '\n';
    if (report.exit_code != ll::kExitInputError) {
        std::cout << "steps: " << report.steps << ", joints: " << report.world.joints().size()
                  << ", events: " << report.world.trace().events().size() << '\n'
                  << "wrote " << (std::filesystem::path(out_dir) / "trace.jsonl").string() << " and "
                  << (std::filesystem::path(out_dir) / "series.csv").string() << '\n';
    }
    return report.exit_code;
}

int cmd_plan(const PlanArgs& args, const std::vector<std::string>& overrides) {
    const auto start = ll::load_scenario(args.start, overrides);
    const auto goal = ll::load_scenario(args.goal, overrides);
    ll::PlannerOptions options;
    options.budget = args.budget;
    options.match = match_mode(args.exact_ids);
    options.region_margin = args.margin;
    options.power_actions = !args.no_power;

    const auto result = ll::plan_reconfiguration(start.world, goal.world, options);
    std::cout << "expanded: " << result.expanded << '\n';
    if (!result.plan) {
        std::cout << "unsolved" << (result.exhausted ? " (search space exhausted)" : " (budget exhausted)") << '\n';
        return ll::kExitFailure;
    }
    const auto& plan = *result.plan;
    std::cout << "plan: " << plan.cost() << " actions\n";
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        std::cout << "  " << i << ": " << ll::describe(plan.actions[i]) << '\n';
    }
    ll::write_json_file(args.out, ll::plan_to_json(plan));
    const auto validation = ll::validate_plan(start.world, plan, goal.world, options.match);
    print_validation(validation, plan);
    return validation.valid ? ll::kExitOk : ll::kExitFailure;
}

int cmd_validate(const std::string& start_path, const std::string& plan_path, const std::string& goal_path,
                 bool exact_ids, const std::vector<std::string>& overrides) {
    const auto start = ll::load_scenario(start_path, overrides);
    const auto goal = ll::load_scenario(goal_path, overrides);
    const auto plan = ll::load_plan(plan_path);
    const auto validation = ll::validate_plan(start.world, plan, goal.world, match_mode(exact_ids));
    print_validation(validation, plan);
    return validation.valid ? ll::kExitOk : ll::kExitFailure;
}

int cmd_check(const std::string& path, const std::vector<std::string>& overrides) {
    const auto scenario = ll::load_scenario(path, overrides);
    auto problems = scenario.world.audit();
    const auto connectivity = scenario.world.connectivity_check();
    for (const auto& id : connectivity.floating) problems.push_back("floating module: " + id);
    std::cout << "modules: " << scenario.world.modules().size() << ", joints: " << scenario.world.joints().size()
              << ", energized: " << scenario.world.propagate_power().size() << '\n';
    for (const auto& p : problems) std::cout << "violation: " << p << '\n';
    std::cout << (problems.empty() ? "ok" : "violations found") << '\n';
    return problems.empty() ? ll::kExitOk : ll::kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice modular-robot coupling simulator and reconfiguration planner"};
    app.require_subcommand(1);
    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "Config override section.key=value (repeatable)");

    std::string run_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Execute a scenario and write trace files");
    run->add_option("scenario", run_path, "Scenario file")->required();
    run->add_option("-o,--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Override the scenario seed");

    PlanArgs plan_args;
    auto* plan = app.add_subcommand("plan", "Plan a reconfiguration from start to goal");
    plan->add_option("start", plan_args.start, "Start world/scenario file")->required();
    plan->add_option("goal", plan_args.goal, "Goal world/scenario file")->required();
    plan->add_option("-b,--budget", plan_args.budget, "Node expansion budget")->check(CLI::PositiveNumber);
    plan->add_option("-o,--out", plan_args.out, "Plan output file");
    plan->add_option("--margin", plan_args.margin, "Search region margin in cells");
    plan->add_flag("--exact-ids", plan_args.exact_ids, "Match module ids, not just shape");
    plan->add_flag("--no-power", plan_args.no_power, "Do not consider power toggles");

    std::string v_start, v_plan, v_goal;
    bool v_exact = false;
    auto* validate = app.add_subcommand("validate", "Replay a plan and check it reaches the goal");
    validate->add_option("start", v_start, "Start world file")->required();
    validate->add_option("plan", v_plan, "Plan file")->required();
    validate->add_option("goal", v_goal, "Goal world file")->required();
    validate->add_flag("--exact-ids", v_exact, "Match module ids, not just shape");

    std::string check_path;
    auto* check = app.add_subcommand("check", "Audit the invariants of a world file");
    check->add_option("world", check_path, "World/scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ll::kExitInputError;
    }

    try {
        if (*run) return cmd_run(run_path, out_dir, seed, overrides);
        if (*plan) return cmd_plan(plan_args, overrides);
        if (*validate) return cmd_validate(v_start, v_plan, v_goal, v_exact, overrides);
        if (*check) return cmd_check(check_path, overrides);
    } catch (const ll::ScenarioError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return ll::kExitInputError;
    }
    return ll::kExitInputError;
}
