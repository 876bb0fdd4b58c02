// Command-line front end: one subcommand per pipeline stage.
//
// Exit codes: 0 = completed, 1 = completed with drops / skipped models,
// 2 = stage failed outright (bad config, missing artifact, transport failure).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "groundbench/errors.hpp"
#include "groundbench/run.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string run_dir;
    std::optional<long long> seed;
    std::string mode;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "run configuration JSON file")->required();
    cmd->add_option("--run-dir", args.run_dir, "directory that receives run artifacts")
        ->required();
    cmd->add_option("--seed", args.seed, "override the config's seed");
    cmd->add_option("--mode", args.mode, "override the config's item mode")
        ->check(CLI::IsMember({"mcq", "open_ended"}));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace groundbench;

    CLI::App app{"grounded benchmark generation, scoring, and evaluation"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string reference;

    auto* generate = app.add_subcommand(
        "generate", "chunk the grounding docs and generate benchmark items");
    auto* qc = app.add_subcommand("qc", "judge item quality and benchmark diversity");
    auto* eval = app.add_subcommand("eval", "administer the benchmark to evaluated models");
    auto* analyze = app.add_subcommand(
        "analyze", "compare the accuracy matrix against a reference benchmark");
    auto* report = app.add_subcommand("report", "assemble run artifacts into report.json");
    auto* usage = app.add_subcommand("usage", "print token usage and cost per endpoint");

    for (auto* cmd : {generate, qc, eval, analyze, report, usage}) add_common(cmd, args);
    analyze->add_option("--reference", reference,
                        "reference accuracy matrix JSON (default: config's reference_matrix)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return run::kFailed;
    }

    try {
        run::RunConfig config = run::validate_config(args.config);
        if (args.seed) config.seed = *args.seed;
        if (!args.mode.empty()) config.mode = genesis::mode_from_string(args.mode);
        run::RunPaths paths{args.run_dir};

        if (generate->parsed()) return run::cmd_generate(config, paths);
        if (qc->parsed()) return run::cmd_qc(config, paths);
        if (eval->parsed()) return run::cmd_eval(config, paths);
        if (analyze->parsed()) return run::cmd_analyze(config, paths, reference);
        if (report->parsed()) return run::cmd_report(config, paths);
        if (usage->parsed()) return run::cmd_usage(config, paths, std::cout);
        std::cerr << "error: no subcommand\n";
        return run::kFailed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return run::kFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return run::kFailed;
    }
}
