#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "chronoscale/cli.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("chronoscale");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CHRONOSCALE_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only honour names it knows.
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace chronoscale;
    configure_logging();

    CLI::App app{"Solve and verify dynamic equations on time scales"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "chronoscale 0.1.0");

    const std::map<std::string, cli::Format> formats{{"csv", cli::Format::Csv}, {"json", cli::Format::Json}};

    cli::SolveArgs solve;
    std::string batch_dir;
    unsigned jobs = 0;
    std::string out_path;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario and write its trajectory");
    auto* solve_file = solve_cmd->add_option("scenario", solve.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
    auto* batch_opt = solve_cmd->add_option("--batch", batch_dir, "Solve every *.json in a directory")
                          ->check(CLI::ExistingDirectory)
                          ->excludes(solve_file);
    solve_file->excludes(batch_opt);
    solve_cmd->add_option("-o,--out", out_path, "Output file (directory with --batch); stdout when omitted");
    solve_cmd->add_option("-f,--format", solve.format, "csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->default_str("csv");
    solve_cmd->add_option("-j,--jobs", jobs, "Parallel workers for --batch (default: all cores)");

    cli::ClassifyArgs classify;
    std::vector<double> window;
    auto* classify_cmd = app.add_subcommand("classify", "List segments and scattered points of the scenario's scale");
    classify_cmd->add_option("scenario", classify.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("-w,--window", window, "Window t_lo t_hi (default [t0, t_end])")->expected(2);
    classify_cmd->add_flag("--json", classify.json, "Emit JSON instead of a table");

    std::filesystem::path verify_file;
    auto* verify_cmd = app.add_subcommand("verify", "Check the existence theorem by Picard iteration");
    verify_cmd->add_option("scenario", verify_file, "Scenario JSON file with theorem inputs")
        ->required()
        ->check(CLI::ExistingFile);

    cli::CompareArgs compare;
    std::string measure;
    const std::map<std::string, Norm> norms{{"sup", Norm::Sup}, {"l2", Norm::L2}};
    auto* compare_cmd = app.add_subcommand("compare", "Compare the solver against an oracle");
    compare_cmd->add_option("scenario", compare.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--oracle", compare.oracle, "recursion, reference or closed-form:NAME")
        ->default_str("recursion");
    compare_cmd->add_option("--tol", compare.tolerance, "Pass threshold");
    compare_cmd->add_option("--oracle-t-end", compare.oracle_t_end, "Run the oracle to this time instead of t_end");
    compare_cmd->add_option("--norm", compare.norm, "sup or l2")
        ->transform(CLI::CheckedTransformer(norms, CLI::ignore_case))
        ->default_str("sup");
    compare_cmd->add_option("--measure", measure, "absolute or relative (default depends on the oracle)")
        ->check(CLI::IsMember({"absolute", "relative"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version exit 0; every usage error is an input error.
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitSchema;
    }

    if (solve_cmd->parsed()) {
        if (!batch_dir.empty()) {
            if (out_path.empty()) {
                std::cerr << "solve --batch needs --out DIR\n";
                return cli::kExitSchema;
            }
            return cli::cmd_solve_batch({batch_dir, out_path, solve.format, jobs}, std::cerr);
        }
        if (solve.scenario.empty()) {
            std::cerr << "solve needs a scenario file or --batch DIR\n";
            return cli::kExitSchema;
        }
        if (!out_path.empty()) solve.out = out_path;
        return cli::cmd_solve(solve, std::cout, std::cerr);
    }
    if (classify_cmd->parsed()) {
        if (window.size() == 2) classify.window = std::pair{window[0], window[1]};
        return cli::cmd_classify(classify, std::cout, std::cerr);
    }
    if (verify_cmd->parsed()) return cli::cmd_verify(verify_file, std::cout, std::cerr);
    if (compare_cmd->parsed()) {
        if (!measure.empty()) {
            compare.measure = measure == "absolute" ? ErrorMeasure::Absolute : ErrorMeasure::Relative;
        }
        return cli::cmd_compare(compare, std::cout, std::cerr);
    }
    return cli::kExitSchema;
}
