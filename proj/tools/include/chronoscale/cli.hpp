#pragma once

// Subcommand bodies for the chronoscale executable. Each returns the process
// exit code: 0 on success, 1 when the scenario fails validation, 2 when a
// solver, verifier or oracle reports an error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "chronoscale/existence.hpp"
#include "chronoscale/oracle.hpp"
#include "chronoscale/scenario.hpp"

namespace chronoscale::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitFailure = 2;

enum class Format { Csv, Json };

/// Shortest representation that reads back to the same double.
[[nodiscard]] std::string format_number(double v);

/// Header t,y1..yn,jump; the jump column holds sigma(t) on rows where a
/// transition fires and is empty elsewhere.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);
[[nodiscard]] nlohmann::ordered_json trajectory_json(const Scenario& scenario, const Trajectory& traj);

/// Runs the solver that matches the scenario (state-dependent when a
/// state_domain is given).
[[nodiscard]] Trajectory run_scenario(const Scenario& scenario);

struct SolveArgs {
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> out;  // stdout when empty
    Format format = Format::Csv;
};
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);

struct BatchArgs {
    std::filesystem::path directory;  // every *.json inside, in name order
    std::filesystem::path out_dir;
    Format format = Format::Csv;
    unsigned workers = 0;  // 0: hardware concurrency
};
/// Exit code is the largest code of any scenario.
int cmd_solve_batch(const BatchArgs& args, std::ostream& err);

struct ClassifyArgs {
    std::filesystem::path scenario;
    std::optional<std::pair<double, double>> window;  // [t0, t_end] when empty
    bool json = false;
};
int cmd_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err);

int cmd_verify(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

struct CompareArgs {
    std::filesystem::path scenario;
    std::string oracle = "recursion";  // recursion | reference | closed-form:NAME
    std::optional<double> tolerance;
    std::optional<double> oracle_t_end;
    Norm norm = Norm::Sup;
    std::optional<ErrorMeasure> measure;
};
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

}  // namespace chronoscale::cli
