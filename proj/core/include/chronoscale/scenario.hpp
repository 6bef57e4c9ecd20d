#pragma once

// Scenario documents: a JSON description of a time scale, a right-hand side
// drawn from the catalog, initial data, solver options and optional
// existence-check inputs. The schema lives in schema/scenario.schema.json.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronoscale/catalog.hpp"
#include "chronoscale/dynamics.hpp"
#include "chronoscale/existence.hpp"
#include "chronoscale/time_scale.hpp"

namespace chronoscale {

/// Schema violation at a JSON field path such as "scale.pieces[1]".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message);
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct TheoremSpec {
    double a = 1.0;
    double b = 1.0;
    double epsilon = 0.1;
    std::optional<double> M;  // analytic bounds; estimated by sampling when absent
    std::optional<double> N;
    std::optional<double> L;
    std::size_t max_iter = 100;
    double tolerance = 1e-11;
    double nodes_per_unit = 64.0;
    bool operator==(const TheoremSpec&) const = default;
};

namespace domain {

/// Every state sees the scenario's own scale.
struct Constant {
    bool operator==(const Constant&) const = default;
};

/// D_x = (-inf, at] U [at + coefficient * |x|, inf); the real line when the gap is zero.
struct StateGap {
    double at = 0.0;
    double coefficient = 1.0;
    bool operator==(const StateGap&) const = default;
};

}  // namespace domain

using StateDomainSpec = std::variant<domain::Constant, domain::StateGap>;

struct Scenario {
    std::string name;
    std::string description;
    ScaleSpec scale;
    double snap_tolerance = 0.0;
    FunctionSpec f;
    FunctionSpec J;
    TransitionKind kind = TransitionKind::Increment;
    double t0 = 0.0;
    std::vector<double> y0{1.0};
    double t_end = 1.0;
    SolveOptions options;
    std::optional<TheoremSpec> theorem;
    std::optional<StateDomainSpec> state_domain;

    bool operator==(const Scenario&) const = default;
};

/// Validates and converts; throws SchemaError. When snap_tolerance > 0, t0
/// and t_end are moved onto the nearest scale point within that distance.
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);
[[nodiscard]] Scenario parse_scenario_text(const std::string& text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

[[nodiscard]] nlohmann::ordered_json to_json(const Scenario& scenario);
/// Canonical text form: two-space indent, fixed key order, trailing newline.
[[nodiscard]] std::string emit_scenario(const Scenario& scenario);

[[nodiscard]] TimeScale build_scale(const Scenario& scenario);
[[nodiscard]] PiecewiseRHS build_rhs(const Scenario& scenario);
[[nodiscard]] StateDomain build_domain(const Scenario& scenario);
[[nodiscard]] Vector initial_state(const Scenario& scenario);

}  // namespace chronoscale
