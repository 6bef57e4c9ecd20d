#pragma once

// Parameterized right-hand-side laws that scenario files may reference.
// All laws act elementwise on the state unless noted.

#include <string_view>
#include <variant>
#include <vector>

#include "chronoscale/dynamics.hpp"

namespace chronoscale::catalog {

/// rate * y + forcing. rate has 1 entry (scalar) or n*n entries (row-major
/// matrix); forcing is empty or has n entries.
struct Linear {
    std::vector<double> rate{1.0};
    std::vector<double> forcing;
    bool operator==(const Linear&) const = default;
};

/// r * y * (1 - y / capacity)
struct Logistic {
    double r = 1.0;
    double capacity = 1.0;
    bool operator==(const Logistic&) const = default;
};

/// sum_i coefficients[i] * y^i
struct Polynomial {
    std::vector<double> coefficients{0.0};
    bool operator==(const Polynomial&) const = default;
};

/// A fixed vector, independent of (t, y).
struct Constant {
    std::vector<double> value{0.0};
    bool operator==(const Constant&) const = default;
};

/// A fixed vector; meant as an assignment-kind transition that resets the state.
struct Reset {
    std::vector<double> value{0.0};
    bool operator==(const Reset&) const = default;
};

}  // namespace chronoscale::catalog

namespace chronoscale {

using FunctionSpec =
    std::variant<catalog::Linear, catalog::Logistic, catalog::Polynomial, catalog::Constant, catalog::Reset>;

[[nodiscard]] std::string_view function_name(const FunctionSpec& spec) noexcept;

/// Checks parameter shapes against the state dimension; throws
/// Error(InvalidSpec) naming the offending parameter.
void validate_function(const FunctionSpec& spec, Eigen::Index dimension);

[[nodiscard]] RhsFunction instantiate(const FunctionSpec& spec, Eigen::Index dimension);

}  // namespace chronoscale
