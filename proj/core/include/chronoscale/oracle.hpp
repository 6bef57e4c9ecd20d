#pragma once

// Reference solutions used to cross-check the solver: exact recursion on
// discrete scales, a step-doubling RK4 reference on dense intervals, and a
// catalog of closed forms. None of these share stepping code with solve_ivp.

#include <string>
#include <string_view>
#include <vector>

#include "chronoscale/delta_calculus.hpp"
#include "chronoscale/dynamics.hpp"
#include "chronoscale/time_scale.hpp"

namespace chronoscale {

enum class OracleMethod { Recursion, ReferenceOde, ClosedForm };

[[nodiscard]] std::string_view to_string(OracleMethod method) noexcept;

struct OracleResult {
    std::vector<Sample> samples;
    OracleMethod method = OracleMethod::Recursion;
    bool guaranteed_exact = false;
    double error_estimate = 0.0;
};

/// Unrolls y(sigma(t)) from the transition law over every point of
/// [t0, t_end). Throws NotDiscrete if any of them is right-dense.
[[nodiscard]] OracleResult discrete_recursion(const TimeScale& ts, const PiecewiseRHS& rhs, double t0,
                                              const Vector& y0, double t_end);

struct ReferenceOptions {
    double tolerance = 1e-12;  // target for the accumulated error estimate
    std::size_t initial_steps = 16;
    std::size_t max_steps = std::size_t{1} << 24;
};

/// Classical RK4 with step doubling and Richardson extrapolation, reported at
/// each requested time (ascending, all >= t0). Throws StiffnessFailure when
/// the step budget runs out.
[[nodiscard]] OracleResult dense_reference(const RhsFunction& f, double t0, const Vector& y0,
                                           const std::vector<double>& times, const ReferenceOptions& opts = {});
[[nodiscard]] OracleResult dense_reference(const RhsFunction& f, double t0, const Vector& y0, double t_end,
                                           const ReferenceOptions& opts = {});

struct ClosedFormParams {
    double lambda = 1.0;
    double h = 1.0;  // hz-exp spacing
    double a = 1.0;  // pab-exp dense run length
    double b = 1.0;  // pab-exp gap length
    double t0 = 0.0;
    double y0 = 1.0;
};

/// Names accepted by closed_form: "exp", "hz-exp", "pab-exp".
[[nodiscard]] const std::vector<std::string>& closed_form_catalog();

/// Exact scalar solution of y^Delta = lambda * y on the scale named by the
/// entry (derivations in docs/closed_forms.md). Throws UnknownEntry.
[[nodiscard]] ScaleFunction closed_form(std::string_view name, const ClosedFormParams& params);

[[nodiscard]] OracleResult sample_closed_form(const ScaleFunction& solution, const std::vector<double>& times);

enum class Norm { Sup, L2 };
enum class ErrorMeasure { Absolute, Relative };

struct DivergenceReport {
    std::vector<double> pointwise;
    double sup = 0.0;
    double l2 = 0.0;
    Norm norm = Norm::Sup;
    ErrorMeasure measure = ErrorMeasure::Absolute;
    double tolerance = 0.0;
    bool pass = false;
};

/// Per-sample error between a trajectory and an oracle evaluated at the same
/// times. Relative errors fall back to absolute where the oracle is zero.
/// Throws TimeMismatch if the sample times differ.
[[nodiscard]] DivergenceReport compare(const Trajectory& traj, const OracleResult& oracle, Norm norm,
                                       double tolerance, ErrorMeasure measure = ErrorMeasure::Absolute);

}  // namespace chronoscale
