#pragma once

// Delta derivative and delta (Cauchy) integral on a time scale.

#include <cstddef>
#include <functional>

#include "chronoscale/time_scale.hpp"
#include "chronoscale/types.hpp"

namespace chronoscale {

/// A function from the points of a time scale into R^n. The caller asserts
/// continuity on the scale; the evaluator must be re-entrant.
struct ScaleFunction {
    std::function<Vector(double)> evaluator;
    Eigen::Index dimension = 1;
    bool declared_continuous = true;

    /// Evaluates and checks the result dimension.
    [[nodiscard]] Vector operator()(double t) const;
};

struct QuadOptions {
    double abs_tol = 1e-10;  // per dense segment
    std::size_t max_subintervals = 4096;
};

inline constexpr double kDefaultDerivativeTolerance = 1e-7;

/// phi^Delta(t): the forward quotient across the gap at right-scattered t, and
/// an extrapolated finite-difference limit at right-dense t (central when t is
/// also left-dense, one-sided otherwise).
///
/// Throws PointNotInScale, InvalidArgument at the scale maximum, and
/// DerivativeDidNotConverge when successive dense estimates never agree
/// within h_tol.
[[nodiscard]] Vector delta_derivative(const TimeScale& ts, const ScaleFunction& phi, double t,
                                      double h_tol = kDefaultDerivativeTolerance);

/// Integral of g over [t_a, t_b) in the delta sense: the sum of mu(t) * g(t)
/// over right-scattered t in [t_a, t_b) plus the Lebesgue integral over the
/// dense pieces. Dense pieces use adaptive Gauss-Kronrod 7/15 bisection.
///
/// Throws PointNotInScale, InvalidArgument when t_a > t_b, and
/// QuadratureFailure when a dense piece cannot reach quad.abs_tol.
[[nodiscard]] Vector delta_integral(const TimeScale& ts, const ScaleFunction& g, double t_a, double t_b,
                                    const QuadOptions& quad = {});

/// Adaptive Gauss-Kronrod quadrature of a vector-valued integrand on a finite
/// interval. Exposed for the dense parts of the solver tooling.
struct QuadratureResult {
    Vector value;
    double error_estimate = 0.0;
    std::size_t subintervals = 0;
};

[[nodiscard]] QuadratureResult integrate_interval(const std::function<Vector(double)>& g,
                                                  Eigen::Index dimension, double lo, double hi,
                                                  const QuadOptions& quad = {});

}  // namespace chronoscale
