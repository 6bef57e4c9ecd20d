#pragma once

#include <cstddef>
#include <functional>

#include "chronoscale/types.hpp"

namespace chronoscale::detail {

using OdeRhs = std::function<Vector(double, const Vector&)>;

struct RkTrial {
    Vector y;            // fifth-order solution at t + h
    Vector k_end;        // f(t + h, y), reused as the next k1
    double error_ratio;  // scaled error norm; <= 1 means acceptable
};

/// Dormand-Prince 5(4) pair with first-same-as-last reuse.
class DormandPrince {
public:
    DormandPrince(OdeRhs rhs, double rtol, double atol);

    [[nodiscard]] Vector derivative(double t, const Vector& y) const;
    [[nodiscard]] RkTrial trial(double t, const Vector& y, const Vector& k1, double h) const;

    /// Step size for the next attempt given the last error ratio.
    [[nodiscard]] static double propose(double h, double error_ratio, bool after_reject);

    [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }

private:
    OdeRhs rhs_;
    double rtol_;
    double atol_;
    mutable std::size_t evaluations_ = 0;
};

}  // namespace chronoscale::detail
