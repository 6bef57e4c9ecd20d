#include "rk_stepper.hpp"

#include <algorithm>
#include <cmath>

#include "chronoscale/errors.hpp"

namespace chronoscale::detail {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

}  // namespace

DormandPrince::DormandPrince(OdeRhs rhs, double rtol, double atol)
    : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

Vector DormandPrince::derivative(double t, const Vector& y) const {
    ++evaluations_;
    Vector k = rhs_(t, y);
    if (k.size() != y.size()) {
        throw Error(ErrorCode::InvalidArgument, "continuous law returned a vector of the wrong dimension");
    }
    return k;
}

RkTrial DormandPrince::trial(double t, const Vector& y, const Vector& k1, double h) const {
    const Vector k2 = derivative(t + c2 * h, y + h * (a21 * k1));
    const Vector k3 = derivative(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = derivative(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = derivative(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = derivative(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vector k7 = derivative(t + h, y_new);

    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = err[i] / scale;
        sum += r * r;
    }
    const double ratio = std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(y.size(), 1)));
    return RkTrial{std::move(y_new), std::move(k7), std::isfinite(ratio) ? ratio : HUGE_VAL};
}

double DormandPrince::propose(double h, double error_ratio, bool after_reject) {
    constexpr double kSafety = 0.9;
    constexpr double kMinFactor = 0.2;
    const double max_factor = after_reject ? 1.0 : 5.0;
    if (error_ratio == 0.0) return h * max_factor;
    const double factor = kSafety * std::pow(error_ratio, -0.2);
    return h * std::clamp(factor, kMinFactor, max_factor);
}

}  // namespace chronoscale::detail
