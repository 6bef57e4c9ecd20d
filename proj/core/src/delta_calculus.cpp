#include "chronoscale/delta_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <string>

#include "chronoscale/errors.hpp"
#include "compensated_sum.hpp"

namespace chronoscale {

Vector ScaleFunction::operator()(double t) const {
    Vector v = evaluator(t);
    if (v.size() != dimension) {
        throw Error(ErrorCode::InvalidArgument,
                    "scale function returned dimension " + std::to_string(v.size()) + ", expected " +
                        std::to_string(dimension));
    }
    return v;
}

namespace {

// Gauss-Kronrod 15-point abscissae and weights; odd indices are the 7-point
// Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    Vector value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<Vector(double)>& g, Eigen::Index dim, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const Vector fc = g(center);
    Vector kronrod = kWgk[7] * fc;
    Vector gauss = kWg[3] * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const Vector f1 = g(center - dx);
        const Vector f2 = g(center + dx);
        if (f1.size() != dim || f2.size() != dim) {
            throw Error(ErrorCode::InvalidArgument, "integrand returned the wrong dimension");
        }
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    return Panel{lo, hi, kronrod, (kronrod - gauss).lpNorm<Eigen::Infinity>()};
}

}  // namespace

QuadratureResult integrate_interval(const std::function<Vector(double)>& g, Eigen::Index dimension,
                                    double lo, double hi, const QuadOptions& quad) {
    QuadratureResult result{Vector::Zero(dimension), 0.0, 0};
    if (!(lo < hi)) return result;
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::QuadratureFailure, "dense piece must be bounded");
    }

    std::priority_queue<Panel> panels;
    panels.push(gauss_kronrod(g, dimension, lo, hi));
    double total_error = panels.top().error;

    while (total_error > quad.abs_tol) {
        if (!std::isfinite(total_error)) {
            throw Error(ErrorCode::QuadratureFailure, "integrand is not finite on the dense piece");
        }
        if (panels.size() >= quad.max_subintervals) {
            std::ostringstream os;
            os.precision(6);
            os << "error estimate " << total_error << " above tolerance " << quad.abs_tol << " after "
               << panels.size() << " subintervals on [" << lo << ", " << hi << "]";
            throw Error(ErrorCode::QuadratureFailure, os.str());
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(worst.lo < mid && mid < worst.hi)) {
            throw Error(ErrorCode::QuadratureFailure, "subinterval collapsed below machine resolution");
        }
        Panel left = gauss_kronrod(g, dimension, worst.lo, mid);
        Panel right = gauss_kronrod(g, dimension, mid, worst.hi);
        total_error += left.error + right.error - worst.error;
        panels.push(std::move(left));
        panels.push(std::move(right));
    }

    // Sum panels in ascending order so the result does not depend on heap layout.
    std::vector<Panel> ordered;
    ordered.reserve(panels.size());
    while (!panels.empty()) {
        ordered.push_back(panels.top());
        panels.pop();
    }
    std::sort(ordered.begin(), ordered.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    detail::CompensatedSum sum(dimension);
    double err = 0.0;
    for (const Panel& p : ordered) {
        sum.add(p.value);
        err += p.error;
    }
    result.value = sum.value();
    result.error_estimate = err;
    result.subintervals = ordered.size();
    return result;
}

Vector delta_integral(const TimeScale& ts, const ScaleFunction& g, double t_a, double t_b,
                      const QuadOptions& quad) {
    if (!ts.contains(t_a) || !ts.contains(t_b)) {
        throw Error(ErrorCode::PointNotInScale, "integration limits must be points of the time scale");
    }
    if (t_a > t_b) throw Error(ErrorCode::InvalidArgument, "delta_integral requires t_a <= t_b");

    detail::CompensatedSum sum(g.dimension);
    if (t_a == t_b) return sum.value();

    // Ascending pass: each dense piece, then the gap that follows it.
    for (const Piece& seg : segments(ts, Window{t_a, t_b})) {
        if (!seg.is_point()) {
            sum.add(integrate_interval([&g](double s) { return g(s); }, g.dimension, seg.lo, seg.hi, quad).value);
        }
        if (seg.hi < t_b) {
            const JumpValue next = sigma(ts, seg.hi);
            if (next.value > seg.hi) sum.add((next.value - seg.hi) * g(seg.hi));
        }
    }
    return sum.value();
}

Vector delta_derivative(const TimeScale& ts, const ScaleFunction& phi, double t, double h_tol) {
    const JumpValue s = sigma(ts, t);
    if (s.at_boundary) {
        throw Error(ErrorCode::InvalidArgument, "delta derivative is undefined at the scale maximum");
    }
    if (s.value > t) return (phi(s.value) - phi(t)) / (s.value - t);

    const Piece piece = ts.find_piece(t)->piece;
    const double right_room = piece.hi - t;
    const double left_room = t - piece.lo;
    const double h_start = std::min(0.5 * (piece.hi - piece.lo), 1e-3);
    const bool central = left_room > 0.0;

    double h = central ? std::min({h_start, left_room, right_room}) : std::min(h_start, 0.5 * right_room);
    // Both stencils are second order, so (4 D(h/2) - D(h)) / 3 removes the leading error term.
    auto estimate = [&](double step) -> Vector {
        if (central) return (phi(t + step) - phi(t - step)) / (2.0 * step);
        return (-3.0 * phi(t) + 4.0 * phi(t + step) - phi(t + 2.0 * step)) / (2.0 * step);
    };

    constexpr int kMaxHalvings = 40;
    Vector previous_raw = estimate(h);
    Vector previous_extrapolated;
    for (int i = 1; i <= kMaxHalvings; ++i) {
        h *= 0.5;
        const Vector raw = estimate(h);
        const Vector extrapolated = (4.0 * raw - previous_raw) / 3.0;
        if (i >= 2 && (extrapolated - previous_extrapolated).lpNorm<Eigen::Infinity>() < h_tol) {
            return extrapolated;
        }
        previous_raw = raw;
        previous_extrapolated = extrapolated;
    }
    std::ostringstream os;
    os.precision(17);
    os << "finite-difference estimates at t = " << t << " did not settle within " << h_tol;
    throw Error(ErrorCode::DerivativeDidNotConverge, os.str());
}

}  // namespace chronoscale
