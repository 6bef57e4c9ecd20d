#include "chronoscale/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chronoscale/errors.hpp"

namespace chronoscale {

std::string_view to_string(OracleMethod method) noexcept {
    switch (method) {
        case OracleMethod::Recursion: return "recursion";
        case OracleMethod::ReferenceOde: return "reference-ode";
        case OracleMethod::ClosedForm: return "closed-form";
    }
    return "recursion";
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

OracleResult discrete_recursion(const TimeScale& ts, const PiecewiseRHS& rhs, double t0, const Vector& y0,
                                double t_end) {
    if (!ts.contains(t0) || !ts.contains(t_end)) {
        throw Error(ErrorCode::PointNotInScale, "recursion endpoints must lie on the scale");
    }
    if (t0 > t_end) throw Error(ErrorCode::InvalidArgument, "recursion runs forward only");

    OracleResult out;
    out.method = OracleMethod::Recursion;
    out.guaranteed_exact = true;
    out.samples.push_back({t0, y0});

    double t = t0;
    Vector y = y0;
    while (t < t_end) {
        const PieceCursor here = *ts.find_piece(t);
        if (t < here.piece.hi) throw Error(ErrorCode::NotDiscrete, "t = " + fmt(t) + " is right-dense");
        const auto next = ts.next(here);
        if (!next) throw Error(ErrorCode::NotDiscrete, "scale ends before t_end");
        const double s = next->piece.lo;
        const double mu = s - t;
        const Vector j = rhs.transition(t, y);
        switch (rhs.kind) {
            case TransitionKind::Assignment: y = j; break;
            case TransitionKind::Increment: y = y + j; break;
            case TransitionKind::DeltaRate: y = y + mu * j; break;
        }
        t = s;
        out.samples.push_back({t, y});
    }
    return out;
}

namespace {

Vector rk4(const RhsFunction& f, double t0, const Vector& y0, double t1, std::size_t steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    Vector y = y0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t0 + h * static_cast<double>(i);
        const Vector k1 = f(t, y);
        const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = f(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

}  // namespace

OracleResult dense_reference(const RhsFunction& f, double t0, const Vector& y0, const std::vector<double>& times,
                             const ReferenceOptions& opts) {
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < t0)) {
        throw Error(ErrorCode::InvalidArgument, "reference output times must be ascending and >= t0");
    }
    OracleResult out;
    out.method = OracleMethod::ReferenceOde;
    const double span = times.empty() ? 0.0 : times.back() - t0;

    double t = t0;
    Vector y = y0;
    for (double target : times) {
        if (target > t) {
            const double share = span > 0.0 ? opts.tolerance * (target - t) / span : opts.tolerance;
            std::size_t n = opts.initial_steps;
            Vector coarse = rk4(f, t, y, target, n);
            while (true) {
                if (2 * n > opts.max_steps) {
                    throw Error(ErrorCode::StiffnessFailure, "reference step budget exhausted before t = " + fmt(target));
                }
                const Vector fine = rk4(f, t, y, target, 2 * n);
                const Vector correction = (fine - coarse) / 15.0;
                const double err = correction.lpNorm<Eigen::Infinity>();
                if (!std::isfinite(err)) {
                    throw Error(ErrorCode::StiffnessFailure, "reference solution is not finite near t = " + fmt(target));
                }
                n *= 2;
                coarse = fine;
                if (err <= share) {
                    y = fine + correction;
                    out.error_estimate += err;
                    break;
                }
            }
            t = target;
        }
        out.samples.push_back({target, y});
    }
    return out;
}

OracleResult dense_reference(const RhsFunction& f, double t0, const Vector& y0, double t_end,
                             const ReferenceOptions& opts) {
    if (!(t_end > t0)) throw Error(ErrorCode::InvalidArgument, "dense_reference requires t_end > t0");
    return dense_reference(f, t0, y0, std::vector<double>{t0, t_end}, opts);
}

const std::vector<std::string>& closed_form_catalog() {
    static const std::vector<std::string> names{"exp", "hz-exp", "pab-exp"};
    return names;
}

ScaleFunction closed_form(std::string_view name, const ClosedFormParams& p) {
    ScaleFunction fn;
    fn.dimension = 1;
    if (name == "exp") {
        fn.evaluator = [p](double t) {
            return Vector::Constant(1, p.y0 * std::exp(p.lambda * (t - p.t0)));
        };
        return fn;
    }
    if (name == "hz-exp") {
        if (!(p.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "hz-exp needs h > 0");
        fn.evaluator = [p](double t) {
            const double steps = std::round((t - p.t0) / p.h);
            return Vector::Constant(1, p.y0 * std::pow(1.0 + p.h * p.lambda, steps));
        };
        return fn;
    }
    if (name == "pab-exp") {
        if (!(p.a > 0.0) || !(p.b > 0.0)) throw Error(ErrorCode::InvalidArgument, "pab-exp needs a, b > 0");
        fn.evaluator = [p](double t) {
            const double period = p.a + p.b;
            const double k = std::floor((t - p.t0) / period);
            const double s = t - p.t0 - k * period;
            if (s > p.a) throw Error(ErrorCode::PointNotInScale, "t = " + fmt(t) + " lies in a gap of the periodic scale");
            const double growth = std::exp(p.lambda * p.a) * (1.0 + p.b * p.lambda);
            return Vector::Constant(1, p.y0 * std::pow(growth, k) * std::exp(p.lambda * s));
        };
        return fn;
    }
    throw Error(ErrorCode::UnknownEntry, "no closed form named '" + std::string(name) + "'");
}

OracleResult sample_closed_form(const ScaleFunction& solution, const std::vector<double>& times) {
    OracleResult out;
    out.method = OracleMethod::ClosedForm;
    out.guaranteed_exact = true;
    out.samples.reserve(times.size());
    for (double t : times) out.samples.push_back({t, solution(t)});
    return out;
}

DivergenceReport compare(const Trajectory& traj, const OracleResult& oracle, Norm norm, double tolerance,
                         ErrorMeasure measure) {
    if (traj.samples.size() != oracle.samples.size()) {
        throw Error(ErrorCode::TimeMismatch, "trajectory has " + std::to_string(traj.samples.size()) +
                                                 " samples, oracle has " + std::to_string(oracle.samples.size()));
    }
    DivergenceReport report;
    report.norm = norm;
    report.measure = measure;
    report.tolerance = tolerance;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        const Sample& o = oracle.samples[i];
        if (s.t != o.t) {
            throw Error(ErrorCode::TimeMismatch,
                        "sample " + std::to_string(i) + ": trajectory t = " + fmt(s.t) + ", oracle t = " + fmt(o.t));
        }
        if (s.y.size() != o.y.size()) throw Error(ErrorCode::TimeMismatch, "state dimensions differ");
        double e = (s.y - o.y).norm();
        if (measure == ErrorMeasure::Relative) {
            const double ref = o.y.norm();
            if (ref > 0.0) e /= ref;
        }
        report.pointwise.push_back(e);
        report.sup = std::max(report.sup, e);
        sum_sq += e * e;
    }
    report.l2 = std::sqrt(sum_sq);
    report.pass = (norm == Norm::Sup ? report.sup : report.l2) <= tolerance;
    return report;
}

}  // namespace chronoscale
