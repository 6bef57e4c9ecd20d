#include "chronoscale/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chronoscale/errors.hpp"
#include "rk_stepper.hpp"

namespace chronoscale {

std::string_view to_string(TransitionKind kind) noexcept {
    switch (kind) {
        case TransitionKind::Assignment: return "assignment";
        case TransitionKind::Increment: return "increment";
        case TransitionKind::DeltaRate: return "delta_rate";
    }
    return "increment";
}

std::optional<TransitionKind> parse_transition_kind(std::string_view name) noexcept {
    if (name == "assignment") return TransitionKind::Assignment;
    if (name == "increment") return TransitionKind::Increment;
    if (name == "delta_rate") return TransitionKind::DeltaRate;
    return std::nullopt;
}

std::optional<Vector> Trajectory::at(double t) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const Sample& s, double v) { return s.t < v; });
    if (it == samples.end() || it->t != t) return std::nullopt;
    return it->y;
}

namespace {

std::string format_time(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

Vector checked(const Vector& v, Eigen::Index dim, const char* what) {
    if (v.size() != dim) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " returned dimension " + std::to_string(v.size()) + ", expected " +
                        std::to_string(dim));
    }
    return v;
}

void guard_norm(const Vector& y, double t, const SolveOptions& opts) {
    const double n = y.norm();
    if (!std::isfinite(n) || n > opts.max_norm) {
        throw Error(ErrorCode::BlowUp, "state norm exceeded " + format_time(opts.max_norm) + " at t = " + format_time(t));
    }
}

void validate_start(const PiecewiseRHS& rhs, double t0, const Vector& y0, double t_end) {
    if (y0.size() != rhs.dimension) {
        throw Error(ErrorCode::InvalidArgument, "initial state dimension does not match the right-hand side");
    }
    if (!y0.allFinite()) throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
    if (!(t0 <= t_end)) throw Error(ErrorCode::InvalidArgument, "solvers run forward only: need t0 <= t_end");
    if (!rhs.continuous || !rhs.transition) {
        throw Error(ErrorCode::InvalidArgument, "both the continuous and the transition law are required");
    }
}

/// Given a candidate accepted point, returns the right end of the dense piece
/// that still contains [t_prev, t_new], or nullopt if the point left it.
using PieceCheck = std::function<std::optional<double>(double t_prev, double t_new, const Vector& y_new)>;

struct DenseEnd {
    double t;
    Vector y;
};

double absolute_time_tol(double tol, double t) { return tol * std::max(1.0, std::abs(t)); }

DenseEnd integrate_piece(const detail::DormandPrince& rk, double t, Vector y, double stop, double t_end,
                         const SolveOptions& opts, Trajectory& traj, const PieceCheck* check) {
    double h = std::min({(stop - t) / 10.0, 1e-2, opts.max_step});
    Vector k1 = rk.derivative(t, y);
    bool after_reject = false;

    while (t < stop) {
        const double tol_t = absolute_time_tol(opts.boundary_tolerance, t);
        bool clipped = false;
        if (stop - (t + h) <= tol_t) {
            h = stop - t;
            clipped = true;
        }
        detail::RkTrial trial = rk.trial(t, y, k1, h);
        if (!(trial.error_ratio <= 1.0)) {
            ++traj.stats.rejected_steps;
            h = detail::DormandPrince::propose(h, trial.error_ratio, true);
            after_reject = true;
            if (h < opts.min_step * std::max(1.0, std::abs(t))) {
                throw Error(ErrorCode::StiffnessFailure, "step size underflow at t = " + format_time(t));
            }
            continue;
        }
        const double t_new = clipped ? stop : t + h;

        if (check != nullptr) {
            const std::optional<double> piece_end = (*check)(t, t_new, trial.y);
            if (!piece_end) {
                // The step crossed the moving boundary: bisect for the last admissible point.
                ++traj.stats.boundary_bisections;
                double lo = 0.0;
                double hi = t_new - t;
                Vector y_lo = y;
                while (hi - lo > tol_t) {
                    const double mid = 0.5 * (lo + hi);
                    Vector y_mid = rk.trial(t, y, k1, mid).y;
                    if ((*check)(t, t + mid, y_mid)) {
                        lo = mid;
                        y_lo = std::move(y_mid);
                    } else {
                        hi = mid;
                    }
                }
                if (lo > 0.0) {
                    ++traj.stats.accepted_steps;
                    guard_norm(y_lo, t + lo, opts);
                    traj.samples.push_back({t + lo, y_lo});
                }
                return DenseEnd{t + lo, std::move(y_lo)};
            }
            stop = std::min(*piece_end, t_end);
        }

        t = t_new;
        y = std::move(trial.y);
        k1 = std::move(trial.k_end);
        ++traj.stats.accepted_steps;
        guard_norm(y, t, opts);
        traj.samples.push_back({t, y});
        h = std::min(detail::DormandPrince::propose(h, trial.error_ratio, after_reject), opts.max_step);
        after_reject = false;
    }
    return DenseEnd{t, std::move(y)};
}

std::vector<double> interior_stops(const std::vector<double>& times, const Piece& seg) {
    std::vector<double> out;
    for (double t : times) {
        if (seg.lo < t && t < seg.hi) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

Vector evaluate_F(const PiecewiseRHS& rhs, const TimeScale& ts, double t, const Vector& y) {
    const JumpValue s = sigma(ts, t);
    const double mu = s.value - t;
    if (mu == 0.0) return checked(rhs.continuous(t, y), rhs.dimension, "continuous law");
    const Vector j = checked(rhs.transition(t, y), rhs.dimension, "transition law");
    switch (rhs.kind) {
        case TransitionKind::DeltaRate: return j;
        case TransitionKind::Increment: return j / mu;
        case TransitionKind::Assignment: return (j - y) / mu;
    }
    return j;
}

Vector transition_apply(const PiecewiseRHS& rhs, const TimeScale& ts, double t, const Vector& y) {
    const double mu = sigma(ts, t).value - t;
    if (mu == 0.0) {
        throw Error(ErrorCode::NotScattered, "t = " + format_time(t) + " is right-dense; no transition applies");
    }
    const Vector j = checked(rhs.transition(t, y), rhs.dimension, "transition law");
    switch (rhs.kind) {
        case TransitionKind::Assignment: return j;
        case TransitionKind::Increment: return y + j;
        case TransitionKind::DeltaRate: return y + mu * j;
    }
    return j;
}

Trajectory solve_ivp(const TimeScale& ts, const PiecewiseRHS& rhs, double t0, const Vector& y0, double t_end,
                     const SolveOptions& opts) {
    if (!ts.contains(t0)) throw Error(ErrorCode::PointNotInScale, "t0 = " + format_time(t0) + " is not on the scale");
    if (!ts.contains(t_end)) {
        throw Error(ErrorCode::PointNotInScale, "t_end = " + format_time(t_end) + " is not on the scale");
    }
    validate_start(rhs, t0, y0, t_end);

    Trajectory traj;
    traj.kind = rhs.kind;
    traj.options = opts;
    traj.samples.push_back({t0, y0});

    detail::DormandPrince rk(rhs.continuous, opts.rtol, opts.atol);
    Vector y = y0;
    for (const Piece& seg : segments(ts, Window{t0, t_end})) {
        if (!seg.is_point()) {
            double from = seg.lo;
            for (double stop : interior_stops(opts.output_times, seg)) {
                y = integrate_piece(rk, from, std::move(y), stop, t_end, opts, traj, nullptr).y;
                from = stop;
            }
            y = integrate_piece(rk, from, std::move(y), seg.hi, t_end, opts, traj, nullptr).y;
        }
        if (seg.hi >= t_end) break;

        const double target = sigma(ts, seg.hi).value;
        Vector after = transition_apply(rhs, ts, seg.hi, y);
        guard_norm(after, target, opts);
        traj.jumps.push_back({seg.hi, target, y, after});
        traj.samples.push_back({target, after});
        ++traj.stats.jumps;
        y = std::move(after);
    }
    traj.stats.rhs_evaluations = rk.evaluations();
    return traj;
}

JumpValue sigma(const StateDomain& dom, double t, const Vector& x) { return sigma(dom.scale_of(x), t); }

Trajectory solve_ivp_state_dependent(const StateDomain& dom, const PiecewiseRHS& rhs, double t0, const Vector& y0,
                                     double t_end, const SolveOptions& opts) {
    validate_start(rhs, t0, y0, t_end);
    if (!dom.scale_of) throw Error(ErrorCode::InvalidArgument, "state domain has no scale_of map");
    if (!dom.scale_of(y0).contains(t0)) {
        throw Error(ErrorCode::LeftDomain, "initial point (t0, y0) is not in the domain");
    }

    Trajectory traj;
    traj.kind = rhs.kind;
    traj.options = opts;
    traj.samples.push_back({t0, y0});

    detail::DormandPrince rk(rhs.continuous, opts.rtol, opts.atol);
    const PieceCheck check = [&dom](double t_prev, double t_new, const Vector& y_new) -> std::optional<double> {
        const TimeScale slice = dom.scale_of(y_new);
        auto c = slice.find_piece(t_new);
        if (!c || c->piece.is_point()) return std::nullopt;
        // A left end that moved past t_prev is fine; t_prev sitting in another piece means a gap was crossed.
        if (auto p = slice.find_piece(t_prev); p && !(p->piece == c->piece)) return std::nullopt;
        return c->piece.hi;
    };

    double t = t0;
    Vector y = y0;
    while (t < t_end) {
        const TimeScale slice = dom.scale_of(y);
        const auto cursor = slice.find_piece(t);
        if (!cursor) {
            throw Error(ErrorCode::LeftDomain, "(t, y(t)) left the domain at t = " + format_time(t));
        }

        if (t < cursor->piece.hi) {
            const double stop = std::min(cursor->piece.hi, t_end);
            DenseEnd end = integrate_piece(rk, t, std::move(y), stop, t_end, opts, traj, &check);
            y = std::move(end.y);
            if (end.t < t_end) {
                // Land exactly on the boundary of the slice seen from the final state.
                const TimeScale end_slice = dom.scale_of(y);
                const auto end_piece = end_slice.find_piece(end.t);
                const double gap = end_piece ? end_piece->piece.hi - end.t : kInfinity;
                if (!(gap <= 100.0 * absolute_time_tol(opts.boundary_tolerance, end.t))) {
                    throw Error(ErrorCode::LeftDomain,
                                "could not locate the domain boundary after t = " + format_time(end.t));
                }
                const double boundary = end_piece->piece.hi;
                if (traj.samples.back().t == end.t && end.t != t) {
                    traj.samples.back().t = boundary;
                } else if (boundary != end.t) {
                    traj.samples.push_back({boundary, y});
                }
                t = boundary;
            } else {
                t = end.t;
            }
            continue;
        }

        // Right-scattered (or the slice maximum) in D_{y(t)}.
        const auto next = slice.next(*cursor);
        if (!next || next->piece.lo > t_end) {
            traj.reached_end = false;
            break;
        }
        const double target = next->piece.lo;
        Vector after = transition_apply(rhs, slice, t, y);
        guard_norm(after, target, opts);
        if (!dom.scale_of(after).contains(target)) {
            throw Error(ErrorCode::LeftDomain, "jump from t = " + format_time(t) + " lands at " +
                                                   format_time(target) + ", outside the post-jump slice");
        }
        if (++traj.stats.jumps > opts.max_jumps) {
            throw Error(ErrorCode::NonterminatingJumps,
                        "more than " + std::to_string(opts.max_jumps) + " jumps before t_end");
        }
        traj.jumps.push_back({t, target, y, after});
        traj.samples.push_back({target, after});
        t = target;
        y = std::move(after);
    }
    traj.stats.rhs_evaluations = rk.evaluations();
    return traj;
}

}  // namespace chronoscale
