#include "chronoscale/existence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chronoscale/errors.hpp"

namespace chronoscale {

double compute_alpha(const TheoremInputs& in) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidInputs, what);
    };
    require(in.a > 0.0 && std::isfinite(in.a), "a must be positive and finite");
    require(in.b > 0.0 && std::isfinite(in.b), "b must be positive and finite");
    require(in.M >= 0.0 && std::isfinite(in.M), "M must be nonnegative and finite");
    require(in.N >= 0.0 && std::isfinite(in.N), "N must be nonnegative and finite");
    require(in.L >= 0.0 && std::isfinite(in.L), "L must be nonnegative and finite");
    require(in.epsilon > 0.0 && in.epsilon < 1.0, "epsilon must lie in (0, 1)");

    const double bound = std::max(in.M, in.N);
    const double ball_term = bound > 0.0 ? in.b / bound : kInfinity;
    const double lipschitz_term = in.L > 0.0 ? (1.0 - in.epsilon) / in.L : kInfinity;
    const double alpha = std::min({in.a, ball_term, lipschitz_term});

    // alpha * L <= 1 - epsilon up to the rounding of one division and one product.
    if (in.L > 0.0 && alpha * in.L > (1.0 - in.epsilon) * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
        throw std::logic_error("compute_alpha: alpha * L exceeds 1 - epsilon");
    }
    return alpha;
}

TheoremInterval truncate_interval(const TheoremInputs& in, double alpha, const TimeScale& ts) {
    TheoremInterval out{in.t0 - alpha, in.t0 + alpha, false};
    if (!ts.contains(in.t0)) return out;
    const JumpValue s = sigma(ts, in.t0);
    if (s.value > in.t0 && alpha < s.value - in.t0) {
        out.hi = s.value;
        out.truncated_at_sigma = true;
    }
    return out;
}

namespace {

std::vector<Vector> ball_grid(const Vector& y0, double b, std::size_t per_axis) {
    const Eigen::Index n = y0.size();
    const std::size_t count = std::max<std::size_t>(per_axis, 2);
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= count;

    std::vector<Vector> out;
    std::vector<std::size_t> index(static_cast<std::size_t>(n), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        Vector offset(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t k = rest % count;
            rest /= count;
            // Cell midpoints of [-b, b], so every sample stays inside the open ball axis.
            offset[i] = b * (-1.0 + (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count));
        }
        if (offset.norm() < b) out.push_back(y0 + offset);
    }
    return out;
}

}  // namespace

BoundEstimates estimate_bounds(const PiecewiseRHS& rhs, const TimeScale& ts, double t0, const Vector& y0, double a,
                               double b, const GridSpec& grid) {
    if (grid.state_points_per_axis < 2 || grid.time_points_per_piece < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points per axis");
    }
    BoundEstimates est;
    const std::vector<Vector> states = ball_grid(y0, b, grid.state_points_per_axis);
    est.state_samples = states.size();

    const Window window{std::max(t0 - a, ts.infimum()), std::min(t0 + a, ts.supremum())};
    for (const Piece& seg : segments(ts, window)) {
        // Right-dense sample times: the open piece interior intersected with I_a.
        if (!seg.is_point()) {
            const std::size_t n = grid.time_points_per_piece;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = seg.lo + (seg.hi - seg.lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
                if (!(t0 - a < t && t < t0 + a)) continue;
                ++est.time_samples;
                std::vector<Vector> values;
                values.reserve(states.size());
                for (const Vector& y : states) {
                    values.push_back(rhs.continuous(t, y));
                    const double m = values.back().norm();
                    if (m > est.M) {
                        est.M = m;
                        est.M_at = BoundWitness{t, y};
                    }
                }
                for (std::size_t p = 0; p < states.size(); ++p) {
                    for (std::size_t q = p + 1; q < states.size(); ++q) {
                        const double dy = (states[p] - states[q]).norm();
                        if (dy == 0.0) continue;
                        const double lq = (values[p] - values[q]).norm() / dy;
                        if (lq > est.L) {
                            est.L = lq;
                            est.L_at = BoundWitness{t, states[p]};
                        }
                    }
                }
            }
        }
        const double t = seg.hi;
        if (!(t0 - a < t && t < t0 + a)) continue;
        const JumpValue s = sigma(ts, t);
        if (!(s.value > t)) continue;
        est.scattered_set_empty = false;
        ++est.time_samples;
        for (const Vector& y : states) {
            const double n = ((transition_apply(rhs, ts, t, y) - y) / (s.value - t)).norm();
            if (n > est.N) {
                est.N = n;
                est.N_at = BoundWitness{t, y};
            }
        }
    }
    return est;
}

namespace {

struct Mesh {
    std::vector<double> nodes;
    std::vector<std::size_t> piece_of;  // index of the dense piece (or point) holding each node
    std::vector<std::size_t> piece_begin;
    std::vector<std::size_t> piece_end;  // one past the last node of the piece
    std::size_t origin = 0;              // index of t0
};

Mesh build_mesh(const TimeScale& ts, const TheoremInterval& interval, double t0, const MeshSpec& spec) {
    Mesh mesh;
    const Window window{std::max(interval.lo, ts.infimum()), std::min(interval.hi, ts.supremum())};
    for (const Piece& seg : segments(ts, window)) {
        const std::size_t id = mesh.piece_begin.size();
        mesh.piece_begin.push_back(mesh.nodes.size());
        auto add = [&](double t) {
            mesh.nodes.push_back(t);
            mesh.piece_of.push_back(id);
        };
        if (seg.is_point()) {
            add(seg.lo);
        } else {
            // Split at t0 so the initial time is always a node.
            std::vector<Piece> blocks;
            if (seg.lo < t0 && t0 < seg.hi) {
                blocks = {Piece{seg.lo, t0}, Piece{t0, seg.hi}};
            } else {
                blocks = {seg};
            }
            for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
                const Piece& blk = blocks[bi];
                const auto n = std::max<std::size_t>(
                    spec.min_intervals_per_piece,
                    static_cast<std::size_t>(std::ceil((blk.hi - blk.lo) * spec.nodes_per_unit)));
                for (std::size_t i = (bi == 0 ? 0 : 1); i < n; ++i) {
                    add(blk.lo + (blk.hi - blk.lo) * static_cast<double>(i) / static_cast<double>(n));
                }
                add(blk.hi);
            }
        }
        mesh.piece_end.push_back(mesh.nodes.size());
    }
    auto it = std::find(mesh.nodes.begin(), mesh.nodes.end(), t0);
    if (it == mesh.nodes.end()) throw Error(ErrorCode::InvalidInputs, "t0 is not a point of the time scale");
    mesh.origin = static_cast<std::size_t>(it - mesh.nodes.begin());
    return mesh;
}

/// Local Lagrange interpolation through up to six nodes of the same dense piece.
Vector interpolate(const Mesh& mesh, const std::vector<Vector>& values, std::size_t left, double s) {
    const std::size_t id = mesh.piece_of[left];
    const std::size_t begin = mesh.piece_begin[id];
    const std::size_t end = mesh.piece_end[id];
    constexpr std::size_t kStencil = 6;
    const std::size_t width = std::min(kStencil, end - begin);
    std::size_t first = left >= begin + 2 ? left - 2 : begin;
    first = std::min(first, end - width);

    Vector out = Vector::Zero(values[left].size());
    for (std::size_t j = first; j < first + width; ++j) {
        double w = 1.0;
        for (std::size_t m = first; m < first + width; ++m) {
            if (m != j) w *= (s - mesh.nodes[m]) / (mesh.nodes[j] - mesh.nodes[m]);
        }
        out += w * values[j];
    }
    return out;
}

/// One application of the integral operator to the iterate `current`.
std::vector<Vector> picard_step(const TimeScale& ts, const PiecewiseRHS& rhs, const Mesh& mesh,
                                const std::vector<Vector>& current, const Vector& y0, const QuadOptions& quad) {
    const std::size_t m = mesh.nodes.size();
    auto increment = [&](std::size_t i) -> Vector {
        const bool same_piece = mesh.piece_of[i] == mesh.piece_of[i + 1];
        ScaleFunction g;
        g.dimension = y0.size();
        if (same_piece) {
            g.evaluator = [&, i](double s) {
                const Vector y = s == mesh.nodes[i] ? current[i] : interpolate(mesh, current, i, s);
                return evaluate_F(rhs, ts, s, y);
            };
        } else {
            g.evaluator = [&, i](double s) { return evaluate_F(rhs, ts, s, current[i]); };
        }
        return delta_integral(ts, g, mesh.nodes[i], mesh.nodes[i + 1], quad);
    };

    std::vector<Vector> next(m);
    next[mesh.origin] = y0;
    for (std::size_t i = mesh.origin; i + 1 < m; ++i) next[i + 1] = next[i] + increment(i);
    for (std::size_t i = mesh.origin; i > 0; --i) next[i - 1] = next[i] - increment(i - 1);
    return next;
}

double sup_distance(const std::vector<Vector>& u, const std::vector<Vector>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, (u[i] - v[i]).norm());
    return d;
}

struct IterationResult {
    std::vector<Vector> fixed_point;
    std::vector<double> ratios;
    std::size_t iterates = 0;
    bool reached_tolerance = false;
};

/// The ball bound applies on [t0 - alpha, t0 + alpha]; a truncated interval's
/// last node sigma(t0) lies beyond it and is only bounded by mu * N.
IterationResult iterate(const TimeScale& ts, const PiecewiseRHS& rhs, const Mesh& mesh, const TheoremInputs& in,
                        double ball_until, std::vector<Vector> current, const PicardOptions& opts) {
    IterationResult out;
    std::vector<double> distances;
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        std::vector<Vector> next = picard_step(ts, rhs, mesh, current, in.y0, opts.quad);
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (mesh.nodes[i] > ball_until) continue;
            if (!((next[i] - in.y0).norm() <= in.b)) {
                std::ostringstream os;
                os.precision(17);
                os << "iterate " << k + 1 << " leaves U_b at t = " << mesh.nodes[i];
                throw Error(ErrorCode::LeftBall, os.str());
            }
        }
        const double d = sup_distance(next, current);
        if (!std::isfinite(d)) throw Error(ErrorCode::IterationDiverged, "iterate is not finite");
        if (!distances.empty() && distances.back() > 0.0) out.ratios.push_back(d / distances.back());
        distances.push_back(d);
        current = std::move(next);
        out.iterates = k + 1;
        if (d < opts.tolerance) {
            out.reached_tolerance = true;
            break;
        }
        const std::size_t n = distances.size();
        if (n >= 3 && distances[n - 1] > distances[n - 2] && distances[n - 2] > distances[n - 3] &&
            distances[n - 1] > 10.0 * distances.front()) {
            throw Error(ErrorCode::IterationDiverged, "successive distances keep growing");
        }
    }
    out.fixed_point = std::move(current);
    return out;
}

double solver_gap(const TimeScale& ts, const PiecewiseRHS& rhs, const Mesh& mesh, const std::vector<Vector>& fixed,
                  const SolveOptions& base) {
    SolveOptions opts = base;
    opts.output_times = mesh.nodes;
    double gap = 0.0;
    auto compare_run = [&](std::size_t from, std::size_t to) {
        if (from >= to) return;
        const Trajectory traj = solve_ivp(ts, rhs, mesh.nodes[from], fixed[from], mesh.nodes[to], opts);
        for (std::size_t i = from; i <= to; ++i) {
            const auto y = traj.at(mesh.nodes[i]);
            if (!y) throw std::logic_error("solver trajectory is missing a mesh node");
            gap = std::max(gap, (*y - fixed[i]).norm());
        }
    };
    // Forward from t0, and forward from the left end back up to t0.
    compare_run(mesh.origin, mesh.nodes.size() - 1);
    compare_run(0, mesh.origin);
    return gap;
}

}  // namespace

TheoremReport picard_run(const TimeScale& ts, const PiecewiseRHS& rhs, const TheoremInputs& in,
                         const PicardOptions& opts) {
    if (in.y0.size() != rhs.dimension) throw Error(ErrorCode::InvalidInputs, "y0 dimension does not match rhs");
    if (!ts.contains(in.t0)) throw Error(ErrorCode::InvalidInputs, "t0 is not a point of the time scale");
    if (!(ts.infimum() <= in.t0 - in.a) || !(ts.supremum() >= in.t0 + in.a)) {
        throw Error(ErrorCode::InvalidInputs, "the time scale must extend over [t0 - a, t0 + a]");
    }

    TheoremReport report;
    report.alpha = compute_alpha(in);
    report.interval = truncate_interval(in, report.alpha, ts);
    report.contraction_bound = 1.0 - in.epsilon;

    const Mesh mesh = build_mesh(ts, report.interval, in.t0, opts.mesh);
    report.mesh = mesh.nodes;
    const double ball_until = in.t0 + report.alpha;

    IterationResult main_run =
        iterate(ts, rhs, mesh, in, ball_until, std::vector<Vector>(mesh.nodes.size(), in.y0), opts);
    report.iterates = main_run.iterates;
    report.contraction_ratios = main_run.ratios;
    report.residual =
        sup_distance(picard_step(ts, rhs, mesh, main_run.fixed_point, in.y0, opts.quad), main_run.fixed_point);
    const bool ratios_ok = report.contraction_ratios.empty() ||
                           report.contraction_ratios.back() <= report.contraction_bound + opts.ratio_slack;
    report.converged = main_run.reached_tolerance && report.residual < 10.0 * opts.tolerance && ratios_ok;
    report.fixed_point = main_run.fixed_point;

    if (opts.cross_check && mesh.nodes.size() > 1) {
        report.solver_gap = solver_gap(ts, rhs, mesh, report.fixed_point, opts.solver);
    }
    if (opts.uniqueness_probe) {
        std::mt19937_64 rng(opts.probe_seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double radius = opts.probe_amplitude * in.b / std::sqrt(static_cast<double>(in.y0.size()));
        std::vector<Vector> start(mesh.nodes.size(), in.y0);
        for (std::size_t i = 0; i < start.size(); ++i) {
            if (i == mesh.origin) continue;
            for (Eigen::Index c = 0; c < in.y0.size(); ++c) start[i][c] += radius * unit(rng);
        }
        IterationResult probe = iterate(ts, rhs, mesh, in, ball_until, std::move(start), opts);
        report.probe_iterates = probe.iterates;
        report.uniqueness_gap = sup_distance(probe.fixed_point, report.fixed_point);
    }
    return report;
}

}  // namespace chronoscale
