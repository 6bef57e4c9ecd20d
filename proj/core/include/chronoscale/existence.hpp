#pragma once

// Constructive check of local existence and uniqueness for
// y^Delta = F(t, y), y(t0) = y0: the guaranteed interval half-width alpha,
// sampled estimates of the hypotheses, and a Picard iteration on a mesh.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronoscale/delta_calculus.hpp"
#include "chronoscale/dynamics.hpp"
#include "chronoscale/time_scale.hpp"
#include "chronoscale/types.hpp"

namespace chronoscale {

struct TheoremInputs {
    double a = 1.0;        // half-width of I_a
    double b = 1.0;        // radius of U_b
    double M = 1.0;        // bound on |f| over I_a x U_b
    double L = 1.0;        // Lipschitz constant of f in y
    double N = 1.0;        // bound on |J_inc(t, y) / mu(t)| at right-scattered t in I_a
    double epsilon = 0.1;  // in (0, 1)
    double t0 = 0.0;
    Vector y0 = Vector::Zero(1);
};

/// min{a, b / max(M, N), (1 - epsilon) / L}. Zero denominators give +inf
/// for their term. Throws Error(InvalidInputs).
[[nodiscard]] double compute_alpha(const TheoremInputs& in);

struct TheoremInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool truncated_at_sigma = false;
};

/// [t0 - alpha, t0 + alpha], or [t0 - alpha, sigma(t0)] when t0 is
/// right-scattered and alpha < sigma(t0) - t0.
[[nodiscard]] TheoremInterval truncate_interval(const TheoremInputs& in, double alpha, const TimeScale& ts);

struct GridSpec {
    std::size_t state_points_per_axis = 9;
    std::size_t time_points_per_piece = 17;
};

/// Sample at which a bound estimate was attained.
struct BoundWitness {
    double t = 0.0;
    Vector y;
};

/// Sampled lower bounds on the suprema M, N, L over I_a x U_b. N uses the
/// increment convention: |y(sigma) - y| / mu at right-scattered t.
struct BoundEstimates {
    double M = 0.0;
    double N = 0.0;
    double L = 0.0;
    bool scattered_set_empty = true;
    std::size_t time_samples = 0;
    std::size_t state_samples = 0;
    std::optional<BoundWitness> M_at;
    std::optional<BoundWitness> N_at;
    std::optional<BoundWitness> L_at;
};

[[nodiscard]] BoundEstimates estimate_bounds(const PiecewiseRHS& rhs, const TimeScale& ts, double t0,
                                             const Vector& y0, double a, double b, const GridSpec& grid = {});

struct MeshSpec {
    double nodes_per_unit = 64.0;
    std::size_t min_intervals_per_piece = 8;
};

namespace detail {
inline SolveOptions tight_solver() {
    SolveOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}
}  // namespace detail

struct PicardOptions {
    std::size_t max_iter = 100;
    double tolerance = 1e-11;  // sup-norm distance between successive iterates
    double ratio_slack = 0.05;
    MeshSpec mesh;
    QuadOptions quad{1e-13, 4096};
    SolveOptions solver = detail::tight_solver();
    bool cross_check = true;
    bool uniqueness_probe = true;
    double probe_amplitude = 0.1;  // fraction of b
    std::uint64_t probe_seed = 20100101;
};

struct TheoremReport {
    double alpha = 0.0;
    TheoremInterval interval;
    std::size_t iterates = 0;
    std::vector<double> contraction_ratios;  // d_{k+1} / d_k
    bool converged = false;
    double residual = 0.0;
    double contraction_bound = 0.0;  // 1 - epsilon
    std::string convention = "increment";

    std::vector<double> mesh;
    std::vector<Vector> fixed_point;

    std::optional<double> solver_gap;      // sup |fixed point - solve_ivp| on the mesh
    std::optional<double> uniqueness_gap;  // sup |fixed point - probe fixed point|
    std::size_t probe_iterates = 0;
};

/// Successive approximations y_{k+1}(t) = y0 + int_{t0}^{t} F(s, y_k(s)) Delta s
/// on a mesh of the guaranteed interval. Every scale point of the interval
/// that is isolated or a piece endpoint is a mesh node; dense pieces are
/// subdivided uniformly and iterates are interpolated locally with degree 5.
///
/// Throws InvalidInputs (hypotheses on the scale extent), LeftBall and
/// IterationDiverged.
[[nodiscard]] TheoremReport picard_run(const TimeScale& ts, const PiecewiseRHS& rhs, const TheoremInputs& in,
                                       const PicardOptions& opts = {});

}  // namespace chronoscale
