#pragma once

// Dynamic equations y^Delta = F(t, y) whose right-hand side follows a
// continuous law at right-dense points and a transition law across gaps.

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "chronoscale/time_scale.hpp"
#include "chronoscale/types.hpp"

namespace chronoscale {

using RhsFunction = std::function<Vector(double, const Vector&)>;

/// How the transition law's output maps to the state after a gap of length mu.
enum class TransitionKind {
    Assignment,  // y(sigma) = J(t, y)
    Increment,   // y(sigma) = y + J(t, y)
    DeltaRate,   // y(sigma) = y + mu * J(t, y)   (the classical delta-derivative reading)
};

[[nodiscard]] std::string_view to_string(TransitionKind kind) noexcept;
[[nodiscard]] std::optional<TransitionKind> parse_transition_kind(std::string_view name) noexcept;

struct PiecewiseRHS {
    RhsFunction continuous;  // f, used at right-dense t
    RhsFunction transition;  // J, used at right-scattered t
    TransitionKind kind = TransitionKind::Increment;
    Eigen::Index dimension = 1;
};

/// The delta derivative the solver realizes at (t, y); y(sigma) = y + mu * F
/// holds at right-scattered points for every kind. At the scale maximum the
/// continuous law is used.
[[nodiscard]] Vector evaluate_F(const PiecewiseRHS& rhs, const TimeScale& ts, double t, const Vector& y);

/// State at sigma(t) for right-scattered t. Throws Error(NotScattered) if mu(t) == 0.
[[nodiscard]] Vector transition_apply(const PiecewiseRHS& rhs, const TimeScale& ts, double t, const Vector& y);

struct SolveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = kInfinity;
    double max_norm = 1e12;          // BlowUp above this state norm
    double min_step = 1e-14;         // relative to max(1, |t|); StiffnessFailure below
    std::size_t max_jumps = 1'000'000;  // state-dependent solver only
    double boundary_tolerance = 1e-12;  // state-dependent segment-boundary location
    /// Fixed-scale solver only: dense pieces are split so these times are sampled exactly.
    std::vector<double> output_times;

    bool operator==(const SolveOptions&) const = default;
};

struct Sample {
    double t;
    Vector y;
};

struct JumpRecord {
    double t;
    double sigma;
    Vector before;
    Vector after;
};

struct SolveStats {
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t jumps = 0;
    std::size_t boundary_bisections = 0;
};

struct Trajectory {
    std::vector<Sample> samples;  // strictly increasing times, all on the scale
    std::vector<JumpRecord> jumps;
    TransitionKind kind = TransitionKind::Increment;
    SolveOptions options;
    SolveStats stats;
    /// False when a state-dependent run stops early because t_end fell into a gap.
    bool reached_end = true;

    [[nodiscard]] const Sample& final_sample() const { return samples.back(); }
    /// Sample recorded exactly at t, if any.
    [[nodiscard]] std::optional<Vector> at(double t) const;
};

/// Forward solve of y^Delta = F(t, y), y(t0) = y0 on [t0, t_end].
///
/// Dense pieces are integrated with an adaptive Dormand-Prince 5(4) pair and
/// every accepted step is sampled; at each right-scattered point the
/// transition is applied and both sides of the jump are sampled.
///
/// Throws PointNotInScale, InvalidArgument, BlowUp and StiffnessFailure.
[[nodiscard]] Trajectory solve_ivp(const TimeScale& ts, const PiecewiseRHS& rhs, double t0, const Vector& y0,
                                   double t_end, const SolveOptions& opts = {});

/// A region D of R x R^n given by its slices: scale_of(x) is the time scale
/// of times t with (t, x) in D. Callers assert continuity in x.
struct StateDomain {
    std::function<TimeScale(const Vector&)> scale_of;
};

/// Forward jump sigma(t, x) on the slice D_x.
[[nodiscard]] JumpValue sigma(const StateDomain& dom, double t, const Vector& x);

/// Like solve_ivp, but the scale is re-read from the current state after
/// every accepted step and before every jump. A step whose endpoint leaves
/// the current dense piece is bisected down to the moving boundary.
///
/// Throws LeftDomain, BlowUp, NonterminatingJumps, StiffnessFailure.
[[nodiscard]] Trajectory solve_ivp_state_dependent(const StateDomain& dom, const PiecewiseRHS& rhs, double t0,
                                                   const Vector& y0, double t_end, const SolveOptions& opts = {});

}  // namespace chronoscale
