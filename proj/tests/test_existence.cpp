#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chronoscale/errors.hpp"
#include "chronoscale/existence.hpp"
#include "support/random_scales.hpp"

using namespace chronoscale;

namespace {

TheoremInputs inputs(double a, double b, double M, double N, double L, double eps) {
    TheoremInputs in;
    in.a = a;
    in.b = b;
    in.M = M;
    in.N = N;
    in.L = L;
    in.epsilon = eps;
    return in;
}

PiecewiseRHS linear(double rate, double jump_rate, TransitionKind kind = TransitionKind::Increment) {
    return PiecewiseRHS{[rate](double, const Vector& y) { return Vector(rate * y); },
                        [jump_rate](double, const Vector& y) { return Vector(jump_rate * y); }, kind, 1};
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("compute_alpha examples") {
    CHECK(compute_alpha(inputs(1, 1, 2, 1, 1, 0.1)) == 0.5);
    CHECK(compute_alpha(inputs(10, 1, 1, 1, 0.01, 0.01)) == 1.0);
    CHECK(compute_alpha(inputs(0.2, 100, 1, 1, 1, 0.5)) == 0.2);
}

TEST_CASE("compute_alpha edge cases") {
    CHECK(compute_alpha(inputs(3, 1, 0, 0, 0, 0.1)) == 3.0);  // every other term is infinite
    CHECK(compute_alpha(inputs(3, 1, 0.5, 0, 0, 0.1)) == 2.0);
    CHECK(code_of([] { (void)compute_alpha(inputs(0, 1, 1, 1, 1, 0.1)); }) == ErrorCode::InvalidInputs);
    CHECK(code_of([] { (void)compute_alpha(inputs(1, 1, 1, 1, 1, 1.0)); }) == ErrorCode::InvalidInputs);
    CHECK(code_of([] { (void)compute_alpha(inputs(1, 1, -1, 1, 1, 0.5)); }) == ErrorCode::InvalidInputs);
    CHECK(code_of([] { (void)compute_alpha(inputs(1, 1, NAN, 1, 1, 0.5)); }) == ErrorCode::InvalidInputs);
}

TEST_CASE("property: alpha is monotone and alpha * L <= 1 - epsilon") {
    testsupport::Rng rng(31);
    auto pos = [&] { return std::exp(testsupport::uniform(rng, -4, 4)); };
    for (int trial = 0; trial < 500; ++trial) {
        const TheoremInputs in = inputs(pos(), pos(), pos(), pos(), pos(), testsupport::uniform(rng, 0.01, 0.99));
        const double alpha = compute_alpha(in);
        CHECK(alpha * in.L <= (1 - in.epsilon) * (1 + 1e-15));
        const double grow = 1 + testsupport::uniform(rng, 0.0, 2.0);
        TheoremInputs more = in;
        more.M *= grow;
        CHECK(compute_alpha(more) <= alpha);
        more = in;
        more.N *= grow;
        CHECK(compute_alpha(more) <= alpha);
        more = in;
        more.L *= grow;
        CHECK(compute_alpha(more) <= alpha);
        more = in;
        more.a *= grow;
        CHECK(compute_alpha(more) >= alpha);
        more = in;
        more.b *= grow;
        CHECK(compute_alpha(more) >= alpha);
    }
}

TEST_CASE("truncate_interval") {
    const TimeScale z = make_scale(spec::HIntegers{});
    TheoremInputs in = inputs(1, 1, 2, 1, 1, 0.1);
    in.t0 = 3;

    const TheoremInterval cut = truncate_interval(in, 0.5, z);
    CHECK(cut.lo == 2.5);
    CHECK(cut.hi == 4);
    CHECK(cut.truncated_at_sigma);

    const TheoremInterval wide = truncate_interval(in, 2, z);
    CHECK(wide.lo == 1);
    CHECK(wide.hi == 5);
    CHECK_FALSE(wide.truncated_at_sigma);

    const TheoremInterval dense = truncate_interval(in, 0.5, make_scale(spec::RealLine{}));
    CHECK(dense.lo == 2.5);
    CHECK(dense.hi == 3.5);
    CHECK_FALSE(dense.truncated_at_sigma);
}

TEST_CASE("estimate_bounds") {
    const TimeScale line = make_scale(spec::RealLine{-2, 2});
    Vector y0 = Vector::Zero(1);
    const BoundEstimates est = estimate_bounds(linear(1, 0), line, 0, y0, 1, 1);
    CHECK(est.M <= 1.0);
    CHECK(est.M > 0.7);
    CHECK(est.L == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.N == 0);
    CHECK(est.scattered_set_empty);
    REQUIRE(est.M_at);
    CHECK(line.contains(est.M_at->t));

    const PiecewiseRHS flat{[](double, const Vector&) { return Vector::Constant(1, 3.0); },
                            [](double, const Vector&) { return Vector::Zero(1); }, TransitionKind::Increment, 1};
    const BoundEstimates c = estimate_bounds(flat, line, 0, y0, 1, 1);
    CHECK(c.L == 0);
    CHECK(c.M == 3);

    // N in the increment convention: |J_inc / mu| with J_inc = y(sigma) - y.
    const TimeScale half = make_scale(spec::HIntegers{0.5, 0});
    const BoundEstimates n = estimate_bounds(linear(0, 1, TransitionKind::DeltaRate), half, 0, Vector::Constant(1, 1), 1, 1);
    CHECK_FALSE(n.scattered_set_empty);
    CHECK(n.N <= 2.0);
    CHECK(n.N > 1.7);
}

TEST_CASE("picard_run on the exponential") {
    TheoremInputs in = inputs(1, 2, 3, 0, 1, 0.1);
    in.y0 = Vector::Constant(1, 1);
    const TimeScale ts = make_scale(spec::RealLine{-1, 1});
    const TheoremReport rep = picard_run(ts, linear(1, 1), in);
    CHECK(rep.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rep.converged);
    CHECK(rep.contraction_bound == doctest::Approx(0.9));
    REQUIRE_FALSE(rep.contraction_ratios.empty());
    CHECK(rep.contraction_ratios.back() <= 0.95);
    double worst = 0;
    for (std::size_t i = 0; i < rep.mesh.size(); ++i) {
        worst = std::max(worst, std::abs(rep.fixed_point[i][0] - std::exp(rep.mesh[i])));
    }
    CHECK(worst < 1e-8);
    REQUIRE(rep.solver_gap);
    CHECK(*rep.solver_gap < 1e-7);
    REQUIRE(rep.uniqueness_gap);
    CHECK(*rep.uniqueness_gap < 1e-7);
    CHECK(rep.convention == "increment");
}

TEST_CASE("picard_run with zero laws converges at once") {
    TheoremInputs in = inputs(1, 1, 0, 0, 0, 0.1);
    in.y0 = Vector::Constant(1, 2.5);
    const TheoremReport rep = picard_run(make_scale(spec::PeriodicUnion{0.5, 0.5, 0}), linear(0, 0), in);
    CHECK(rep.converged);
    CHECK(rep.iterates == 1);
    for (double r : rep.contraction_ratios) CHECK(r == 0);
    for (const Vector& v : rep.fixed_point) CHECK(v[0] == 2.5);
}

TEST_CASE("picard_run on a mixed scale matches the solver through the jumps") {
    TheoremInputs in = inputs(1.2, 3, 4, 1, 1, 0.1);
    in.y0 = Vector::Constant(1, 1);
    const TimeScale ts = TimeScale::from_pieces({{-2, -0.3}, {-0.1, 0.2}, {0.35, 0.35}, {0.5, 2}});
    const TheoremReport rep = picard_run(ts, linear(0.5, 0.3), in);
    CHECK(rep.converged);
    REQUIRE(rep.solver_gap);
    CHECK(*rep.solver_gap < 1e-7);
    // Scattered points inside the interval are mesh nodes.
    for (double t : {-0.3, 0.2, 0.35}) {
        if (rep.interval.lo <= t && t <= rep.interval.hi) {
            CHECK(std::find(rep.mesh.begin(), rep.mesh.end(), t) != rep.mesh.end());
        }
    }
}

TEST_CASE("picard_run input checks") {
    TheoremInputs in = inputs(1, 1, 1, 1, 1, 0.1);
    in.y0 = Vector::Constant(1, 1);
    // The scale must reach t0 +- a.
    CHECK(code_of([&] { (void)picard_run(make_scale(spec::RealLine{0, 5}), linear(1, 1), in); }) ==
          ErrorCode::InvalidInputs);
    in.t0 = 0.5;
    CHECK(code_of([&] { (void)picard_run(make_scale(spec::HIntegers{}), linear(1, 1), in); }) ==
          ErrorCode::InvalidInputs);
}

TEST_CASE("picard_run reports an understated bound as leaving the ball") {
    // f = 5y with claimed M = 1: alpha = 0.9 / 5 from L, but the iterates
    // grow by up to 5 * alpha * |y| ~ 0.9 * 1.5 > b = 0.5.
    TheoremInputs in = inputs(1, 0.5, 1, 0, 5, 0.1);
    in.y0 = Vector::Constant(1, 1);
    CHECK(code_of([&] { (void)picard_run(make_scale(spec::RealLine{-1, 1}), linear(5, 0), in); }) ==
          ErrorCode::LeftBall);
}
