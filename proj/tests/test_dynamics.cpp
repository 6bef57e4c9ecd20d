#include <doctest.h>

#include <cmath>

#include "chronoscale/dynamics.hpp"
#include "chronoscale/errors.hpp"
#include "support/random_scales.hpp"

using namespace chronoscale;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

PiecewiseRHS rhs(RhsFunction f, RhsFunction j, TransitionKind kind) { return PiecewiseRHS{f, j, kind, 1}; }

const RhsFunction identity = [](double, const Vector& y) { return y; };
RhsFunction constant(double c) {
    return [c](double, const Vector&) { return scalar(c); };
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

TEST_CASE("evaluate_F under each convention") {
    const TimeScale z = make_scale(spec::HIntegers{});
    CHECK(evaluate_F(rhs(identity, identity, TransitionKind::DeltaRate), z, 0, scalar(1))[0] == 1.0);

    const TimeScale gap2 = TimeScale::from_pieces({{0, 0}, {2, 2}});
    CHECK(evaluate_F(rhs(identity, constant(5), TransitionKind::Assignment), gap2, 0, scalar(1))[0] == 2.0);

    const TimeScale half = make_scale(spec::HIntegers{0.5, 0});
    CHECK(evaluate_F(rhs(identity, constant(3), TransitionKind::Increment), half, 0, scalar(-9))[0] == 6.0);

    // Right-dense points use f whatever the kind.
    const TimeScale line = make_scale(spec::RealLine{});
    CHECK(evaluate_F(rhs(constant(7), constant(3), TransitionKind::Assignment), line, 0, scalar(1))[0] == 7.0);
}

TEST_CASE("transition_apply under each convention") {
    const TimeScale z = make_scale(spec::HIntegers{});
    const Vector y0 = scalar(0.3);
    CHECK(transition_apply(rhs(identity, [&](double, const Vector&) { return y0; }, TransitionKind::Assignment), z, 0,
                           scalar(8))[0] == 0.3);
    CHECK(transition_apply(rhs(identity, identity, TransitionKind::DeltaRate), z, 0, scalar(std::exp(1.0)))[0] ==
          doctest::Approx(5.436563657).epsilon(1e-9));
    CHECK(transition_apply(rhs(identity, constant(0), TransitionKind::Increment), z, 0, scalar(4.5))[0] == 4.5);
    CHECK(code_of([] {
              (void)transition_apply(rhs(identity, identity, TransitionKind::Increment), make_scale(spec::RealLine{}), 0,
                                     scalar(1));
          }) == ErrorCode::NotScattered);
}

TEST_CASE("y(sigma) = y + mu F at every scattered point, for every kind") {
    const TimeScale ts = TimeScale::from_pieces({{0, 1}, {1.75, 1.75}, {3, 4}});
    const RhsFunction j = [](double t, const Vector& y) { return Vector::Constant(1, std::sin(t) + 0.5 * y[0]); };
    for (TransitionKind kind : {TransitionKind::Assignment, TransitionKind::Increment, TransitionKind::DeltaRate}) {
        const PiecewiseRHS r = rhs(identity, j, kind);
        for (double t : {1.0, 1.75}) {
            const Vector y = scalar(0.8);
            const double mu = graininess(ts, t);
            CHECK(transition_apply(r, ts, t, y)[0] == doctest::Approx(y[0] + mu * evaluate_F(r, ts, t, y)[0]).epsilon(1e-15));
        }
    }
}

TEST_CASE("solve_ivp examples") {
    SUBCASE("the unit interval reproduces the exponential") {
        const Trajectory tr = solve_ivp(make_scale(spec::RealLine{0, 1}), rhs(identity, identity, TransitionKind::DeltaRate),
                                        0, scalar(1), 1);
        CHECK(tr.final_sample().t == 1.0);
        CHECK(std::abs(tr.final_sample().y[0] - std::exp(1.0)) < 1e-6);
        CHECK(tr.jumps.empty());
    }
    SUBCASE("the integers double at every step") {
        const Trajectory tr = solve_ivp(make_scale(spec::HIntegers{}), rhs(identity, identity, TransitionKind::DeltaRate),
                                        0, scalar(1), 10);
        CHECK(tr.final_sample().y[0] == 1024.0);
        CHECK(tr.samples.size() == 11);
        CHECK(tr.jumps.size() == 10);
    }
    SUBCASE("alternating runs grow by 2e per period") {
        const Trajectory tr = solve_ivp(make_scale(spec::PeriodicUnion{1, 1, 0}),
                                        rhs(identity, identity, TransitionKind::DeltaRate), 0, scalar(1), 4);
        const double two_e = 2 * std::exp(1.0);
        CHECK(tr.at(2).value()[0] == doctest::Approx(two_e).epsilon(1e-7));
        CHECK(tr.at(4).value()[0] == doctest::Approx(two_e * two_e).epsilon(1e-7));
        CHECK(tr.jumps.size() == 2);
        CHECK(tr.jumps[0].t == 1.0);
        CHECK(tr.jumps[0].sigma == 2.0);
    }
}

TEST_CASE("solve_ivp invariants of the output") {
    const TimeScale ts = TimeScale::from_pieces({{0, 1}, {1.5, 1.5}, {2, 3.5}, {4, 4}, {5, 6}});
    const PiecewiseRHS r = rhs([](double t, const Vector& y) { return Vector::Constant(1, std::cos(t) - 0.2 * y[0]); },
                               [](double, const Vector& y) { return Vector::Constant(1, 0.5 * y[0] + 1); },
                               TransitionKind::Assignment);
    const Trajectory tr = solve_ivp(ts, r, 0, scalar(1), 5.5);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i - 1].t < tr.samples[i].t);
    for (const Sample& s : tr.samples) CHECK(ts.contains(s.t));
    CHECK(tr.final_sample().t == 5.5);
    REQUIRE(tr.jumps.size() == 4);
    for (const JumpRecord& j : tr.jumps) {
        // Jump-record consistency, bit for bit.
        CHECK(transition_apply(r, ts, j.t, j.before) == j.after);
        CHECK(tr.at(j.t).value() == j.before);
        CHECK(tr.at(j.sigma).value() == j.after);
    }
    // Determinism.
    const Trajectory again = solve_ivp(ts, r, 0, scalar(1), 5.5);
    REQUIRE(again.samples.size() == tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        CHECK(again.samples[i].t == tr.samples[i].t);
        CHECK(again.samples[i].y == tr.samples[i].y);
    }
}

TEST_CASE("output_times are sampled exactly") {
    SolveOptions opts;
    opts.output_times = {0.25, 0.5, 0.75};
    const Trajectory tr = solve_ivp(make_scale(spec::RealLine{0, 1}), rhs(identity, identity, TransitionKind::Increment), 0,
                                    scalar(1), 1, opts);
    for (double t : opts.output_times) {
        REQUIRE(tr.at(t));
        CHECK(tr.at(t).value()[0] == doctest::Approx(std::exp(t)).epsilon(1e-8));
    }
}

TEST_CASE("solve_ivp errors") {
    const PiecewiseRHS grow = rhs(identity, identity, TransitionKind::DeltaRate);
    const TimeScale runs = TimeScale::from_pieces({{0, 1}, {2, 3}});
    CHECK(code_of([&] { (void)solve_ivp(runs, grow, 1.5, scalar(1), 3); }) == ErrorCode::PointNotInScale);
    CHECK(code_of([&] { (void)solve_ivp(runs, grow, 0, scalar(1), 1.5); }) == ErrorCode::PointNotInScale);
    CHECK(code_of([&] { (void)solve_ivp(runs, grow, 2, scalar(1), 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)solve_ivp(runs, grow, 0, scalar(NAN), 1); }) == ErrorCode::InvalidArgument);

    SolveOptions small;
    small.max_norm = 100;
    CHECK(code_of([&] {
              (void)solve_ivp(make_scale(spec::HIntegers{}), grow, 0, scalar(1), 20, small);
          }) == ErrorCode::BlowUp);
    const PiecewiseRHS square = rhs([](double, const Vector& y) { return y.cwiseProduct(y); }, identity,
                                    TransitionKind::Increment);
    // y' = y^2 from 1 blows up at t = 1.
    const ErrorCode c = code_of([&] { (void)solve_ivp(make_scale(spec::RealLine{0, 2}), square, 0, scalar(1), 2); });
    CHECK((c == ErrorCode::BlowUp || c == ErrorCode::StiffnessFailure));
}

TEST_CASE("state-dependent solve with a constant domain matches the fixed-scale solve") {
    const TimeScale ts = TimeScale::from_pieces({{0, 1}, {1.5, 1.5}, {2, 3}});
    const StateDomain dom{[ts](const Vector&) { return ts; }};
    const PiecewiseRHS r = rhs([](double t, const Vector& y) { return Vector::Constant(1, y[0] * std::sin(t)); },
                               constant(0.5), TransitionKind::Increment);
    const Trajectory fixed = solve_ivp(ts, r, 0, scalar(1), 3);
    const Trajectory moving = solve_ivp_state_dependent(dom, r, 0, scalar(1), 3);
    REQUIRE(fixed.samples.size() == moving.samples.size());
    for (std::size_t i = 0; i < fixed.samples.size(); ++i) {
        CHECK(fixed.samples[i].t == moving.samples[i].t);
        CHECK(std::abs(fixed.samples[i].y[0] - moving.samples[i].y[0]) <= 1e-12);
    }
}

TEST_CASE("state-dependent gap: the jump reaches 1 + |x|") {
    const StateDomain dom{[](const Vector& x) {
        const double width = std::abs(x[0]);
        if (width == 0.0) return make_scale(spec::RealLine{});
        return make_scale(spec::PieceList{{{-kInfinity, 1}, {1 + width, kInfinity}}});
    }};
    CHECK(sigma(dom, 1, scalar(2)).value == 3);
    CHECK(sigma(dom, 1, scalar(0)).value == 1);

    SUBCASE("y(1) = 2 jumps to 3") {
        const PiecewiseRHS r = rhs(constant(0), identity, TransitionKind::Assignment);
        const Trajectory tr = solve_ivp_state_dependent(dom, r, 0, scalar(2), 4);
        REQUIRE(tr.jumps.size() == 1);
        CHECK(tr.jumps[0].t == 1);
        CHECK(tr.jumps[0].sigma == 3);
        CHECK(tr.final_sample().t == 4);
    }
    SUBCASE("y = 0 never jumps") {
        const PiecewiseRHS r = rhs(constant(0), identity, TransitionKind::Assignment);
        const Trajectory tr = solve_ivp_state_dependent(dom, r, 0, scalar(0), 4);
        CHECK(tr.jumps.empty());
        CHECK(tr.final_sample().t == 4);
    }
    SUBCASE("a landing point outside the new slice is an error") {
        const PiecewiseRHS r = rhs(constant(0), constant(1), TransitionKind::Increment);
        CHECK(code_of([&] { (void)solve_ivp_state_dependent(dom, r, 0, scalar(2), 4); }) == ErrorCode::LeftDomain);
    }
    SUBCASE("t_end inside the gap stops early") {
        const PiecewiseRHS r = rhs(constant(0), identity, TransitionKind::Assignment);
        const Trajectory tr = solve_ivp_state_dependent(dom, r, 0, scalar(2), 2);
        CHECK_FALSE(tr.reached_end);
        CHECK(tr.final_sample().t == 1);
    }
}

TEST_CASE("state-dependent solve locates a boundary that moves with the state") {
    // D_x = (-inf, 1 + x] U [3 + x, inf) with x' = 0.5 from x(0) = 0: the run
    // ends where t = 1 + 0.5 t, at t = 2, and the jump lands at 3 + x = 4.
    const StateDomain dom{[](const Vector& x) {
        return make_scale(spec::PieceList{{{-kInfinity, 1 + x[0]}, {3 + x[0], kInfinity}}});
    }};
    const PiecewiseRHS r = rhs(constant(0.5), constant(0), TransitionKind::Increment);
    const Trajectory tr = solve_ivp_state_dependent(dom, r, 0, scalar(0), 6);
    REQUIRE(tr.jumps.size() == 1);
    CHECK(tr.jumps[0].t == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(tr.jumps[0].sigma == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(tr.final_sample().t == 6);
}

TEST_CASE("nonterminating jumps are capped") {
    // Each jump lands on an isolated point; the cap stops the run.
    const StateDomain dom{[](const Vector&) { return make_scale(spec::HIntegers{1e-3, 0}); }};
    SolveOptions opts;
    opts.max_jumps = 100;
    CHECK(code_of([&] {
              (void)solve_ivp_state_dependent(dom, rhs(identity, constant(0), TransitionKind::Increment), 0, scalar(1), 1,
                                              opts);
          }) == ErrorCode::NonterminatingJumps);
}
