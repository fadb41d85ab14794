#include <doctest.h>

#include <cmath>
#include <random>

#include "relnewt/dynamics.hpp"
#include "relnewt/errors.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace relnewt;

namespace {

const double kSqrt3 = std::sqrt(3.0);

/** Time the straight crossing of the radial bump disk takes along the x axis,
    by quadrature of 1 / shell speed. Kinks of the integrand sit at |x| = 0.8. */
double head_on_transit_time(double a, double b) {
    fx::PotentialModel m = fx::radial_bump();
    fx::EnergyContext ctx = fx::energy2();
    auto f = [&](double x) { return 1.0 / ctx.shell_speed(m.value(Vec(x, 0.0))); };
    return oracle::integrate_pieces(f, {a, -0.8, 0.8, b});
}

} // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("shell kinematics at the working energy") {
    EnergyContext ctx = fx::energy2();
    CHECK(ctx.shell_speed(0.0) == doctest::Approx(kSqrt3 / 2.0).epsilon(1e-15));
    CHECK(ctx.shell_momentum(0.0) == doctest::Approx(kSqrt3).epsilon(1e-15));
    CHECK(ctx.asymptotic_speed() == doctest::Approx(kSqrt3 / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(ctx.shell_speed(1.2), BelowShell);
    CHECK_THROWS_AS((EnergyContext{1.05, 1.0, 2}.shell_momentum(0.1)), BelowShell);
}

TEST_CASE("context factory validates admissibility") {
    CHECK_NOTHROW(EnergyContext::make(2.0, 1.0, fx::radial_bump()));
    CHECK_THROWS_AS(EnergyContext::make(1.05, 1.0, fx::radial_bump()), BelowShell);
    CHECK_THROWS_AS(EnergyContext::make(2.0, -1.0, fx::radial_bump()), ConfigError);
}

TEST_CASE("velocity and momentum are inverse maps and respect the light cone") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 30; ++i) {
        Vec p(u(rng), u(rng));
        Vec v = velocity_of(p, 1.0);
        CHECK(norm(v) < 1.0);
        Vec back = momentum_of(v, 1.0);
        CHECK(back[0] == doctest::Approx(p[0]).epsilon(1e-12));
        CHECK(back[1] == doctest::Approx(p[1]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(momentum_of(Vec(1.0, 0.0), 1.0), BelowShell);
}

TEST_CASE("total energy at a frozen state") {
    PhaseState s{Vec(0.0, 0.0), Vec(kSqrt3, 0.0)};
    CHECK(hamiltonian(fx::energy2(), fx::radial_bump(), s) ==
          doctest::Approx(2.1).epsilon(1e-14));
}

TEST_CASE("free motion is exact") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    Vec v0(ctx.asymptotic_speed(), 0.0);
    PhaseState s0{Vec(-1.0, 0.25), momentum_of(v0, 1.0)};
    Trajectory tr = integrate(ctx, m, s0, StopCondition::at_time(2.0));
    PhaseState sE = tr.final_state();
    CHECK(sE.x[0] == doctest::Approx(-1.0 + 2.0 * v0[0]).epsilon(1e-13));
    CHECK(sE.x[1] == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(sE.p[0] == s0.p[0]);
    CHECK(sE.p[1] == s0.p[1]);
    CHECK(tr.max_drift() < 1e-14);
}

TEST_CASE("domain exit lands on the boundary to event tolerance") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    PhaseState s0{Vec(-1.0, 0.0), momentum_of(Vec(ctx.asymptotic_speed(), 0.0), 1.0)};
    Trajectory tr = integrate(ctx, m, s0, StopCondition::on_domain_exit(d));
    REQUIRE(tr.stop_reason() == StopReason::event);
    PhaseState sE = tr.final_state();
    CHECK(std::abs(d.level(sE.x)) < 1e-12);
    CHECK(sE.x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(sE.x[1]) < 1e-10);

    // transit time against the quadrature reference
    CHECK(tr.duration() == doctest::Approx(head_on_transit_time(-1.0, 1.0)).epsilon(1e-10));
    // the crossing slows the particle, so it takes longer than the free chord
    CHECK(tr.duration() > 2.0 / ctx.asymptotic_speed());
}

TEST_CASE("energy drift stays within the per unit time budget on bump chords") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979323846);
    for (int i = 0; i < 10; ++i) {
        double t0 = ang(rng), t1 = ang(rng);
        if (std::abs(t0 - t1) < 0.3) continue;
        Vec q0 = d.boundary_point(t0);
        Vec dir = normalized(d.boundary_point(t1) - q0);
        PhaseState s0{q0, momentum_of(ctx.asymptotic_speed() * dir, 1.0)};
        Trajectory tr = integrate(ctx, m, s0, StopCondition::on_domain_exit(d));
        CHECK(tr.max_drift() <= 1e-9 * std::max(1.0, tr.duration()));
        CHECK(tr.drift_within(1e-9));
    }
}

TEST_CASE("support exit stops on the support sphere with asymptotic speed") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    PhaseState s0{Vec(-2.0, 0.3), momentum_of(Vec(ctx.asymptotic_speed(), 0.0), 1.0)};
    Trajectory tr = integrate(ctx, m, s0, StopCondition::on_support_exit());
    REQUIRE(tr.stop_reason() == StopReason::event);
    Vec xe = tr.final_state().x;
    CHECK(norm(xe) == doctest::Approx(0.8).epsilon(1e-11));
    CHECK(xe[0] > 0.0);  // the far crossing, not the entry
    CHECK(norm(velocity_of(tr.final_state().p, 1.0)) ==
          doctest::Approx(ctx.asymptotic_speed()).epsilon(1e-10));
}

TEST_CASE("a path that never crosses the stop surface reports the failure") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    // moving away from the support, the exit level never crosses upward from inside
    PhaseState s0{Vec(2.0, 2.0), momentum_of(Vec(0.5, 0.0), 1.0)};
    CHECK_THROWS_AS(integrate(ctx, m, s0, StopCondition::on_support_exit(10.0)),
                    EventNotFound);
}

TEST_CASE("dense trajectory evaluation matches direct integration to interior times") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    PhaseState s0{Vec(-1.0, 0.1), momentum_of(ctx.asymptotic_speed() * normalized(Vec(1.0, -0.05)), 1.0)};
    Trajectory tr = integrate(ctx, m, s0, StopCondition::at_time(1.7));
    for (double t : {0.3, 0.77, 1.21, 1.55}) {
        Trajectory direct = integrate(ctx, m, s0, StopCondition::at_time(t));
        PhaseState a = tr.eval(t);
        PhaseState b = direct.final_state();
        CHECK(a.x[0] == doctest::Approx(b.x[0]).epsilon(1e-9));
        CHECK(a.x[1] == doctest::Approx(b.x[1]).epsilon(1e-9));
        CHECK(a.p[0] == doctest::Approx(b.p[0]).epsilon(1e-9));
    }
}

TEST_SUITE_END();
