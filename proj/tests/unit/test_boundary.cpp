#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "relnewt/boundary.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace relnewt;
using fx::Vec;

namespace {

const double kPi = 3.14159265358979323846;

double head_on_transit_time() {
    fx::PotentialModel m = fx::radial_bump();
    fx::EnergyContext ctx = fx::energy2();
    auto f = [&](double x) { return 1.0 / ctx.shell_speed(m.value(Vec(x, 0.0))); };
    return oracle::integrate_pieces(f, {-1.0, -0.8, 0.8, 1.0});
}

} // namespace

TEST_SUITE_BEGIN("boundary");

TEST_CASE("free diameter chord is solved in closed form") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    TransitSolution sol = solve_boundary_value(ctx, m, d, Vec(-1.0, 0.0), Vec(1.0, 0.0));
    double root3 = std::sqrt(3.0);
    CHECK(sol.iterations == 0);
    CHECK(sol.datum.s == doctest::Approx(4.0 / root3).epsilon(1e-13));
    CHECK(sol.datum.k[0] == doctest::Approx(root3 / 2.0).epsilon(1e-14));
    CHECK(sol.datum.k[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sol.datum.k0[0] == doctest::Approx(root3 / 2.0).epsilon(1e-14));
    CHECK(sol.path.duration() == doctest::Approx(sol.datum.s).epsilon(1e-14));
    CHECK(sol.datum.l == 0.0);
}

TEST_CASE("free skew chord matches plane geometry") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    TransitSolution sol = solve_boundary_value(ctx, m, d, Vec(1.0, 0.0), Vec(0.0, 1.0));
    double root3 = std::sqrt(3.0);
    double want_s = std::sqrt(2.0) / (root3 / 2.0);
    CHECK(sol.datum.s == doctest::Approx(want_s).epsilon(1e-13));
    double comp = (root3 / 2.0) / std::sqrt(2.0);
    CHECK(sol.datum.k0[0] == doctest::Approx(-comp).epsilon(1e-13));
    CHECK(sol.datum.k0[1] == doctest::Approx(comp).epsilon(1e-13));
}

TEST_CASE("shooting path reproduces the free chord analytics") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    ShootOptions opts;
    opts.straight_shortcut = false;
    double root3 = std::sqrt(3.0);

    TransitSolution head = solve_boundary_value(ctx, m, d, Vec(-1.0, 0.0), Vec(1.0, 0.0), opts);
    CHECK(head.miss <= 1e-9);
    CHECK(head.datum.s == doctest::Approx(4.0 / root3).epsilon(1e-10));
    CHECK(head.datum.k[0] == doctest::Approx(root3 / 2.0).epsilon(1e-10));

    TransitSolution skew = solve_boundary_value(ctx, m, d, Vec(1.0, 0.0), Vec(0.0, 1.0), opts);
    CHECK(skew.miss <= 1e-9);
    CHECK(skew.datum.s == doctest::Approx(std::sqrt(2.0) / (root3 / 2.0)).epsilon(1e-10));

    // transversality at both endpoints
    CHECK(dot(head.datum.k, d.outward_normal(head.datum.q)) > 0.0);
    CHECK(dot(head.datum.k0, d.outward_normal(head.datum.q0)) < 0.0);
}

TEST_CASE("head on transit through the centered bump follows the slowdown oracle") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    TransitSolution sol = solve_boundary_value(ctx, m, d, Vec(-1.0, 0.0), Vec(1.0, 0.0));
    CHECK(sol.iterations >= 0);
    CHECK(sol.miss <= 1e-9);
    CHECK(sol.datum.s == doctest::Approx(head_on_transit_time()).epsilon(1e-9));
    double root3 = std::sqrt(3.0);
    CHECK(sol.datum.k[0] == doctest::Approx(root3 / 2.0).epsilon(1e-9));
    CHECK(std::abs(sol.datum.k[1]) <= 1e-9);
    CHECK(sol.path.drift_within(1e-9));
}

TEST_CASE("solved pairs sit on the energy shell and cross transversally") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    double shell = ctx.asymptotic_speed();
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    ShootScratch scratch;
    int solved = 0;
    while (solved < 10) {
        double t0 = ang(rng), t1 = ang(rng);
        if (std::abs(std::remainder(t1 - t0, 2.0 * kPi)) < 0.4) continue;
        ++solved;
        TransitSolution sol = solve_boundary_value(ctx, m, d, d.boundary_point(t0),
                                                   d.boundary_point(t1), {}, &scratch);
        CHECK(sol.miss <= 1e-9);
        CHECK(norm(sol.datum.k) == doctest::Approx(shell).epsilon(1e-9));
        CHECK(norm(sol.datum.k0) == doctest::Approx(shell).epsilon(1e-9));
        CHECK(dot(sol.datum.k, d.outward_normal(sol.datum.q)) > 0.0);
        CHECK(dot(sol.datum.k0, d.outward_normal(sol.datum.q0)) < 0.0);
        CHECK(sol.datum.s > 0.0);
    }
}

TEST_CASE("reversing a chord flips the entry velocity") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    ShootScratch scratch;
    int solved = 0;
    while (solved < 8) {
        double t0 = ang(rng), t1 = ang(rng);
        if (std::abs(std::remainder(t1 - t0, 2.0 * kPi)) < 0.4) continue;
        ++solved;
        Vec q0 = d.boundary_point(t0), q1 = d.boundary_point(t1);
        TransitSolution fwd = solve_boundary_value(ctx, m, d, q0, q1, {}, &scratch);
        TransitSolution rev = solve_boundary_value(ctx, m, d, q1, q0, {}, &scratch);
        CHECK(norm(fwd.datum.k0 + rev.datum.k) <= 1e-8);
        CHECK(norm(rev.datum.k0 + fwd.datum.k) <= 1e-8);
        CHECK(fwd.datum.s == doctest::Approx(rev.datum.s).epsilon(1e-8));
    }
}

TEST_CASE("warm started resolve converges in a couple of steps") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    TransitSolution first =
        solve_boundary_value(ctx, m, d, d.boundary_point(0.3), d.boundary_point(2.9));
    ShootOptions warm;
    warm.initial_angle = std::atan2(first.datum.k0[1], first.datum.k0[0]);
    TransitSolution second =
        solve_boundary_value(ctx, m, d, d.boundary_point(0.3), d.boundary_point(2.95), warm);
    CHECK(second.miss <= 1e-9);
    CHECK(second.iterations <= 3);
}

TEST_CASE("uniqueness probe agrees with the warm solve at the working energy") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    Vec q0 = d.boundary_point(0.5), q1 = d.boundary_point(3.7);
    TransitSolution plain = solve_boundary_value(ctx, m, d, q0, q1);
    ShootOptions probe;
    probe.probe_uniqueness = true;
    TransitSolution checked = solve_boundary_value(ctx, m, d, q0, q1, probe);
    CHECK(norm(plain.datum.k0 - checked.datum.k0) <= 1e-9);
    CHECK(plain.datum.s == doctest::Approx(checked.datum.s).epsilon(1e-9));
}

TEST_CASE("a focusing well near the speed floor defeats uniqueness") {
    // attractive well: the conformal weight peaks in the center, so the probe
    // finds bent paths next to the straight one once the energy is low enough
    PotentialModel lens(2, {Bump{Vec(0.0, 0.0), -0.3, 0.7}});
    ConvexDomain d = fx::unit_disk();
    EnergyContext ctx = EnergyContext::make(1.12, 1.0, lens);
    ShootOptions probe;
    probe.probe_uniqueness = true;
    CHECK_THROWS_AS(
        (void)solve_boundary_value(ctx, lens, d, Vec(-1.0, 0.0), Vec(1.0, 0.0), probe),
        NonUnique);
}

TEST_CASE("interior target on a clear segment is solved in closed form") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    TransitSolution sol = solve_to_point(ctx, m, d, Vec(-1.0, 0.0), Vec(0.0, 0.0));
    double root3 = std::sqrt(3.0);
    CHECK(sol.iterations == 0);
    CHECK(sol.datum.s == doctest::Approx(2.0 / root3).epsilon(1e-13));
    CHECK(sol.datum.k[0] == doctest::Approx(root3 / 2.0).epsilon(1e-14));
    CHECK(sol.datum.q0[0] == -1.0);
}

TEST_CASE("interior shooting hits an off axis target through the bump") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    Vec target(0.3, 0.35);
    TransitSolution sol = solve_to_point(ctx, m, d, Vec(-1.0, 0.0), target);
    CHECK(sol.miss <= 1e-9);
    CHECK(sol.datum.s > 0.0);
    CHECK(sol.datum.s < sol.path.duration());
    // arrival speed must sit on the shell at the local potential value
    double want = ctx.shell_speed(m.value(target));
    CHECK(norm(sol.datum.k) == doctest::Approx(want).epsilon(1e-9));
    CHECK(dot(sol.datum.k0, d.outward_normal(sol.datum.q0)) < 0.0);
}

TEST_CASE("interior probe mode stays unique at the working energy") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    ShootOptions probe;
    probe.probe_uniqueness = true;
    TransitSolution sol = solve_to_point(ctx, m, d, Vec(0.0, -1.0), Vec(0.1, 0.2), probe);
    CHECK(sol.miss <= 1e-9);
}

TEST_CASE("free grid rows carry exact chord kinematics") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    BoundaryGrid grid = boundary_grid(ctx, m, d, 16, 0.2);
    CHECK(grid.rows.size() == 16 * 15);
    CHECK(grid.failures.empty());
    double shell = ctx.asymptotic_speed();
    for (const auto& row : grid.rows) {
        Vec chord = row.d.q - row.d.q0;
        Vec want = (shell / norm(chord)) * chord;
        CHECK(norm(row.d.k - want) <= 1e-12);
        CHECK(norm(row.d.k0 - want) <= 1e-12);
        CHECK(row.d.s == doctest::Approx(norm(chord) / shell).epsilon(1e-12));
    }
}

TEST_CASE("bump grid satisfies reversal antisymmetry") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::radial_bump();
    ConvexDomain d = fx::unit_disk();
    BoundaryGrid grid = boundary_grid(ctx, m, d, 16, 0.3);
    CHECK(grid.failures.empty());
    CHECK(grid.rows.size() == 16 * 15);
    std::map<std::pair<int, int>, const BoundaryGridRow*> by_pair;
    for (const auto& row : grid.rows) by_pair[{row.i, row.j}] = &row;
    for (const auto& row : grid.rows) {
        auto it = by_pair.find({row.j, row.i});
        REQUIRE(it != by_pair.end());
        CHECK(norm(row.d.k0 + it->second->d.k) <= 1e-8);
    }
}

TEST_CASE("grid preconditions are enforced") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    CHECK_THROWS_AS((void)boundary_grid(ctx, m, d, 7, 0.2), ConfigError);
    CHECK_THROWS_AS((void)boundary_grid(ctx, m, d, 16, 0.0), ConfigError);
}

TEST_CASE("the row hook sees every converged pair with its live path") {
    EnergyContext ctx = fx::energy2();
    PotentialModel m = fx::free_model();
    ConvexDomain d = fx::unit_disk();
    int calls = 0;
    auto hook = [&calls](BoundaryGridRow& row, const TransitSolution& sol) {
        ++calls;
        row.d.l = sol.path.duration();
    };
    BoundaryGrid grid = boundary_grid(ctx, m, d, 8, 0.2, {}, 1, hook);
    CHECK(calls == static_cast<int>(grid.rows.size()));
    for (const auto& row : grid.rows) CHECK(row.d.l == doctest::Approx(row.d.s));
}

TEST_SUITE_END();
