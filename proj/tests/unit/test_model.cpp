#include <doctest.h>

#include <cmath>
#include <random>

#include "relnewt/errors.hpp"
#include "relnewt/model.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace relnewt;

TEST_SUITE_BEGIN("model");

TEST_CASE("bump value at a frozen point") {
    PotentialModel m = fx::offset_bump();
    // |x - c| = 0.25, w = 1 - 0.0625/0.25 = 0.75, V = 0.05 * 0.75^3
    CHECK(m.value(Vec(0.3, 0.35)) == doctest::Approx(0.02109375).epsilon(1e-14));
    CHECK(m.value(Vec(0.3, 0.1)) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(m.value(Vec(0.81, 0.1)) == 0.0);
}

TEST_CASE("bump is exactly zero at and beyond its support sphere") {
    PotentialModel m = fx::radial_bump();
    PotentialEval e = m.eval(Vec(0.8, 0.0));
    CHECK(e.value == 0.0);
    CHECK(e.gradient[0] == 0.0);
    CHECK(e.hess(0, 0) == 0.0);
    CHECK(m.value(Vec(5.0, -3.0)) == 0.0);
}

TEST_CASE("gradient and hessian match finite differences of the value") {
    PotentialModel m(2, {Bump{Vec(0.1, -0.2), 0.07, 0.6}, Bump{Vec(-0.3, 0.1), -0.04, 0.5}});
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x(u(rng), u(rng));
        PotentialEval e = m.eval(x);
        for (int i = 0; i < 2; ++i) {
            auto fi = [&](double s) {
                Vec y = x;
                y[i] += s;
                return m.value(y);
            };
            CHECK(e.gradient[i] == doctest::Approx(oracle::deriv(fi, 0.0)).epsilon(1e-7));
            for (int j = 0; j < 2; ++j) {
                auto gij = [&](double s) {
                    Vec y = x;
                    y[j] += s;
                    return m.eval(y).gradient[i];
                };
                CHECK(e.hess(i, j) == doctest::Approx(oracle::deriv(gij, 0.0)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("second derivative norm bound dominates a dense profile scan") {
    PotentialModel m = fx::radial_bump();
    const double A = 0.1, rho = 0.8;
    // scan |V|, |V'|, hessian eigenvalues over the radial profile
    double scan = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double xi = i / 2000.0;
        double s = xi * xi;
        double w = 1.0 - s;
        double value = A * w * w * w;
        double grad = 6.0 * A * xi * w * w / rho;
        double radial = 6.0 * A / (rho * rho) * w * (5.0 * s - 1.0);
        double tangential = 6.0 * A / (rho * rho) * w * w;
        scan = std::max({scan, std::abs(value), std::abs(grad), std::abs(radial),
                         std::abs(tangential)});
    }
    double bound = m.c2_norm_bound();
    CHECK(bound >= scan - 1e-12);
    // the hessian at the center is the overall max for this amplitude and radius
    CHECK(bound == doctest::Approx(6.0 * A / (rho * rho)).epsilon(1e-9));
    CHECK(scan == doctest::Approx(bound).epsilon(1e-6));
}

TEST_CASE("sup bound is tight for a single positive bump") {
    CHECK(fx::radial_bump().sup_bound() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(fx::free_model().sup_bound() == 0.0);
    PotentialModel neg(2, {Bump{Vec(0.0, 0.0), -0.3, 0.5}});
    CHECK(neg.sup_bound() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("construction rejects bad bumps") {
    CHECK_THROWS_AS(PotentialModel(2, {Bump{Vec(0.0, 0.0), 0.1, 0.0}}), ConfigError);
    CHECK_THROWS_AS(PotentialModel(2, {Bump{Vec(0.0, 0.0), 0.1, -1.0}}), ConfigError);
    CHECK_THROWS_AS(PotentialModel(4, {}), ConfigError);
}

TEST_CASE("ray against the unit disk: miss, tangent, chord") {
    ConvexDomain d = fx::unit_disk();
    CHECK(ray_intersections(d, Vec(1.0, 0.0), Vec(0.0, 2.0)).crossings == 0);
    CHECK(ray_intersections(d, Vec(1.0, 0.0), Vec(0.0, 1.0)).crossings == 1);

    RayGeometry g = ray_intersections(d, Vec(std::sqrt(3.0) / 2.0, 0.0), Vec(0.0, 0.5));
    REQUIRE(g.crossings == 2);
    CHECK(g.t_enter == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(g.t_exit == doctest::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(ray_intersections(d, Vec(0.0, 0.0), Vec(0.0, 0.5)), ZeroDirection);
}

TEST_CASE("ray crossing times agree with long double quadratic roots") {
    ConvexDomain e(ConvexDomain::Kind::ellipse, 2, Vec(0.2, -0.1), Vec(1.3, 0.7));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int chords = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(u(rng), u(rng)), x(2.0 * u(rng), 2.0 * u(rng));
        if (norm(v) < 1e-3) continue;
        long double A = 0.0L, B = 0.0L, C = -1.0L;
        for (int i = 0; i < 2; ++i) {
            long double vi = v[i] / e.radii()[i];
            long double xi = (x[i] - e.center()[i]) / e.radii()[i];
            A += vi * vi;
            B += 2.0L * vi * xi;
            C += xi * xi;
        }
        double lo, hi;
        bool real = oracle::quadratic_roots(A, B, C, lo, hi);
        RayGeometry g = ray_intersections(e, v, x);
        if (g.crossings == 2) {
            ++chords;
            REQUIRE(real);
            CHECK(g.t_enter == doctest::Approx(lo).epsilon(1e-12));
            CHECK(g.t_exit == doctest::Approx(hi).epsilon(1e-12));
        }
    }
    CHECK(chords > 5);
}

TEST_CASE("ray against a support ball") {
    RayGeometry g = ray_ball_intersections(Vec(0.0, 0.0), 0.8, Vec(1.0, 0.0), Vec(-2.0, 0.0));
    REQUIRE(g.crossings == 2);
    CHECK(g.t_enter == doctest::Approx(1.2).epsilon(1e-13));
    CHECK(g.t_exit == doctest::Approx(2.8).epsilon(1e-13));
    CHECK(ray_ball_intersections(Vec(0.0, 0.0), 0.8, Vec(1.0, 0.0), Vec(0.0, 0.9)).crossings == 0);
    // zero radius ball is never hit
    CHECK(ray_ball_intersections(Vec(0.0, 0.0), 0.0, Vec(1.0, 0.0), Vec(0.0, 0.0)).crossings == 0);
}

TEST_CASE("domain boundary parametrization round trips") {
    ConvexDomain e(ConvexDomain::Kind::ellipse, 2, Vec(0.1, 0.2), Vec(1.5, 0.8));
    for (double th : {0.0, 0.7, 2.0, -2.5, 3.1}) {
        Vec q = e.boundary_point(th);
        CHECK(std::abs(e.level(q)) < 1e-14);
        double back = e.boundary_param(q);
        CHECK(std::cos(back) == doctest::Approx(std::cos(th)).epsilon(1e-13));
        CHECK(std::sin(back) == doctest::Approx(std::sin(th)).epsilon(1e-13));
        // tangent is orthogonal to the outward normal
        CHECK(std::abs(dot(e.boundary_tangent(th), e.outward_normal(q))) < 1e-13);
    }
}

TEST_CASE("boundary curvature matches the closed form for circle and ellipse") {
    ConvexDomain d = ConvexDomain::disk(2, Vec(0.0, 0.0), 2.0);
    Vec q = d.boundary_point(0.3);
    CHECK(d.normal_curvature(q, d.boundary_tangent(0.3)) == doctest::Approx(0.5).epsilon(1e-13));

    ConvexDomain e(ConvexDomain::Kind::ellipse, 2, Vec(0.0, 0.0), Vec(1.5, 0.8));
    double a = 1.5, b = 0.8;
    for (double th : {0.0, 0.9, 1.57, 2.8}) {
        double expect = a * b / std::pow(a * a * std::sin(th) * std::sin(th) +
                                             b * b * std::cos(th) * std::cos(th),
                                         1.5);
        Vec x = e.boundary_point(th);
        CHECK(e.normal_curvature(x, e.boundary_tangent(th)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("support containment margins") {
    ConvexDomain d = fx::unit_disk();
    PotentialModel m = fx::radial_bump();  // support radius 0.8 centered
    CHECK(support_inside(m, d, 0.19));
    CHECK(!support_inside(m, d, 0.21));
    CHECK(support_inside(fx::offset_bump(), d, 0.1));
    CHECK(support_inside(fx::free_model(), d, 0.5));
}

TEST_CASE("segment clearance against the support") {
    PotentialModel m = fx::radial_bump();
    CHECK(m.segment_clear_of_support(Vec(-1.0, 0.9), Vec(1.0, 0.9)));
    CHECK(!m.segment_clear_of_support(Vec(-1.0, 0.0), Vec(1.0, 0.0)));
    // endpoints outside, chord dips inside
    CHECK(!m.segment_clear_of_support(Vec(-1.0, 0.5), Vec(1.0, -0.5)));
    // free model clears everything
    CHECK(fx::free_model().segment_clear_of_support(Vec(-1.0, 0.0), Vec(1.0, 0.0)));
}

TEST_CASE("enclosing support ball covers every bump") {
    PotentialModel m(2, {Bump{Vec(0.4, 0.0), 0.1, 0.2}, Bump{Vec(-0.4, 0.1), 0.05, 0.3}});
    Vec c = m.support_center();
    double R = m.support_radius();
    for (const Bump& b : m.bumps()) CHECK(norm(b.center - c) + b.radius <= R + 1e-12);
}

TEST_SUITE_END();
