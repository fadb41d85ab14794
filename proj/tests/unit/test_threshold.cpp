#include <doctest.h>

#include "relnewt/dynamics.hpp"
#include "relnewt/errors.hpp"
#include "fixtures.hpp"

using namespace relnewt;

TEST_SUITE("threshold") {

TEST_CASE("a free disk certifies down to the bottom of the range") {
    auto disk = fx::unit_disk();
    auto model = fx::free_model();
    double thr = estimate_energy_threshold(model, disk, 1.01, 1.5);
    CHECK(thr > 1.01);
    CHECK(thr < 1.03);
}

TEST_CASE("the weak centered bump certifies at moderate energy") {
    auto disk = fx::unit_disk();
    auto model = fx::radial_bump();
    double thr = estimate_energy_threshold(model, disk, 1.1, 4.0);
    CHECK(thr > 1.1);
    CHECK(thr <= 2.0);
}

TEST_CASE("a strong bump certifies only away from the shell floor") {
    auto disk = fx::unit_disk();
    PotentialModel strong(2, {Bump{Vec(0.0, 0.0), 0.9, 0.8}});
    double thr = estimate_energy_threshold(strong, disk, 1.9, 2.0);
    CHECK(thr > 1.9);
    CHECK(thr <= 2.0);
    // observed transition: diagnostics fail at 1.925, pass from 1.9375 up
    CHECK(thr == doctest::Approx(1.9375).epsilon(0.03));
}

TEST_CASE("a range whose top fails reports no threshold") {
    auto disk = fx::unit_disk();
    PotentialModel strong(2, {Bump{Vec(0.0, 0.0), 0.9, 0.8}});
    CHECK_THROWS_AS(estimate_energy_threshold(strong, disk, 1.9, 1.925),
                    ThresholdNotFound);
    // a top below the rest energy is never admissible
    CHECK_THROWS_AS(estimate_energy_threshold(fx::free_model(), disk, 0.5, 0.9),
                    ThresholdNotFound);
}

TEST_CASE("invalid searches are rejected") {
    auto disk = fx::unit_disk();
    auto model = fx::free_model();
    CHECK_THROWS_AS(estimate_energy_threshold(model, disk, 2.0, 1.5), ConfigError);
    CHECK_THROWS_AS(estimate_energy_threshold(model, disk, 1.1, 2.0, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(estimate_energy_threshold(model, disk, 1.1, 2.0, 1.0, 12, 7, 0.0),
                    ConfigError);
    ConvexDomain ball = ConvexDomain::disk(3, Vec(0.0, 0.0, 0.0), 1.0);
    PotentialModel free3(3, {});
    CHECK_THROWS_AS(estimate_energy_threshold(free3, ball, 1.1, 2.0), ConfigError);
}

} // TEST_SUITE
