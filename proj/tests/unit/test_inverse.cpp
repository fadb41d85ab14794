#include <doctest.h>

#include <cmath>

#include "relnewt/boundary.hpp"
#include "relnewt/errors.hpp"
#include "relnewt/inverse.hpp"
#include "relnewt/quadrature.hpp"
#include "relnewt/scattering.hpp"
#include "fixtures.hpp"

using namespace relnewt;

namespace {

// Each dataset is built once and shared across the cases below; rebuilding
// them per case would dominate the suite runtime.
const std::vector<BoundaryDatum>& centered_chords() {
    static const std::vector<BoundaryDatum> data = [] {
        auto ctx = fx::energy2();
        auto model = fx::radial_bump();
        auto disk = fx::unit_disk();
        BoundaryGrid g = boundary_grid(ctx, model, disk, 12, 0.2);
        std::vector<BoundaryDatum> rows;
        rows.reserve(g.rows.size());
        for (const auto& r : g.rows) rows.push_back(r.d);
        return rows;
    }();
    return data;
}

const std::vector<BoundaryDatum>& offset_chords() {
    static const std::vector<BoundaryDatum> data = [] {
        auto ctx = fx::energy2();
        auto model = fx::offset_bump();
        auto disk = fx::unit_disk();
        BoundaryGrid g = boundary_grid(ctx, model, disk, 12, 0.2);
        std::vector<BoundaryDatum> rows;
        rows.reserve(g.rows.size());
        for (const auto& r : g.rows) rows.push_back(r.d);
        return rows;
    }();
    return data;
}

const std::vector<ScatteringDatum>& centered_scattering() {
    static const std::vector<ScatteringDatum> data = [] {
        auto ctx = fx::energy2();
        auto model = fx::radial_bump();
        std::vector<ScatteringDatum> rows;
        for (const MGridPoint& p : m_grid(ctx, 12, 0.85, 9))
            rows.push_back(solve_scattering(ctx, model, p.v_minus, p.x_minus));
        return rows;
    }();
    return data;
}

const std::vector<BumpSite> centered_site{{Vec(0.0, 0.0), 0.8}};

} // namespace

TEST_SUITE("inverse") {

TEST_CASE("amplitude assembly pins one bump per site") {
    std::vector<BumpSite> sites{{Vec(0.0, 0.0), 0.8}, {Vec(0.3, 0.1), 0.5}};
    PotentialModel m = assemble_model(2, sites, {0.1, 0.05});
    auto truth = fx::radial_bump();
    auto extra = fx::offset_bump();
    Vec probe(0.2, 0.05);
    CHECK(m.value(probe) ==
          doctest::Approx(truth.value(probe) + extra.value(probe)).epsilon(1e-15));

    CHECK_THROWS_AS(assemble_model(2, sites, {0.1}), ConfigError);
    std::vector<BumpSite> outside{{Vec(0.6, 0.0), 0.8}};
    CHECK_THROWS_AS(
        boundary_misfit(fx::energy2(), fx::unit_disk(), outside, {0.1}, centered_chords()),
        ConfigError);
    ReconstructOptions opts;
    CHECK_THROWS_AS(
        reconstruct(fx::energy2(), fx::unit_disk(), outside, centered_chords(), opts),
        ConfigError);
}

TEST_CASE("boundary misfit vanishes only at the generating amplitudes") {
    auto ctx = fx::energy2();
    auto disk = fx::unit_disk();
    const auto& data = centered_chords();

    MisfitResult at_truth = boundary_misfit(ctx, disk, centered_site, {0.1}, data);
    CHECK(at_truth.dropped == 0);
    CHECK(at_truth.residuals.size() == 2 * data.size());
    CHECK(at_truth.norm() < 1e-8);

    MisfitResult at_zero = boundary_misfit(ctx, disk, centered_site, {0.0}, data);
    CHECK(at_zero.norm() > 0.1);
}

TEST_CASE("misfit responds linearly near the truth") {
    auto ctx = fx::energy2();
    auto disk = fx::unit_disk();
    const auto& data = centered_chords();
    double d1 = boundary_misfit(ctx, disk, centered_site, {0.1 + 1e-3}, data).norm();
    double d2 = boundary_misfit(ctx, disk, centered_site, {0.1 + 2e-3}, data).norm();
    CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("a degenerate observation is dropped, not fitted") {
    auto ctx = fx::energy2();
    auto disk = fx::unit_disk();
    std::vector<BoundaryDatum> data = centered_chords();
    BoundaryDatum bad = data.front();
    bad.q = bad.q0;  // coincident endpoints cannot be shot
    data.push_back(bad);

    MisfitResult r = boundary_misfit(ctx, disk, centered_site, {0.1}, data);
    CHECK(r.dropped == 1);
    CHECK(r.residuals.size() == 2 * (data.size() - 1));
    CHECK(r.norm() < 1e-8);
}

TEST_CASE("one bump amplitude is recovered from boundary data") {
    auto ctx = fx::energy2();
    auto disk = fx::unit_disk();
    ReconstructOptions opts;
    opts.truth = {0.1};
    ReconstructionReport rep = reconstruct(ctx, disk, centered_site, centered_chords(), opts);

    CHECK(rep.converged);
    CHECK(rep.restarts == 0);
    CHECK(rep.dropped == 0);
    CHECK(rep.truth_error.size() == 1);
    CHECK(rep.truth_error[0] <= 1e-3);
    CHECK(rep.misfit_norm < 1e-6);
    REQUIRE(rep.misfit_history.size() >= 2);
    CHECK(rep.misfit_history.front() > 0.1);
    for (std::size_t i = 1; i < rep.misfit_history.size(); ++i)
        CHECK(rep.misfit_history[i] <= rep.misfit_history[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("a candidate lattice resolves the offset bump") {
    auto ctx = fx::energy2();
    auto disk = fx::unit_disk();
    // 3x3 lattice of fixed sites around the bump; the middle site matches its
    // geometry, so the data has to select it and suppress the other eight
    std::vector<BumpSite> sites;
    for (double cx : {0.18, 0.30, 0.42})
        for (double cy : {-0.02, 0.10, 0.22}) sites.push_back({Vec(cx, cy), 0.5});

    ReconstructOptions opts;
    ReconstructionReport rep = reconstruct(ctx, disk, sites, offset_chords(), opts);
    CHECK(rep.converged);
    REQUIRE(rep.amplitudes.size() == 9);
    CHECK(std::abs(rep.amplitudes[4] - 0.05) < 1e-3);

    PotentialModel fit = assemble_model(2, sites, rep.amplitudes);
    auto truth = fx::offset_bump();
    PolarGrid quad(disk, 96, 32);
    double num = quad.integrate([&](const Vec& x) {
        double d = fit.value(x) - truth.value(x);
        return d * d;
    });
    double den = quad.integrate([&](const Vec& x) {
        double v = truth.value(x);
        return v * v;
    });
    CHECK(std::sqrt(num / den) <= 0.05);
}

TEST_CASE("scattering amplitudes are recovered reproducibly") {
    auto ctx = fx::energy2();
    const auto& data = centered_scattering();

    MisfitResult at_truth = scattering_misfit(ctx, centered_site, {0.1}, data);
    CHECK(at_truth.norm() < 1e-8);
    CHECK(scattering_misfit(ctx, centered_site, {0.0}, data).norm() > 1e-3);

    ReconstructOptions opts;
    opts.truth = {0.1};
    ReconstructionReport rep = reconstruct(ctx, centered_site, data, opts);
    CHECK(rep.converged);
    CHECK(rep.truth_error[0] <= 2e-3);

    ReconstructionReport again = reconstruct(ctx, centered_site, data, opts);
    CHECK(again.amplitudes == rep.amplitudes);
    CHECK(again.misfit_history == rep.misfit_history);
}

TEST_CASE("an impossible iteration budget raises no convergence") {
    auto ctx = fx::energy2();
    ReconstructOptions opts;
    opts.max_iter = 1;
    opts.max_restarts = 1;
    CHECK_THROWS_AS(reconstruct(ctx, centered_site, centered_scattering(), opts),
                    NoConvergence);
}

} // TEST_SUITE
