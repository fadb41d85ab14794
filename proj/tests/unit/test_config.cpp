#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "relnewt/config.hpp"
#include "relnewt/errors.hpp"

using namespace relnewt;

namespace {

const char* full_text = R"({
  "dimension": 2,
  "light_speed": 1.0,
  "energy": 2.0,
  "domain": {"kind": "disk", "center": [0.0, 0.0], "radius": 1.0},
  "potential": [{"center": [0.0, 0.0], "amplitude": 0.1, "radius": 0.8}],
  "potential_pair": [{"center": [0.3, 0.1], "amplitude": 0.05, "radius": 0.5}],
  "ode": {"rel_tol": 1e-9, "abs_tol": 1e-11},
  "shooting": {"residual_tol": 1e-8, "max_iter": 40},
  "grid": {"n_theta": 16, "delta": 0.3, "n_zeta": 32, "n_x": 24,
           "quad_angular": 64, "quad_radial": 24},
  "seed": 9,
  "threads": 2,
  "output": "runs/a"
})";

bool thrown_with(const char* text, const char* needle) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("a full config lands in typed values") {
    ExperimentConfig cfg = parse_config(full_text);
    CHECK(cfg.dimension == 2);
    CHECK(cfg.energy == 2.0);
    CHECK(cfg.domain.kind() == ConvexDomain::Kind::disk);
    CHECK(cfg.domain.radii()[0] == 1.0);
    REQUIRE(cfg.potential.size() == 1);
    CHECK(cfg.potential[0].amplitude == 0.1);
    CHECK(cfg.potential[0].radius == 0.8);
    REQUIRE(cfg.potential_pair.has_value());
    CHECK((*cfg.potential_pair)[0].center[0] == 0.3);
    CHECK(cfg.ode.rel_tol == 1e-9);
    CHECK(cfg.shoot.residual_tol == 1e-8);
    CHECK(cfg.shoot.max_iter == 40);
    // the integrator block feeds the per shot integrations too
    CHECK(cfg.shoot.ode.rel_tol == 1e-9);
    CHECK(cfg.grid.n_theta == 16);
    CHECK(cfg.grid.delta == 0.3);
    CHECK(cfg.grid.quad_radial == 24);
    CHECK(cfg.seed == 9);
    CHECK(cfg.threads == 2);
    CHECK(cfg.output == "runs/a");

    CHECK(cfg.context().energy == 2.0);
    CHECK(cfg.model().dim() == 2);
    CHECK(cfg.pair_model().dim() == 2);
    cfg.require_support_inside();
}

TEST_CASE("defaults fill everything optional") {
    ExperimentConfig cfg = parse_config(
        R"({"dimension": 2, "energy": 2.0,
            "domain": {"kind": "disk"}, "potential": []})");
    CHECK(cfg.light_speed == 1.0);
    CHECK(cfg.ode.rel_tol == 1e-10);
    CHECK(cfg.shoot.residual_tol == 1e-9);
    CHECK(cfg.grid.n_theta == 32);
    CHECK(cfg.seed == 1);
    CHECK(cfg.threads == 0);
    CHECK(cfg.output == "out");
    CHECK(!cfg.potential_pair.has_value());
    CHECK_THROWS_AS(cfg.pair_model(), ConfigError);
}

TEST_CASE("an ellipse domain parses with its radii") {
    ExperimentConfig cfg = parse_config(
        R"({"dimension": 2, "energy": 2.0,
            "domain": {"kind": "ellipse", "center": [0.1, 0.0], "radii": [1.5, 1.0]},
            "potential": []})");
    CHECK(cfg.domain.kind() == ConvexDomain::Kind::ellipse);
    CHECK(cfg.domain.radii()[0] == 1.5);
    CHECK(cfg.domain.center()[0] == 0.1);
}

TEST_CASE("unknown keys are rejected at every level") {
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [], "extra": 1})",
                      "extra"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0,
                          "domain": {"kind": "disk", "color": "red"}, "potential": []})",
                      "color"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [{"center": [0,0], "amplitude": 0.1,
                                         "radius": 0.5, "height": 2}]})",
                      "height"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [], "ode": {"rel_tol": 1e-9, "speed": 3}})",
                      "speed"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [], "grid": {"cells": 5}})",
                      "cells"));
}

TEST_CASE("invalid configurations are rejected with reasons") {
    CHECK(thrown_with("{", "not valid JSON"));
    CHECK(thrown_with(R"([1, 2])", "top level"));
    CHECK(thrown_with(R"({"dimension": 4, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": []})",
                      "dimension"));
    CHECK(thrown_with(R"({"energy": 2.0, "domain": {"kind": "disk"}, "potential": []})",
                      "dimension"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": "two", "domain": {"kind": "disk"},
                          "potential": []})",
                      "energy"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0,
                          "domain": {"kind": "ellipse", "radius": 1.0}, "potential": []})",
                      "radii"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0,
                          "domain": {"kind": "square"}, "potential": []})",
                      "square"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [{"center": [0,0,0], "amplitude": 0.1,
                                         "radius": 0.5}]})",
                      "center"));
    CHECK(thrown_with(R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
                          "potential": [], "threads": -1})",
                      "threads"));
    // the shell floor c^2 + sup V = 1.1 is not cleared
    CHECK(thrown_with(R"({"dimension": 2, "energy": 1.05, "domain": {"kind": "disk"},
                          "potential": [{"center": [0,0], "amplitude": 0.1,
                                         "radius": 0.5}]})",
                      "config"));
}

TEST_CASE("support containment is checked on demand, not on load") {
    ExperimentConfig cfg = parse_config(
        R"({"dimension": 2, "energy": 2.0, "domain": {"kind": "disk"},
            "potential": [{"center": [0.6, 0.0], "amplitude": 0.1, "radius": 0.8}]})");
    CHECK(cfg.model().dim() == 2);
    CHECK_THROWS_AS(cfg.require_support_inside(), ConfigError);
}

TEST_CASE("files load with the path in any complaint") {
    std::string path = "/tmp/relnewt_config_test.json";
    {
        std::ofstream out(path);
        out << full_text;
    }
    ExperimentConfig cfg = load_config(path);
    CHECK(cfg.grid.n_theta == 16);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_config("/tmp/relnewt_no_such_config.json"), ConfigError);

    {
        std::ofstream out(path);
        out << "{\"dimension\": 2}";
    }
    try {
        load_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    std::remove(path.c_str());
}

} // TEST_SUITE
