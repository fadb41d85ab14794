#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relnewt/boundary.hpp"
#include "relnewt/dynamics.hpp"
#include "relnewt/model.hpp"

namespace relnewt {

/** Mesh sizes shared by the dataset and field commands. */
struct GridSpec {
    int n_theta = 32;       // boundary data grid
    double delta = 0.2;     // diagonal exclusion band
    int n_zeta = 64;        // hodograph source angles
    int n_x = 48;           // hodograph target resolution
    int quad_angular = 128; // interior quadrature angles
    int quad_radial = 48;   // interior quadrature radial nodes
};

/** One experiment as described by a JSON config file. Parsing is strict:
    unknown keys, wrong types, and mismatched dimensions are ConfigError,
    and the energy must clear the rest energy plus the potential maximum. */
struct ExperimentConfig {
    int dimension = 2;
    double light_speed = 1.0;
    double energy = 2.0;
    ConvexDomain domain = ConvexDomain::disk(2, Vec(0.0, 0.0), 1.0);
    std::vector<Bump> potential;
    std::optional<std::vector<Bump>> potential_pair;
    OdeOptions ode;
    ShootOptions shoot;
    GridSpec grid;
    unsigned seed = 1;
    int threads = 0;
    std::string output = "out";

    EnergyContext context() const { return EnergyContext{energy, light_speed, dimension}; }
    PotentialModel model() const { return PotentialModel(dimension, potential); }
    /** Second model of a comparison pair; ConfigError when the config has none. */
    PotentialModel pair_model() const;
    /** ConfigError unless every bump support stays strictly inside the domain. */
    void require_support_inside() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

} // namespace relnewt
