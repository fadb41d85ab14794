#pragma once

#include <vector>

#include "relnewt/dynamics.hpp"

namespace relnewt {

/** One scattering experiment at fixed energy. The incoming asymptote is
    x(t) = v_minus t + x_minus for large negative t, the outgoing one is
    x(t) = a t + b for large positive t; compact support makes both exact.
    chi counts support sphere crossings of the incoming line; chi <= 1 means
    the motion never feels the potential and (a, b) = (v_minus, x_minus). */
struct ScatteringDatum {
    Vec v_minus;
    Vec x_minus;
    Vec a;
    Vec b;
    int chi = 0;
};

/** The representative of x + R v orthogonal to v: each asymptote line carries
    exactly one, which is how data land on the fixed energy manifold. */
Vec impact_representation(const Vec& v, const Vec& x);

/** Integrates across the support sphere, entering on the exact incoming line.
    Throws TrappedOrbit when no exit happens within ten support diameters of
    travel, ConfigError unless 0 < |v_minus| < c. */
ScatteringDatum solve_scattering(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& v_minus, const Vec& x_minus,
                                 const OdeOptions& opts = {});

/** One node of the fixed energy manifold sample: a direction and a signed
    impact offset, plus the reconstructed asymptote. n = 3 uses two direction
    angles and a two component offset in the plane orthogonal to the direction. */
struct MGridPoint {
    double phi = 0.0;    // direction angle in the plane, azimuth for n = 3
    double polar = 0.0;  // n = 3 only
    double rho = 0.0;    // signed offset along the first transverse axis
    double rho2 = 0.0;   // n = 3 only
    Vec v_minus;
    Vec x_minus;
};

/** Tensor sample of the manifold: n_phi directions (squared for n = 3) times
    n_rho offsets spanning [-rho_max, rho_max] (squared for n = 3). Offsets are
    exactly orthogonal to the direction and every speed sits on the shell. */
std::vector<MGridPoint> m_grid(const EnergyContext& ctx, int n_phi, double rho_max,
                               int n_rho);

/** |det| of the central difference Jacobian of (v, x) -> (a, b) over the full
    2n dimensional asymptote space. The scattering flow preserves phase volume,
    so the value is a solver diagnostic with target 1. */
double volume_preservation_probe(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& v_minus, const Vec& x_minus,
                                 double fd_step = 1e-5, const OdeOptions& opts = {});

} // namespace relnewt
