#pragma once

#include "relnewt/boundary.hpp"
#include "relnewt/scattering.hpp"

namespace relnewt {

/** Rewrites a scattering datum as the boundary datum of the chord its
    asymptotes cut through the domain: q0 and q are the line-domain
    intersection points, s the time between them, k0 and k the asymptote
    velocities. Requires the support inside the domain, so the motion is free
    outside and both intersections are exact. Throws NoChord when either
    asymptote line misses the domain. The metric length slot is left at zero;
    conversion has no dynamical information to fill it. */
BoundaryDatum scattering_to_boundary(const ConvexDomain& domain, const ScatteringDatum& d);

/** The converse direction: reconstructs the scattering datum of an asymptote
    by forward integration across the domain, the constructive uniqueness
    argument. An asymptote missing the domain comes back unchanged, as free
    data. */
ScatteringDatum boundary_to_scattering(const EnergyContext& ctx, const PotentialModel& model,
                                       const ConvexDomain& domain, const Vec& v_minus,
                                       const Vec& x_minus, const OdeOptions& opts = {});

} // namespace relnewt
