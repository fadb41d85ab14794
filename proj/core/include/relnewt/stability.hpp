#pragma once

// Stability functionals of the boundary distance field. The pairing of two
// distance fields bounds the L2 misfit of their conformal weights; the same
// pairing has a boundary-pair form and an interior form, and the agreement of
// the two is a strong consistency check on the whole geodesic pipeline.

#include "relnewt/hodograph.hpp"
#include "relnewt/maupertuis.hpp"

namespace relnewt {

/** Pairing of the tangential derivatives of the distance difference over
    boundary pairs: integral of -(d l_diff / d theta_x)(d l_diff / d theta_zeta)
    over the two boundary angles. Derivatives use high order periodic stencils,
    the integral the periodic trapezoid rule. Both fields must share a grid; the
    excluded diagonal band is treated as exactly zero, which is exact whenever
    the supports stay clear of the rim so that near diagonal chords are free for
    both models. Throws GridMismatch on shape or coverage differences. */
double boundary_pairing(const HodographField& f1, const HodographField& f2);

/** The same quadrature kept pointwise: values is the row major integrand over
    (theta_zeta, theta_x) including the ringing at the band edges of the zero
    extension, and integral its product grid trapezoid sum, equal to
    boundary_pairing on the same pair. */
struct PairingField {
    int n_zeta = 0;
    int n_x = 0;
    std::vector<double> values;
    double integral = 0.0;
};
PairingField boundary_pairing_field(const HodographField& f1, const HodographField& f2);

/** The same quantity through the interior representation: for each source
    angle and interior point, r1^2 a1' + r2^2 a2' - (g1 . g2)(a1' + a2') where
    a_i is the arrival bearing of field i swept over the source circle and g_i
    the distance gradient reconstructed from the stored arrival velocity. The
    weights r_i are evaluated analytically from the metric fields. Integrates
    with the fields' polar weights. Throws GridMismatch. */
double interior_pairing(const HodographField& f1, const HodographField& f2,
                        const MetricField& g1, const MetricField& g2);

/** Mesh parameters for the full estimate run. */
struct StabilityMesh {
    int n_boundary = 64;     // boundary field nodes per angle axis
    double delta = 0.2;      // diagonal band, also evaluated at delta / 2
    int n_zeta = 64;         // source angles of the interior fields
    int n_x = 48;            // angular resolution of the interior point grid
    int quad_angular = 128;  // disk quadrature of the weight misfit
    int quad_radial = 48;
    int threads = 0;
};

struct StabilityReport {
    double weight_misfit = 0.0;     // integral of (r1 - r2)^2 over the domain
    double pairing_delta = 0.0;     // boundary pairing at the band width delta
    double pairing_half = 0.0;      // and at delta / 2
    double pairing = 0.0;           // band width extrapolated to zero
    double interior = 0.0;          // interior representation of the pairing
    double bound = 0.0;             // pairing / (2 pi), the estimate right side
    double slack = 0.0;             // bound - weight_misfit, nonnegative in theory
    double pairing_gap = 0.0;       // |pairing - interior|
    StabilityMesh mesh;
};

/** Full estimate for a pair of admissible plane potentials: builds boundary
    fields at delta and delta / 2, interior fields, both pairings, and the
    misfit quadrature. */
StabilityReport stability_estimate(const EnergyContext& ctx, const PotentialModel& m1,
                                   const PotentialModel& m2, const ConvexDomain& domain,
                                   const StabilityMesh& mesh = {});

} // namespace relnewt
