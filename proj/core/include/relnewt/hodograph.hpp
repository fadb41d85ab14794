#pragma once

#include <optional>
#include <vector>

#include "relnewt/boundary.hpp"
#include "relnewt/maupertuis.hpp"
#include "relnewt/quadrature.hpp"

namespace relnewt {

/** Distance value and the two chord-end velocities of one solved pair. */
struct HodographPoint {
    double l = 0.0;
    Vec k;
    Vec k0;
};

/** Metric distance from a boundary point zeta to x (boundary or interior),
    integrated as action along the mechanical transit path. */
HodographPoint hodograph_distance(const EnergyContext& ctx, const PotentialModel& model,
                                  const ConvexDomain& domain, const Vec& zeta, const Vec& x,
                                  const ShootOptions& opts = {});

/** Unit direction of arrival reversed: -k/|k| at the interior point x for the
    transit launched from zeta. Sweeping zeta around the boundary turns this
    field once around the circle for every interior x. */
Vec nu_field(const EnergyContext& ctx, const PotentialModel& model,
             const ConvexDomain& domain, const Vec& zeta, const Vec& x,
             const ShootOptions& opts = {});

/** Central-difference check of the distance gradient against the arrival
    momentum: grad_x l should equal k/sqrt(1 - |k|^2/c^2), with magnitude equal
    to the conformal weight at x (the eikonal property). */
struct GradientProbe {
    Vec diff;                // grad_x l - momentum of k
    double eikonal_rel = 0;  // | |grad_x l| - r(x) | / r(x)
};
GradientProbe gradient_identity_residual(const EnergyContext& ctx,
                                         const PotentialModel& model,
                                         const ConvexDomain& domain, const Vec& zeta,
                                         const Vec& x, double fd_step = 1e-5,
                                         const ShootOptions& opts = {});

/** One solved node of a distance field. For boundary targets theta_x is the
    boundary parameter of the target; for interior targets x is the node. */
struct HodographNode {
    int i = 0;
    int j = 0;
    double theta_zeta = 0.0;
    double theta_x = 0.0;
    Vec x;
    double l = 0.0;
    Vec k;
    Vec k0;
};

/** The sampled distance field. Boundary targets pair two uniform boundary
    grids minus a band |wrap(theta_zeta - theta_x)| < delta around the diagonal;
    interior targets pair the boundary grid with a polar quadrature grid whose
    weights are kept for downstream integrals. */
struct HodographField {
    enum class Target { boundary, interior };
    Target target = Target::boundary;
    int n_zeta = 0;
    int n_x = 0;  // boundary: angle count; interior: total node count
    double delta = 0.0;
    std::vector<double> theta_zeta;
    std::vector<double> theta_x;    // boundary target
    std::vector<Vec> x_points;      // interior target
    std::vector<double> x_weights;  // interior target, polar quadrature weights
    std::vector<HodographNode> nodes;
    std::vector<BoundaryGridFailure> failures;

    /** Node at pair (i, j), nullptr when excluded by the band or failed. */
    const HodographNode* find(int i, int j) const;

    /** Max |l(i,j) - l(j,i)| over solved pairs; boundary target with matching
        grids only. */
    double symmetry_residual() const;

private:
    std::vector<int> node_of_;
    friend HodographField hodograph_grid(const EnergyContext&, const PotentialModel&,
                                         const ConvexDomain&, int, int, Target, double,
                                         const ShootOptions&, int);
};

/** Solves the full field with warm starts along each zeta row, parallel over
    rows. Interior targets build a polar grid with n_x angles and n_x / 2 radial
    nodes (delta is ignored); boundary targets need delta > 0. */
HodographField hodograph_grid(const EnergyContext& ctx, const PotentialModel& model,
                              const ConvexDomain& domain, int n_zeta, int n_x,
                              HodographField::Target target, double delta,
                              const ShootOptions& opts = {}, int threads = 0);

} // namespace relnewt
