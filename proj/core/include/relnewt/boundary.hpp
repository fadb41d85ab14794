#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relnewt/dynamics.hpp"

namespace relnewt {

/** One solved fixed energy transit. q0 sits on the boundary; q is the exit point
    for boundary targets, the arrival point for interior targets. k0 points
    inward at q0, k is the velocity on arrival. l is the conformal metric length
    of the path, zero until a metric pass fills it. */
struct BoundaryDatum {
    Vec q0 = Vec::zero(2);
    Vec q = Vec::zero(2);
    double s = 0.0;
    Vec k = Vec::zero(2);
    Vec k0 = Vec::zero(2);
    double l = 0.0;
};

struct ShootOptions {
    double residual_tol = 1e-9;  // euclidean miss distance at the target
    double fd_step = 1e-7;       // finite difference step on the direction angle
    int max_iter = 60;
    OdeOptions ode;              // integrator knobs for every shot
    // Exact free chord when the straight segment is clear of the support.
    bool straight_shortcut = true;
    // Run the spread multistart even when the warm path converged, and fail
    // with NonUnique when distinct solutions appear.
    bool probe_uniqueness = false;
    std::optional<double> initial_angle;  // overrides the chord direction guess
    std::optional<double> initial_time;   // interior targets: arrival time guess
};

/** A converged solve: the datum plus the path that realizes it. The trajectory
    starts at t = 0; for boundary targets it ends at s, for interior targets the
    arrival time lies inside its span. */
struct TransitSolution {
    BoundaryDatum datum;
    Trajectory path;
    int iterations = 0;  // Newton steps spent, 0 for the straight shortcut
    double miss = 0.0;   // euclidean residual at the target
};

/** Reusable integration buffers for solver loops. */
struct ShootScratch {
    OdeSolution main;
    OdeSolution probe;
};

/** Shooting solve of the two point boundary problem: find the initial direction
    whose trajectory from q0 exits the domain at q. Newton iteration on the
    direction angle with a finite difference derivative, damped, seeded by the
    chord direction. Throws NoConvergence when every start fails and NonUnique
    when distinct converged directions appear. Planar domains only. */
TransitSolution solve_boundary_value(const EnergyContext& ctx, const PotentialModel& model,
                                     const ConvexDomain& domain, const Vec& q0, const Vec& q,
                                     const ShootOptions& opts = {},
                                     ShootScratch* scratch = nullptr);

/** Same solve with an interior target: finds direction and arrival time such
    that the trajectory from q0 passes through x. x must lie strictly inside. */
TransitSolution solve_to_point(const EnergyContext& ctx, const PotentialModel& model,
                               const ConvexDomain& domain, const Vec& q0, const Vec& x,
                               const ShootOptions& opts = {},
                               ShootScratch* scratch = nullptr);

struct BoundaryGridRow {
    int i = 0, j = 0;
    double theta0 = 0.0, theta1 = 0.0;
    BoundaryDatum d;
};

struct BoundaryGridFailure {
    int i = 0, j = 0;
    std::string message;
};

struct BoundaryGrid {
    int n_theta = 0;
    double delta = 0.0;
    std::vector<double> thetas;
    std::vector<BoundaryGridRow> rows;       // ordered by (i, j)
    std::vector<BoundaryGridFailure> failures;
};

/** Hook run on each converged grid pair while its trajectory is still alive,
    before the row is stored. Used to fill l or harvest per pair quantities
    without keeping every path in memory. */
using GridRowHook = std::function<void(BoundaryGridRow&, const TransitSolution&)>;

/** Solves all ordered boundary pairs (theta_i, theta_j) with wrapped angular
    separation at least delta, warm starting along each row. Row order is
    deterministic and independent of the worker count. Solver failures are
    collected per pair, not thrown. Requires n_theta >= 8 and delta > 0. */
BoundaryGrid boundary_grid(const EnergyContext& ctx, const PotentialModel& model,
                           const ConvexDomain& domain, int n_theta, double delta,
                           const ShootOptions& opts = {}, int threads = 0,
                           const GridRowHook& hook = {});

} // namespace relnewt
