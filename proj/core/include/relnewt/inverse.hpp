#pragma once

// Parametric recovery of the potential from boundary or scattering data:
// fixed bump geometry, free amplitudes, damped least squares with a finite
// difference Jacobian. A desk scale witness that the data determine the
// potential, not a general tomographic inversion.

#include <vector>

#include "relnewt/boundary.hpp"
#include "relnewt/scattering.hpp"

namespace relnewt {

/** Candidate bump location whose amplitude is the free parameter. */
struct BumpSite {
    Vec center = Vec::zero(2);
    double radius = 0.0;
};

/** The model described by the sites with the given amplitudes. */
PotentialModel assemble_model(int dim, const std::vector<BumpSite>& sites,
                              const std::vector<double>& amplitudes);

struct MisfitResult {
    std::vector<double> residuals;  // concatenated per row components
    int dropped = 0;                // rows whose solve failed, excluded above
    double norm() const;
};

/** Boundary mode: per data row, the difference between the predicted and the
    observed exit velocity. Solves are warm started from the observed entry
    direction and transit time. Rows whose solve fails are dropped and counted.
    Throws ConfigError when the site geometry leaves the domain or the
    amplitudes break admissibility. */
MisfitResult boundary_misfit(const EnergyContext& ctx, const ConvexDomain& domain,
                             const std::vector<BumpSite>& sites,
                             const std::vector<double>& amplitudes,
                             const std::vector<BoundaryDatum>& data,
                             const ShootOptions& opts = {}, int threads = 0);

/** Scattering mode: per row, the difference of predicted and observed outgoing
    velocity and shift, concatenated. */
MisfitResult scattering_misfit(const EnergyContext& ctx,
                               const std::vector<BumpSite>& sites,
                               const std::vector<double>& amplitudes,
                               const std::vector<ScatteringDatum>& data,
                               const OdeOptions& opts = {}, int threads = 0);

struct ReconstructOptions {
    double reg = 0.0;         // ridge weight on the amplitudes
    unsigned seed = 1;        // multistart draws when the cold run stalls
    int max_iter = 50;
    int max_restarts = 3;
    double step_tol = 1e-10;      // relative step size declaring convergence
    double decrease_tol = 1e-14;  // relative cost decrease declaring convergence
    double fd_step = 1e-6;        // forward difference step, fixed for reproducibility
    int threads = 0;
    ShootOptions shoot;            // boundary mode solver knobs
    OdeOptions ode;                // scattering mode integrator knobs
    std::vector<double> truth;     // reference amplitudes, empty when unknown
};

struct ReconstructionReport {
    std::vector<double> amplitudes;
    std::vector<double> misfit_history;  // data misfit norm per accepted iterate
    double misfit_norm = 0.0;
    double reg = 0.0;
    int iterations = 0;
    int restarts = 0;
    int dropped = 0;
    bool converged = false;
    std::vector<double> truth_error;     // |amplitude - truth| when truth given
};

/** Fit amplitudes to boundary data. Throws NoConvergence when every start,
    including the seeded restarts, stalls. */
ReconstructionReport reconstruct(const EnergyContext& ctx, const ConvexDomain& domain,
                                 const std::vector<BumpSite>& sites,
                                 const std::vector<BoundaryDatum>& data,
                                 const ReconstructOptions& opts = {});

/** Fit amplitudes to scattering data. */
ReconstructionReport reconstruct(const EnergyContext& ctx,
                                 const std::vector<BumpSite>& sites,
                                 const std::vector<ScatteringDatum>& data,
                                 const ReconstructOptions& opts = {});

} // namespace relnewt
