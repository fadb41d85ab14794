#pragma once

#include "relnewt/boundary.hpp"
#include "relnewt/dynamics.hpp"

namespace relnewt {

/** Conformal weight of the fixed energy metric: r(x) = c sqrt(((E-V)/c^2)^2 - 1),
    the on shell momentum magnitude. Fixed energy motion follows geodesics of
    r |dx|. Holds a reference to the model; the caller keeps it alive. */
class MetricField {
public:
    MetricField(const EnergyContext& ctx, const PotentialModel& model)
        : ctx_(ctx), model_(&model) {}

    const EnergyContext& context() const { return ctx_; }
    const PotentialModel& model() const { return *model_; }

    double weight(const Vec& x) const;
    /** Weight plus gradient by the chain rule through the potential. */
    void weight(const Vec& x, double& r, Vec& grad) const;

private:
    EnergyContext ctx_;
    const PotentialModel* model_;
};

/** A curve parametrized by metric arclength, state [y, dy/dsigma]. Unit metric
    speed r(y) |y'| = 1 holds along every instance up to solver tolerance. */
struct GeodesicCurve {
    int dim = 2;
    OdeSolution sol;

    double length() const { return sol.duration(); }
    int samples() const { return sol.samples(); }
    double sigma(int i) const { return sol.time(i); }
    Vec point(int i) const;
    Vec direction(int i) const;
    void eval(double s, Vec& y, Vec& yd) const;
    Vec eval_point(double s) const;

    /** Max of |r |y'| - 1| over a dense sweep of the curve. */
    double unit_speed_residual(const MetricField& field) const;
};

/** Traces the geodesic from x0 in the given direction over the given arclength.
    dir is normalized to unit metric speed internally. With stay_inside set, the
    whole curve must remain in that domain or LeftDomain is thrown. */
GeodesicCurve geodesic_trace(const MetricField& field, const Vec& x0, const Vec& dir,
                             double length, const ConvexDomain* stay_inside = nullptr,
                             const OdeOptions& opts = {});

/** Traces from a boundary point inward until the curve exits the domain. */
GeodesicCurve geodesic_to_exit(const MetricField& field, const ConvexDomain& domain,
                               const Vec& x0, const Vec& dir, const OdeOptions& opts = {});

/** Metric length of a trajectory segment by per step Gauss quadrature on the
    dense output. */
double metric_length(const MetricField& field, const Trajectory& tr, double t0, double t1);

/** The trajectory rewritten in metric arclength. Inverse of time_reparam. */
GeodesicCurve arclength_reparam(const MetricField& field, const Trajectory& tr);

/** The curve rewritten in time from t = 0, back on the mechanical energy shell.
    Inverse of arclength_reparam. */
Trajectory time_reparam(const MetricField& field, const GeodesicCurve& curve);

/** Solves the same chord twice, as a mechanical boundary problem and as a
    geodesic boundary problem, and returns the sup pointwise distance between
    the arclength reparametrization of the trajectory and the geodesic. */
double maupertuis_residual(const EnergyContext& ctx, const PotentialModel& model,
                           const ConvexDomain& domain, const Vec& q0, const Vec& q);

} // namespace relnewt
