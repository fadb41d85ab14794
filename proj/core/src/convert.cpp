#include "relnewt/convert.hpp"

#include "relnewt/errors.hpp"

namespace relnewt {

BoundaryDatum scattering_to_boundary(const ConvexDomain& domain, const ScatteringDatum& d) {
    RayGeometry in = ray_intersections(domain, d.v_minus, d.x_minus);
    if (in.crossings <= 1)
        throw NoChord("incoming asymptote misses the domain");
    RayGeometry out_ray = ray_intersections(domain, d.a, d.b);
    if (out_ray.crossings <= 1)
        throw NoChord("outgoing asymptote misses the domain");

    BoundaryDatum out;
    out.q0 = d.x_minus + in.t_enter * d.v_minus;
    out.q = d.b + out_ray.t_exit * d.a;
    out.k = d.a;
    out.k0 = d.v_minus;
    out.s = out_ray.t_exit - in.t_enter;
    out.l = 0.0;
    return out;
}

ScatteringDatum boundary_to_scattering(const EnergyContext& ctx, const PotentialModel& model,
                                       const ConvexDomain& domain, const Vec& v_minus,
                                       const Vec& x_minus, const OdeOptions& opts) {
    Vec x0 = impact_representation(v_minus, x_minus);
    ScatteringDatum out{v_minus, x0, v_minus, x0, 0};
    double R = model.support_radius();
    if (R > 0.0)
        out.chi =
            ray_ball_intersections(model.support_center(), R, v_minus, x0).crossings;

    RayGeometry in = ray_intersections(domain, v_minus, x0);
    if (in.crossings <= 1) return out;

    double t_in = in.t_enter;
    PhaseState s0{x0 + t_in * v_minus, momentum_of(v_minus, ctx.light_speed)};
    Trajectory tr =
        integrate(ctx, model, s0, StopCondition::on_domain_exit(domain), opts, t_in);
    PhaseState se = tr.final_state();
    out.a = velocity_of(se.p, ctx.light_speed);
    out.b = se.x - tr.t_end() * out.a;
    return out;
}

} // namespace relnewt
