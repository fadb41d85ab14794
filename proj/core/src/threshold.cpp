#include <cmath>
#include <random>
#include <vector>

#include "relnewt/boundary.hpp"
#include "relnewt/dynamics.hpp"
#include "relnewt/errors.hpp"

namespace relnewt {

namespace {

double log_weight(const EnergyContext& ctx, const PotentialModel& model, const Vec& x) {
    return std::log(ctx.shell_momentum(model.value(x)));
}

// Second fundamental form of the boundary in the conformal metric. Under a
// conformal change the form picks up the outward normal derivative of the log
// weight, so positivity reads kappa + d_n log r > 0 tangent by tangent.
bool convex_in_metric(const EnergyContext& ctx, const PotentialModel& model,
                      const ConvexDomain& domain, int samples) {
    const double h = 1e-5;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int i = 0; i < samples; ++i) {
        double theta = two_pi * i / samples;
        Vec x = domain.boundary_point(theta);
        Vec n = domain.outward_normal(x);
        Vec t = domain.boundary_tangent(theta);
        double kappa = domain.normal_curvature(x, t);
        double dn =
            (log_weight(ctx, model, x + h * n) - log_weight(ctx, model, x - h * n)) /
            (2.0 * h);
        if (!(kappa + dn > 0.0)) return false;
    }
    return true;
}

// Gauss curvature of the conformal metric, -laplacian(log r)/r^2, by a five
// point stencil. The weight is C^2, which is exactly what the stencil needs.
double gauss_curvature(const EnergyContext& ctx, const PotentialModel& model,
                       const Vec& x) {
    const double h = 1e-4;
    double c0 = log_weight(ctx, model, x);
    double lap = 0.0;
    for (int d = 0; d < 2; ++d) {
        Vec e(0.0, 0.0);
        e[d] = h;
        lap += log_weight(ctx, model, x + e) + log_weight(ctx, model, x - e) - 2.0 * c0;
    }
    lap /= h * h;
    double r = ctx.shell_momentum(model.value(x));
    return -lap / (r * r);
}

// Scalar Jacobi field along one transit, j(0) = 0, dj/ds(0) = 1 with s the
// metric arclength. A zero of j past the start is a conjugate point.
bool free_of_conjugate_points(const EnergyContext& ctx, const PotentialModel& model,
                              const TransitSolution& sol) {
    const Trajectory& tr = sol.path;
    double t_end = sol.datum.s;
    int steps = std::max(256, 8 * tr.samples());
    double dt = (t_end - tr.t_start()) / steps;

    auto rate = [&](double t, double j, double w, double& dj, double& dw) {
        PhaseState st = tr.eval(t);
        Vec v = velocity_of(st.p, ctx.light_speed);
        double sdot = ctx.shell_momentum(model.value(st.x)) * norm(v);
        dj = w * sdot;
        dw = -gauss_curvature(ctx, model, st.x) * j * sdot;
    };

    double j = 0.0, w = 1.0;
    for (int i = 0; i < steps; ++i) {
        double t = tr.t_start() + i * dt;
        double k1j, k1w, k2j, k2w, k3j, k3w, k4j, k4w;
        rate(t, j, w, k1j, k1w);
        rate(t + 0.5 * dt, j + 0.5 * dt * k1j, w + 0.5 * dt * k1w, k2j, k2w);
        rate(t + 0.5 * dt, j + 0.5 * dt * k2j, w + 0.5 * dt * k2w, k3j, k3w);
        rate(t + dt, j + dt * k3j, w + dt * k3w, k4j, k4w);
        j += dt / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
        w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if (!(j > 0.0)) return false;
    }
    return true;
}

// Exit parameter of the ray leaving q0 at launch angle alpha.
double exit_param(const EnergyContext& ctx, const PotentialModel& model,
                  const ConvexDomain& domain, const Vec& q0, double alpha) {
    double speed = ctx.shell_speed(model.value(q0));
    Vec v(speed * std::cos(alpha), speed * std::sin(alpha));
    PhaseState start{q0, momentum_of(v, ctx.light_speed)};
    Trajectory tr =
        integrate(ctx, model, start, StopCondition::on_domain_exit(domain));
    return domain.boundary_param(tr.final_state().x);
}

// Chord diagnostics: the shooting solver must converge to one solution even
// when probed from spread starts, a small launch fan must move the exit point
// strictly monotonically, and the transit must carry no conjugate point.
bool chords_simple(const EnergyContext& ctx, const PotentialModel& model,
                   const ConvexDomain& domain, int chords, unsigned seed) {
    std::mt19937 gen(seed);
    const double two_pi = 2.0 * std::acos(-1.0);
    std::uniform_real_distribution<double> draw(0.0, two_pi);
    ShootOptions opts;
    opts.probe_uniqueness = true;
    ShootScratch scratch;

    for (int k = 0; k < chords; ++k) {
        double theta0, theta1;
        do {
            theta0 = draw(gen);
            theta1 = draw(gen);
        } while (std::abs(std::remainder(theta1 - theta0, two_pi)) < 0.5);
        Vec q0 = domain.boundary_point(theta0);
        Vec q = domain.boundary_point(theta1);

        double alpha;
        try {
            TransitSolution sol =
                solve_boundary_value(ctx, model, domain, q0, q, opts, &scratch);
            if (!free_of_conjugate_points(ctx, model, sol)) return false;
            alpha = std::atan2(sol.datum.k0[1], sol.datum.k0[0]);
        } catch (const Error&) {
            return false;
        }
        const double fan = 0.02;
        double prev = 0.0;
        double sign = 0.0;
        for (int m = -2; m <= 2; ++m) {
            double phi;
            try {
                phi = exit_param(ctx, model, domain, q0, alpha + m * fan);
            } catch (const Error&) {
                return false;
            }
            if (m > -2) {
                double d = std::remainder(phi - prev, two_pi);
                if (!(std::abs(d) > 1e-9)) return false;
                if (sign == 0.0)
                    sign = d > 0.0 ? 1.0 : -1.0;
                else if (d * sign < 0.0)
                    return false;
            }
            prev = phi;
        }
    }
    return true;
}

bool diagnostics_pass(const PotentialModel& model, const ConvexDomain& domain,
                      double energy, double light_speed, int probes, unsigned seed) {
    EnergyContext ctx{energy, light_speed, 2};
    try {
        require_admissible(ctx, model);
        if (!convex_in_metric(ctx, model, domain, 8 * probes)) return false;
        return chords_simple(ctx, model, domain, probes, seed);
    } catch (const Error&) {
        return false;
    }
}

} // namespace

double estimate_energy_threshold(const PotentialModel& model, const ConvexDomain& domain,
                                 double e_lo, double e_hi, double light_speed,
                                 int probes, unsigned seed, double rel_gap) {
    if (domain.dim() != 2 || model.dim() != 2)
        throw ConfigError("threshold diagnostics are two dimensional");
    if (!(e_hi > e_lo) || !(e_lo > 0.0))
        throw ConfigError("threshold search needs 0 < e_lo < e_hi");
    if (probes < 4 || !(rel_gap > 0.0))
        throw ConfigError("threshold search needs probes >= 4 and rel_gap > 0");

    if (!diagnostics_pass(model, domain, e_hi, light_speed, probes, seed))
        throw ThresholdNotFound("simplicity diagnostics fail at the top of the range");

    // invariant: hi passes, lo fails or is the excluded bottom of the range
    double lo = e_lo, hi = e_hi;
    while (hi - lo > rel_gap * hi) {
        double mid = 0.5 * (lo + hi);
        if (diagnostics_pass(model, domain, mid, light_speed, probes, seed))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace relnewt
