#include "relnewt/scattering.hpp"

#include <cmath>
#include <numbers>

#include "relnewt/errors.hpp"

namespace relnewt {

Vec impact_representation(const Vec& v, const Vec& x) {
    double v2 = norm2(v);
    if (!(v2 > 0.0)) throw ZeroDirection("impact representation needs a moving asymptote");
    return x - (dot(x, v) / v2) * v;
}

namespace {

void require_subluminal(const Vec& v, double c) {
    double s = norm(v);
    if (!(s > 0.0) || !(s < c))
        throw ConfigError("asymptote speed must lie strictly between 0 and c");
}

/** The raw scattering map, no impact normalization of either end. The volume
    probe differentiates this; the public solver normalizes around it. */
ScatteringDatum solve_raw(const EnergyContext& ctx, const PotentialModel& model,
                          const Vec& v_minus, const Vec& x_minus, const OdeOptions& opts) {
    require_subluminal(v_minus, ctx.light_speed);
    ScatteringDatum out{v_minus, x_minus, v_minus, x_minus, 0};
    double R = model.support_radius();
    if (!(R > 0.0)) return out;

    RayGeometry g = ray_ball_intersections(model.support_center(), R, v_minus, x_minus);
    out.chi = g.crossings;
    if (g.crossings <= 1) return out;

    double t_in = g.t_enter;
    PhaseState s0{x_minus + t_in * v_minus, momentum_of(v_minus, ctx.light_speed)};
    double t_cap = t_in + 10.0 * (2.0 * R) / norm(v_minus);
    try {
        Trajectory tr =
            integrate(ctx, model, s0, StopCondition::on_support_exit(t_cap), opts, t_in);
        PhaseState se = tr.final_state();
        out.a = velocity_of(se.p, ctx.light_speed);
        out.b = se.x - tr.t_end() * out.a;
    } catch (const EventNotFound&) {
        throw TrappedOrbit("no support exit within ten support diameters of travel");
    }
    return out;
}

} // namespace

ScatteringDatum solve_scattering(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& v_minus, const Vec& x_minus,
                                 const OdeOptions& opts) {
    require_subluminal(v_minus, ctx.light_speed);
    Vec x0 = impact_representation(v_minus, x_minus);
    return solve_raw(ctx, model, v_minus, x0, opts);
}

std::vector<MGridPoint> m_grid(const EnergyContext& ctx, int n_phi, double rho_max,
                               int n_rho) {
    if (n_phi < 1 || n_rho < 1) throw ConfigError("m_grid needs at least one node per axis");
    if (!(rho_max > 0.0)) throw ConfigError("m_grid offset range must be positive");
    double speed = ctx.asymptotic_speed();
    auto rho_at = [&](int j) {
        return n_rho == 1 ? 0.0 : -rho_max + 2.0 * rho_max * j / (n_rho - 1);
    };
    std::vector<MGridPoint> out;

    if (ctx.dim == 2) {
        out.reserve(static_cast<std::size_t>(n_phi) * n_rho);
        for (int i = 0; i < n_phi; ++i) {
            double phi = 2.0 * std::numbers::pi * i / n_phi;
            double cp = std::cos(phi), sp = std::sin(phi);
            for (int j = 0; j < n_rho; ++j) {
                MGridPoint p;
                p.phi = phi;
                p.rho = rho_at(j);
                p.v_minus = Vec(speed * cp, speed * sp);
                p.x_minus = Vec(-p.rho * sp, p.rho * cp);
                out.push_back(p);
            }
        }
        return out;
    }
    if (ctx.dim != 3) throw ConfigError("m_grid supports dimensions 2 and 3");

    // midpoint polar nodes avoid the axes where the transverse frame degenerates
    out.reserve(static_cast<std::size_t>(n_phi) * n_phi * n_rho * n_rho);
    for (int i = 0; i < n_phi; ++i) {
        double phi = 2.0 * std::numbers::pi * i / n_phi;
        for (int m = 0; m < n_phi; ++m) {
            double polar = std::numbers::pi * (m + 0.5) / n_phi;
            Vec u(std::sin(polar) * std::cos(phi), std::sin(polar) * std::sin(phi),
                  std::cos(polar));
            Vec e1(-std::sin(phi), std::cos(phi), 0.0);
            Vec e2(std::cos(polar) * std::cos(phi), std::cos(polar) * std::sin(phi),
                   -std::sin(polar));
            for (int j = 0; j < n_rho; ++j) {
                for (int j2 = 0; j2 < n_rho; ++j2) {
                    MGridPoint p;
                    p.phi = phi;
                    p.polar = polar;
                    p.rho = rho_at(j);
                    p.rho2 = rho_at(j2);
                    p.v_minus = speed * u;
                    p.x_minus = p.rho * e1 + p.rho2 * e2;
                    out.push_back(p);
                }
            }
        }
    }
    return out;
}

namespace {

/** |det| by Gaussian elimination with partial pivoting, sizes up to 2 * dim. */
double det_in_place(double* a, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (piv != col)
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        double d = a[col * n + col];
        if (d == 0.0) return 0.0;
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / d;
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return std::abs(det);
}

} // namespace

double volume_preservation_probe(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& v_minus, const Vec& x_minus, double fd_step,
                                 const OdeOptions& opts) {
    int n = ctx.dim;
    int m = 2 * n;
    double jac[(2 * kMaxOdeDim) * (2 * kMaxOdeDim)];
    for (int col = 0; col < m; ++col) {
        Vec vp = v_minus, xp = x_minus, vm = v_minus, xm = x_minus;
        if (col < n) {
            vp[col] += fd_step;
            vm[col] -= fd_step;
        } else {
            xp[col - n] += fd_step;
            xm[col - n] -= fd_step;
        }
        ScatteringDatum dp = solve_raw(ctx, model, vp, xp, opts);
        ScatteringDatum dm = solve_raw(ctx, model, vm, xm, opts);
        for (int row = 0; row < n; ++row) {
            jac[row * m + col] = (dp.a[row] - dm.a[row]) / (2.0 * fd_step);
            jac[(n + row) * m + col] = (dp.b[row] - dm.b[row]) / (2.0 * fd_step);
        }
    }
    return det_in_place(jac, m);
}

} // namespace relnewt
