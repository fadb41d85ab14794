#include "relnewt/maupertuis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relnewt/quadrature.hpp"

namespace relnewt {

double MetricField::weight(const Vec& x) const {
    return ctx_.shell_momentum(model_->value(x));
}

void MetricField::weight(const Vec& x, double& r, Vec& grad) const {
    PotentialEval pe = model_->eval(x);
    r = ctx_.shell_momentum(pe.value);
    // dr/dV = -(E - V)/(c^2 r)
    double c2 = ctx_.light_speed * ctx_.light_speed;
    double dr_dv = -(ctx_.energy - pe.value) / (c2 * r);
    grad = dr_dv * pe.gradient;
}

Vec GeodesicCurve::point(int i) const {
    const double* y = sol.state(i);
    Vec out = Vec::zero(dim);
    for (int k = 0; k < dim; ++k) out[k] = y[k];
    return out;
}

Vec GeodesicCurve::direction(int i) const {
    const double* y = sol.state(i);
    Vec out = Vec::zero(dim);
    for (int k = 0; k < dim; ++k) out[k] = y[dim + k];
    return out;
}

void GeodesicCurve::eval(double s, Vec& y, Vec& yd) const {
    double buf[kMaxOdeDim];
    sol.eval(s, buf);
    y = Vec::zero(dim);
    yd = Vec::zero(dim);
    for (int k = 0; k < dim; ++k) {
        y[k] = buf[k];
        yd[k] = buf[dim + k];
    }
}

Vec GeodesicCurve::eval_point(double s) const {
    Vec y, yd;
    eval(s, y, yd);
    return y;
}

double GeodesicCurve::unit_speed_residual(const MetricField& field) const {
    double worst = 0.0;
    double buf[kMaxOdeDim];
    for (int k = 0; k < sol.steps(); ++k) {
        for (double th : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            sol.eval_step(k, th, buf);
            Vec y = Vec::zero(dim), yd = Vec::zero(dim);
            for (int i = 0; i < dim; ++i) {
                y[i] = buf[i];
                yd[i] = buf[dim + i];
            }
            worst = std::max(worst, std::abs(field.weight(y) * norm(yd) - 1.0));
        }
    }
    if (sol.steps() == 0 && sol.samples() > 0) {
        Vec y = point(0), yd = direction(0);
        worst = std::abs(field.weight(y) * norm(yd) - 1.0);
    }
    return worst;
}

namespace {

/** Geodesic equation of the conformal metric in arclength form: the state is
    [y, y'], and y'' = |y'|^2 grad(log r) - 2 (grad(log r) . y') y'. */
struct GeodesicRhs {
    const MetricField* field;
    int n;

    void operator()(double, const double* y, double* dy) const {
        Vec pos = Vec::zero(n), vel = Vec::zero(n);
        for (int i = 0; i < n; ++i) {
            pos[i] = y[i];
            vel[i] = y[n + i];
        }
        double r;
        Vec gr;
        field->weight(pos, r, gr);
        Vec gphi = (1.0 / r) * gr;
        double v2 = norm2(vel);
        double gv = dot(gphi, vel);
        for (int i = 0; i < n; ++i) {
            dy[i] = vel[i];
            dy[n + i] = v2 * gphi[i] - 2.0 * gv * vel[i];
        }
    }
};

// Internal shots run well below the exposed knobs so the unit speed invariant
// holds at the advertised 1e-8 even after many accumulated steps. The step cap
// keeps the stages inside any bump the curve clips; dsigma = r |dx|, so the
// euclidean feature scale converts by the smallest weight the path can meet.
OdeOptions tightened(const MetricField& field, const OdeOptions& opts) {
    OdeOptions t = opts;
    t.rel_tol /= 40.0;
    t.abs_tol /= 40.0;
    double rho_min = 0.0, v_top = 0.0;
    for (const Bump& b : field.model().bumps()) {
        rho_min = (rho_min == 0.0) ? b.radius : std::min(rho_min, b.radius);
        v_top += std::max(b.amplitude, 0.0);
    }
    if (rho_min > 0.0) {
        double r_low;
        try {
            r_low = field.context().shell_momentum(v_top);
        } catch (const BelowShell&) {
            r_low = 1e-3;
        }
        double cap = rho_min / 6.0 * r_low;
        if (t.max_step <= 0.0 || cap < t.max_step) t.max_step = cap;
    }
    return t;
}

void seed_state(const MetricField& field, const Vec& x0, const Vec& dir, int n, double* y0) {
    Vec u = normalized(dir);
    if (!(norm(u) > 0.0)) throw ZeroDirection("geodesic direction has zero length");
    double r0 = field.weight(x0);
    for (int i = 0; i < n; ++i) {
        y0[i] = x0[i];
        y0[n + i] = u[i] / r0;
    }
}

} // namespace

GeodesicCurve geodesic_trace(const MetricField& field, const Vec& x0, const Vec& dir,
                             double length, const ConvexDomain* stay_inside,
                             const OdeOptions& opts) {
    int n = field.context().dim;
    GeodesicCurve curve;
    curve.dim = n;
    double y0[kMaxOdeDim];
    seed_state(field, x0, dir, n, y0);
    GeodesicRhs rhs{&field, n};
    ode_integrate_time(rhs, y0, 2 * n, 0.0, length, tightened(field, opts), curve.sol);

    if (stay_inside) {
        double buf[kMaxOdeDim];
        for (int k = 0; k < curve.sol.steps(); ++k) {
            for (double th : {0.25, 0.5, 0.75, 1.0}) {
                curve.sol.eval_step(k, th, buf);
                Vec y = Vec::zero(n);
                for (int i = 0; i < n; ++i) y[i] = buf[i];
                if (stay_inside->level(y) > 1e-7)
                    throw LeftDomain("geodesic leaves the domain before its arclength ends");
            }
        }
    }
    return curve;
}

GeodesicCurve geodesic_to_exit(const MetricField& field, const ConvexDomain& domain,
                               const Vec& x0, const Vec& dir, const OdeOptions& opts) {
    int n = field.context().dim;
    GeodesicCurve curve;
    curve.dim = n;
    double y0[kMaxOdeDim];
    seed_state(field, x0, dir, n, y0);
    GeodesicRhs rhs{&field, n};
    double r_max = field.context().shell_momentum(-field.model().c2_norm_bound());
    double cap = 1.5 * domain.diameter() * r_max + 1.0;
    auto level = [&domain, n](const double* y) {
        Vec x = Vec::zero(n);
        for (int i = 0; i < n; ++i) x[i] = y[i];
        return domain.level(x);
    };
    ode_integrate_event(rhs, y0, 2 * n, 0.0, cap, level, tightened(field, opts), curve.sol);
    return curve;
}

namespace {

/** Integrand dsigma/dt = r |v| at time t on one dense step of a trajectory. */
double sigma_speed(const MetricField& field, const OdeSolution& ms, int k, double t,
                   int n) {
    double buf[kMaxOdeDim];
    double th = (t - ms.step_start(k)) / ms.step_size(k);
    ms.eval_step(k, std::clamp(th, 0.0, 1.0), buf);
    Vec x = Vec::zero(n), p = Vec::zero(n);
    for (int i = 0; i < n; ++i) {
        x[i] = buf[i];
        p[i] = buf[n + i];
    }
    Vec v = velocity_of(p, field.context().light_speed);
    return field.weight(x) * norm(v);
}

/** Everything the arclength interpolant needs at one trajectory time. */
struct MechNode {
    Vec y;
    Vec beta;    // dy/dsigma
    Vec dbeta;   // d2y/dsigma2
};

MechNode mech_node(const MetricField& field, const Trajectory& tr, double t) {
    const EnergyContext& ctx = field.context();
    int n = ctx.dim;
    PhaseState s = tr.eval(t);
    Vec v = velocity_of(s.p, ctx.light_speed);
    double r;
    Vec gr;
    field.weight(s.x, r, gr);
    double vn = norm(v);
    double rs = r * vn;  // dsigma/dt
    MechNode out;
    out.y = s.x;
    out.beta = (1.0 / rs) * v;
    // mechanical acceleration: dv/dt = (pdot - v (v.pdot)/c^2) / gamma
    PotentialEval pe = field.model().eval(s.x);
    Vec pdot = -1.0 * pe.gradient;
    double c2 = ctx.light_speed * ctx.light_speed;
    double gamma = std::sqrt(1.0 + norm2(s.p) / c2);
    Vec vdot = (1.0 / gamma) * (pdot - (dot(v, pdot) / c2) * v);
    double rdot = dot(gr, v);
    double d_rs = rdot * vn + r * dot(v, vdot) / vn;
    Vec dbeta_dt = (1.0 / rs) * vdot - (d_rs / (rs * rs)) * v;
    out.dbeta = (1.0 / rs) * dbeta_dt;
    (void)n;
    return out;
}

/** rcont coefficients of the quartic with endpoint values, exact midpoint value
    and endpoint derivatives (already scaled by the step). */
void quartic_fit(double ya, double yb, double ym, double da, double db, double* c) {
    c[0] = ya;
    c[1] = yb - ya;
    c[2] = da - c[1];
    c[3] = c[1] - db - c[2];
    c[4] = 16.0 * (ym - ya - 0.5 * c[1] - 0.25 * c[2] - 0.125 * c[3]);
}

/** Solves integral_{a}^{t} f = target for t by Newton on the running Gauss sum. */
template <class F>
double invert_increment(const F& f, double a, double b, double target) {
    double t = 0.5 * (a + b);
    for (int it = 0; it < 6; ++it) {
        double g = gauss7(f, a, t) - target;
        double d = f(t);
        if (!(d > 0.0)) break;
        t = std::clamp(t - g / d, a, b);
    }
    return t;
}

} // namespace

double metric_length(const MetricField& field, const Trajectory& tr, double t0, double t1) {
    const OdeSolution& ms = tr.solution();
    int n = tr.dim();
    double lo = std::max(t0, tr.t_start());
    double hi = std::min(t1, tr.t_end());
    if (!(hi > lo)) return 0.0;
    double total = 0.0;
    for (int k = 0; k < ms.steps(); ++k) {
        double a = std::max(lo, ms.step_start(k));
        double b = std::min(hi, std::min(ms.step_start(k) + ms.step_size(k), tr.t_end()));
        if (!(b > a)) continue;
        auto f = [&](double t) { return sigma_speed(field, ms, k, t, n); };
        total += gauss7(f, a, b);
    }
    return total;
}

GeodesicCurve arclength_reparam(const MetricField& field, const Trajectory& tr) {
    int n = tr.dim();
    GeodesicCurve curve;
    curve.dim = n;
    curve.sol.clear(2 * n);
    const OdeSolution& ms = tr.solution();

    auto pack = [n](const MechNode& nd, double* buf) {
        for (int i = 0; i < n; ++i) {
            buf[i] = nd.y[i];
            buf[n + i] = nd.beta[i];
        }
    };

    MechNode left = mech_node(field, tr, tr.t_start());
    double buf[kMaxOdeDim];
    pack(left, buf);
    curve.sol.push_sample(0.0, buf);
    if (ms.steps() == 0 || !(tr.duration() > 0.0)) return curve;

    double sigma = 0.0;
    double t_left = tr.t_start();
    for (int k = 0; k < ms.steps(); ++k) {
        double hi = std::min(ms.step_start(k) + ms.step_size(k), tr.t_end());
        if (!(hi > t_left)) continue;
        auto f = [&](double t) { return sigma_speed(field, ms, k, t, n); };
        // two interpolation steps per solver step keep the quartic fit tight
        for (int half = 0; half < 2; ++half) {
            double ta = t_left + 0.5 * (hi - t_left) * half;
            double tb = t_left + 0.5 * (hi - t_left) * (half + 1);
            double h_sig = gauss7(f, ta, tb);
            if (!(h_sig > 0.0)) continue;
            // time of the arclength midpoint, so the fit sees an exact sample
            double tm = invert_increment(f, ta, tb, 0.5 * h_sig);
            MechNode mid = mech_node(field, tr, tm);
            MechNode right = mech_node(field, tr, tb);
            double rc[5 * kMaxOdeDim];
            for (int i = 0; i < n; ++i) {
                quartic_fit(left.y[i], right.y[i], mid.y[i], h_sig * left.beta[i],
                            h_sig * right.beta[i], rc + 5 * i);
                quartic_fit(left.beta[i], right.beta[i], mid.beta[i], h_sig * left.dbeta[i],
                            h_sig * right.dbeta[i], rc + 5 * (n + i));
            }
            curve.sol.push_step(sigma, h_sig, rc);
            sigma += h_sig;
            pack(right, buf);
            curve.sol.push_sample(sigma, buf);
            left = right;
        }
        t_left = hi;
    }
    curve.sol.n_steps = curve.sol.steps();
    curve.sol.reason = ms.reason;
    return curve;
}

namespace {

/** Everything the time interpolant needs at one arclength position. */
struct CurveNode {
    Vec x;
    Vec p;
    Vec v;      // dx/dt
    Vec pdot;   // dp/dt = -grad V
};

CurveNode curve_node(const MetricField& field, const GeodesicCurve& curve, double s) {
    const EnergyContext& ctx = field.context();
    Vec y, yd;
    curve.eval(s, y, yd);
    PotentialEval pe = field.model().eval(y);
    CurveNode out;
    out.x = y;
    out.v = ctx.shell_speed(pe.value) * normalized(yd);
    out.p = momentum_of(out.v, ctx.light_speed);
    out.pdot = -1.0 * pe.gradient;
    return out;
}

} // namespace

Trajectory time_reparam(const MetricField& field, const GeodesicCurve& curve) {
    const EnergyContext& ctx = field.context();
    int n = ctx.dim;
    OdeSolution sol;
    sol.clear(2 * n);

    auto pack = [n](const CurveNode& nd, double* buf) {
        for (int i = 0; i < n; ++i) {
            buf[i] = nd.x[i];
            buf[n + i] = nd.p[i];
        }
    };
    // dt/dsigma along the curve
    auto rate = [&](double s) {
        Vec y, yd;
        curve.eval(s, y, yd);
        double V = field.model().value(y);
        return 1.0 / (ctx.shell_momentum(V) * ctx.shell_speed(V));
    };

    CurveNode left = curve_node(field, curve, 0.0);
    double buf[kMaxOdeDim];
    pack(left, buf);
    sol.push_sample(0.0, buf);
    if (!(curve.length() > 0.0)) return Trajectory(ctx, std::move(sol), field.model());

    double t = 0.0;
    for (int k = 0; k < curve.sol.steps(); ++k) {
        double s_lo = curve.sol.step_start(k);
        double s_hi = std::min(s_lo + curve.sol.step_size(k), curve.sol.t_end());
        if (!(s_hi > s_lo)) continue;
        for (int half = 0; half < 2; ++half) {
            double sa = s_lo + 0.5 * (s_hi - s_lo) * half;
            double sb = s_lo + 0.5 * (s_hi - s_lo) * (half + 1);
            double h_t = gauss7(rate, sa, sb);
            if (!(h_t > 0.0)) continue;
            double sm = invert_increment(rate, sa, sb, 0.5 * h_t);
            CurveNode mid = curve_node(field, curve, sm);
            CurveNode right = curve_node(field, curve, sb);
            double rc[5 * kMaxOdeDim];
            for (int i = 0; i < n; ++i) {
                quartic_fit(left.x[i], right.x[i], mid.x[i], h_t * left.v[i],
                            h_t * right.v[i], rc + 5 * i);
                quartic_fit(left.p[i], right.p[i], mid.p[i], h_t * left.pdot[i],
                            h_t * right.pdot[i], rc + 5 * (n + i));
            }
            sol.push_step(t, h_t, rc);
            t += h_t;
            pack(right, buf);
            sol.push_sample(t, buf);
            left = right;
        }
    }
    sol.n_steps = sol.steps();
    sol.reason = curve.sol.reason;
    return Trajectory(ctx, std::move(sol), field.model());
}

double maupertuis_residual(const EnergyContext& ctx, const PotentialModel& model,
                           const ConvexDomain& domain, const Vec& q0, const Vec& q) {
    MetricField field(ctx, model);
    TransitSolution mech = solve_boundary_value(ctx, model, domain, q0, q);
    GeodesicCurve mech_curve = arclength_reparam(field, mech.path);

    // geodesic shooting on the launch angle, target boundary parameter of q
    double theta_target = domain.boundary_param(q);
    Vec chord = q - q0;
    double alpha = std::atan2(chord[1], chord[0]);
    const double fd_step = 1e-7;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    auto shot = [&](double a, GeodesicCurve& out) {
        Vec dir(std::cos(a), std::sin(a));
        out = geodesic_to_exit(field, domain, q0, dir);
        Vec end = out.point(out.samples() - 1);
        return std::remainder(domain.boundary_param(end) - theta_target, two_pi);
    };

    GeodesicCurve geo;
    double res = shot(alpha, geo);
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
        Vec end = geo.point(geo.samples() - 1);
        if (norm(end - q) <= 1e-9) {
            converged = true;
            break;
        }
        GeodesicCurve probe;
        double res_p = shot(alpha + fd_step, probe);
        double deriv = std::remainder(res_p - res, two_pi) / fd_step;
        if (!(std::abs(deriv) > 1e-14)) break;
        double step = -res / deriv;
        double damp = 1.0;
        bool accepted = false;
        for (int cut = 0; cut < 8 && !accepted; ++cut) {
            GeodesicCurve trial;
            double res_t = shot(alpha + damp * step, trial);
            if (std::abs(res_t) < std::abs(res)) {
                alpha += damp * step;
                res = res_t;
                geo = std::move(trial);
                accepted = true;
            }
            damp *= 0.5;
        }
        if (!accepted) break;
    }
    {
        Vec end = geo.point(geo.samples() - 1);
        if (norm(end - q) > 1e-9)
            throw NoConvergence("geodesic shooting did not reach the target endpoint");
    }

    double len = std::min(mech_curve.length(), geo.length());
    double sup =
        norm(mech_curve.eval_point(mech_curve.length()) - geo.eval_point(geo.length()));
    for (int j = 0; j <= 200; ++j) {
        double s = len * j / 200.0;
        sup = std::max(sup, norm(mech_curve.eval_point(s) - geo.eval_point(s)));
    }
    return sup;
}

} // namespace relnewt
