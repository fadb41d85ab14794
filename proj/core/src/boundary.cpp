#include "relnewt/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relnewt/parallel.hpp"

namespace relnewt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) { return std::remainder(a, kTwoPi); }

Vec unit_dir(double alpha) { return Vec(std::cos(alpha), std::sin(alpha)); }

double direction_angle(const Vec& u) { return std::atan2(u[1], u[0]); }

void require_planar(const EnergyContext& ctx, const ConvexDomain& domain) {
    if (ctx.dim != 2 || domain.dim() != 2)
        throw Error("shooting solves are implemented for planar domains");
}

void require_on_boundary(const ConvexDomain& domain, const Vec& x, const char* who) {
    if (std::abs(domain.level(x)) > 1e-6)
        throw Error(std::string(who) + " does not lie on the domain boundary");
}

/** Exact solution on a straight segment clear of the support: free motion at the
    asymptotic shell speed, stored as a single synthetic dense step. */
TransitSolution make_straight(const EnergyContext& ctx, const PotentialModel& model,
                              const Vec& q0, const Vec& target, bool exits_domain) {
    Vec chord = target - q0;
    double dist = norm(chord);
    double speed = ctx.asymptotic_speed();
    double s = dist / speed;
    Vec v = (speed / dist) * chord;
    Vec p = momentum_of(v, ctx.light_speed);

    OdeSolution sol;
    sol.clear(4);
    double y0[4] = {q0[0], q0[1], p[0], p[1]};
    double y1[4] = {target[0], target[1], p[0], p[1]};
    sol.push_sample(0.0, y0);
    double rc[20];
    for (int i = 0; i < 4; ++i) {
        rc[5 * i + 0] = y0[i];
        rc[5 * i + 1] = y1[i] - y0[i];
        rc[5 * i + 2] = rc[5 * i + 3] = rc[5 * i + 4] = 0.0;
    }
    sol.push_step(0.0, s, rc);
    sol.push_sample(s, y1);
    sol.n_steps = 1;
    sol.reason = exits_domain ? StopReason::event : StopReason::time_reached;

    BoundaryDatum d;
    d.q0 = q0;
    d.q = target;
    d.s = s;
    d.k = v;
    d.k0 = v;
    return TransitSolution{d, Trajectory(ctx, std::move(sol), model), 0, 0.0};
}

struct ShotOutcome {
    double t_exit = 0.0;
    Vec x_exit = Vec::zero(2);
    Vec p_exit = Vec::zero(2);
    double theta_exit = 0.0;
    double theta_residual = 0.0;  // wrapped gap to the target parameter
    double miss = 0.0;            // euclidean distance to the target point
};

/** One inward shot from q0 at direction angle alpha, integrated to domain exit. */
void shoot(const EnergyContext& ctx, const PotentialModel& model, const ConvexDomain& domain,
           const Vec& q0, double alpha, const Vec& target, double theta_target,
           const OdeOptions& ode, OdeSolution& sol, ShotOutcome& out) {
    double speed = ctx.shell_speed(model.value(q0));
    Vec v0 = speed * unit_dir(alpha);
    PhaseState start{q0, momentum_of(v0, ctx.light_speed)};
    integrate_raw(ctx, model, start, StopCondition::on_domain_exit(domain), ode, 0.0, sol);
    int last = sol.samples() - 1;
    const double* y = sol.state(last);
    out.t_exit = sol.time(last);
    for (int i = 0; i < 2; ++i) {
        out.x_exit[i] = y[i];
        out.p_exit[i] = y[2 + i];
    }
    out.theta_exit = domain.boundary_param(out.x_exit);
    out.theta_residual = wrap_pi(out.theta_exit - theta_target);
    out.miss = norm(out.x_exit - target);
}

struct NewtonResult {
    bool converged = false;
    double alpha = 0.0;
    ShotOutcome shot;
    int iterations = 0;
};

/** Damped Newton on the wrapped exit parameter. On success scratch_main holds
    the converged path. */
NewtonResult newton_boundary(const EnergyContext& ctx, const PotentialModel& model,
                             const ConvexDomain& domain, const Vec& q0, const Vec& target,
                             double theta_target, double alpha0, const ShootOptions& opts,
                             ShootScratch& scratch) {
    NewtonResult res;
    res.alpha = alpha0;
    try {
        shoot(ctx, model, domain, q0, res.alpha, target, theta_target, opts.ode,
              scratch.main, res.shot);
    } catch (const Error&) {
        return res;
    }
    for (int it = 0; it < opts.max_iter; ++it) {
        res.iterations = it;
        if (res.shot.miss <= opts.residual_tol) {
            res.converged = true;
            return res;
        }
        ShotOutcome probe;
        try {
            shoot(ctx, model, domain, q0, res.alpha + opts.fd_step, target, theta_target,
                  opts.ode, scratch.probe, probe);
        } catch (const Error&) {
            return res;
        }
        double deriv = wrap_pi(probe.theta_exit - res.shot.theta_exit) / opts.fd_step;
        if (!(std::abs(deriv) > 1e-14)) return res;
        double step = -res.shot.theta_residual / deriv;

        double damp = 1.0;
        bool accepted = false;
        for (int cut = 0; cut < 8 && !accepted; ++cut) {
            ShotOutcome trial;
            try {
                shoot(ctx, model, domain, q0, res.alpha + damp * step, target, theta_target,
                      opts.ode, scratch.main, trial);
            } catch (const Error&) {
                damp *= 0.5;
                continue;
            }
            if (std::abs(trial.theta_residual) < std::abs(res.shot.theta_residual) ||
                trial.miss <= opts.residual_tol) {
                res.alpha += damp * step;
                res.shot = trial;
                accepted = true;
            }
            damp *= 0.5;
        }
        if (!accepted) return res;
    }
    res.converged = res.shot.miss <= opts.residual_tol;
    return res;
}

/** Eight directions spread over the inward half circle at q0. */
void multistart_angles(const ConvexDomain& domain, const Vec& q0, double out[8]) {
    Vec nrm = domain.outward_normal(q0);
    double beta = std::atan2(-nrm[1], -nrm[0]);
    for (int m = 0; m < 8; ++m)
        out[m] = beta - 0.5 * std::numbers::pi + (m + 0.5) * (std::numbers::pi / 8.0);
}

TransitSolution package_boundary(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& q0, const Vec& q, double alpha,
                                 const ShotOutcome& shot, int iterations,
                                 const OdeSolution& path) {
    BoundaryDatum d;
    d.q0 = q0;
    d.q = q;
    d.s = shot.t_exit;
    d.k = velocity_of(shot.p_exit, ctx.light_speed);
    d.k0 = ctx.shell_speed(model.value(q0)) * unit_dir(alpha);
    return TransitSolution{d, Trajectory(ctx, path, model), iterations, shot.miss};
}

} // namespace

TransitSolution solve_boundary_value(const EnergyContext& ctx, const PotentialModel& model,
                                     const ConvexDomain& domain, const Vec& q0, const Vec& q,
                                     const ShootOptions& opts, ShootScratch* scratch) {
    require_planar(ctx, domain);
    require_on_boundary(domain, q0, "start point");
    require_on_boundary(domain, q, "target point");
    Vec chord = q - q0;
    if (!(norm(chord) > 0.0)) throw ZeroDirection("coincident boundary points");

    if (opts.straight_shortcut && !opts.probe_uniqueness &&
        model.segment_clear_of_support(q0, q))
        return make_straight(ctx, model, q0, q, true);

    ShootScratch local;
    ShootScratch& scr = scratch ? *scratch : local;
    double theta_target = domain.boundary_param(q);

    double alpha0 = opts.initial_angle ? *opts.initial_angle : direction_angle(chord);
    NewtonResult warm = newton_boundary(ctx, model, domain, q0, q, theta_target, alpha0,
                                        opts, scr);
    if (warm.converged && !opts.probe_uniqueness)
        return package_boundary(ctx, model, q0, q, warm.alpha, warm.shot, warm.iterations,
                                scr.main);

    struct Hit {
        double alpha;
        ShotOutcome shot;
        int iterations;
    };
    Hit hits[9];
    int n_hits = 0;
    if (warm.converged) hits[n_hits++] = {warm.alpha, warm.shot, warm.iterations};

    double starts[8];
    multistart_angles(domain, q0, starts);
    for (int m = 0; m < 8; ++m) {
        NewtonResult r = newton_boundary(ctx, model, domain, q0, q, theta_target, starts[m],
                                         opts, scr);
        if (r.converged) hits[n_hits++] = {r.alpha, r.shot, r.iterations};
    }
    if (n_hits == 0)
        throw NoConvergence("boundary shooting failed from every start direction");

    for (int a = 0; a < n_hits; ++a)
        for (int b = a + 1; b < n_hits; ++b)
            if (norm(unit_dir(hits[a].alpha) - unit_dir(hits[b].alpha)) >= 1e-7)
                throw NonUnique("distinct shooting directions reach the same target");

    int best = 0;
    for (int a = 1; a < n_hits; ++a)
        if (hits[a].shot.miss < hits[best].shot.miss) best = a;

    ShotOutcome final_shot;
    shoot(ctx, model, domain, q0, hits[best].alpha, q, theta_target, opts.ode, scr.main,
          final_shot);
    return package_boundary(ctx, model, q0, q, hits[best].alpha, final_shot,
                            hits[best].iterations, scr.main);
}

namespace {

struct InteriorState {
    double alpha = 0.0;
    double s = 0.0;
    Vec pos = Vec::zero(2);
    Vec vel = Vec::zero(2);
    double res = 0.0;  // |pos - target|
    double t_exit = 0.0;
};

/** Evaluates position and velocity at time s on the path of angle alpha; the
    path to domain exit lands in sol. */
void eval_interior(const EnergyContext& ctx, const PotentialModel& model,
                   const ConvexDomain& domain, const Vec& q0, const Vec& target,
                   const OdeOptions& ode, OdeSolution& sol, InteriorState& st) {
    ShotOutcome shot;
    shoot(ctx, model, domain, q0, st.alpha, target, 0.0, ode, sol, shot);
    st.t_exit = shot.t_exit;
    st.s = std::clamp(st.s, 1e-12, st.t_exit);
    double y[kMaxOdeDim];
    sol.eval(st.s, y);
    Vec p = Vec::zero(2);
    for (int i = 0; i < 2; ++i) {
        st.pos[i] = y[i];
        p[i] = y[2 + i];
    }
    st.vel = velocity_of(p, ctx.light_speed);
    st.res = norm(st.pos - target);
}

/** Damped Newton on (alpha, s) for an interior target. On success scratch_main
    holds the path of the converged angle. */
bool newton_interior(const EnergyContext& ctx, const PotentialModel& model,
                     const ConvexDomain& domain, const Vec& q0, const Vec& target,
                     const ShootOptions& opts, ShootScratch& scratch, InteriorState& st,
                     int& iterations) {
    try {
        eval_interior(ctx, model, domain, q0, target, opts.ode, scratch.main, st);
    } catch (const Error&) {
        return false;
    }
    for (int it = 0; it < opts.max_iter; ++it) {
        iterations = it;
        if (st.res <= opts.residual_tol) return true;

        InteriorState probe = st;
        probe.alpha += opts.fd_step;
        try {
            eval_interior(ctx, model, domain, q0, target, opts.ode, scratch.probe, probe);
        } catch (const Error&) {
            return false;
        }
        // columns of the 2 by 2 Jacobian: d pos / d alpha and d pos / d s
        Vec col_a = (1.0 / opts.fd_step) * (probe.pos - st.pos);
        Vec col_s = st.vel;
        double det = col_a[0] * col_s[1] - col_a[1] * col_s[0];
        double scale = norm(col_a) * norm(col_s) + 1e-300;
        if (std::abs(det) < 1e-14 * scale) return false;
        Vec f = st.pos - target;
        double da = (-f[0] * col_s[1] + f[1] * col_s[0]) / det;
        double ds = (-col_a[0] * f[1] + col_a[1] * f[0]) / det;

        double damp = 1.0;
        bool accepted = false;
        for (int cut = 0; cut < 8 && !accepted; ++cut) {
            InteriorState trial = st;
            trial.alpha = st.alpha + damp * da;
            trial.s = st.s + damp * ds;
            try {
                eval_interior(ctx, model, domain, q0, target, opts.ode, scratch.main, trial);
            } catch (const Error&) {
                damp *= 0.5;
                continue;
            }
            if (trial.res < st.res) {
                st = trial;
                accepted = true;
            }
            damp *= 0.5;
        }
        if (!accepted) return false;
    }
    return st.res <= opts.residual_tol;
}

TransitSolution package_interior(const EnergyContext& ctx, const PotentialModel& model,
                                 const Vec& q0, const Vec& target, const InteriorState& st,
                                 int iterations, const OdeSolution& path) {
    BoundaryDatum d;
    d.q0 = q0;
    d.q = target;
    d.s = st.s;
    d.k = st.vel;
    d.k0 = ctx.shell_speed(model.value(q0)) * unit_dir(st.alpha);
    return TransitSolution{d, Trajectory(ctx, path, model), iterations, st.res};
}

} // namespace

TransitSolution solve_to_point(const EnergyContext& ctx, const PotentialModel& model,
                               const ConvexDomain& domain, const Vec& q0, const Vec& x,
                               const ShootOptions& opts, ShootScratch* scratch) {
    require_planar(ctx, domain);
    require_on_boundary(domain, q0, "start point");
    if (domain.level(x) > -1e-9)
        throw Error("interior target must lie strictly inside the domain");
    Vec chord = x - q0;
    if (!(norm(chord) > 0.0)) throw ZeroDirection("target coincides with the start point");

    if (opts.straight_shortcut && !opts.probe_uniqueness &&
        model.segment_clear_of_support(q0, x))
        return make_straight(ctx, model, q0, x, false);

    ShootScratch local;
    ShootScratch& scr = scratch ? *scratch : local;

    InteriorState st;
    st.alpha = opts.initial_angle ? *opts.initial_angle : direction_angle(chord);
    st.s = opts.initial_time ? *opts.initial_time : norm(chord) / ctx.asymptotic_speed();
    int iterations = 0;
    bool warm_ok = newton_interior(ctx, model, domain, q0, x, opts, scr, st, iterations);
    if (warm_ok && !opts.probe_uniqueness)
        return package_interior(ctx, model, q0, x, st, iterations, scr.main);

    struct Hit {
        InteriorState st;
        int iterations;
    };
    Hit hits[9];
    int n_hits = 0;
    if (warm_ok) hits[n_hits++] = {st, iterations};

    double starts[8];
    multistart_angles(domain, q0, starts);
    for (int m = 0; m < 8; ++m) {
        InteriorState cand;
        cand.alpha = starts[m];
        // seed the arrival time with the closest sample of a probe path
        try {
            ShotOutcome shot;
            shoot(ctx, model, domain, q0, cand.alpha, x, 0.0, opts.ode, scr.probe, shot);
            double best_d = 1e300;
            for (int i = 0; i < scr.probe.samples(); ++i) {
                const double* y = scr.probe.state(i);
                double dx0 = y[0] - x[0], dx1 = y[1] - x[1];
                double dd = dx0 * dx0 + dx1 * dx1;
                if (dd < best_d) {
                    best_d = dd;
                    cand.s = scr.probe.time(i);
                }
            }
        } catch (const Error&) {
            continue;
        }
        int its = 0;
        if (newton_interior(ctx, model, domain, q0, x, opts, scr, cand, its))
            hits[n_hits++] = {cand, its};
    }
    if (n_hits == 0)
        throw NoConvergence("interior shooting failed from every start direction");

    for (int a = 0; a < n_hits; ++a)
        for (int b = a + 1; b < n_hits; ++b) {
            bool same = norm(unit_dir(hits[a].st.alpha) - unit_dir(hits[b].st.alpha)) < 1e-7 &&
                        std::abs(hits[a].st.s - hits[b].st.s) <
                            1e-6 * std::max(1.0, hits[a].st.s);
            if (!same)
                throw NonUnique("distinct paths reach the same interior point");
        }

    int best = 0;
    for (int a = 1; a < n_hits; ++a)
        if (hits[a].st.res < hits[best].st.res) best = a;

    InteriorState win = hits[best].st;
    eval_interior(ctx, model, domain, q0, x, opts.ode, scr.main, win);
    return package_interior(ctx, model, q0, x, win, hits[best].iterations, scr.main);
}

BoundaryGrid boundary_grid(const EnergyContext& ctx, const PotentialModel& model,
                           const ConvexDomain& domain, int n_theta, double delta,
                           const ShootOptions& opts, int threads, const GridRowHook& hook) {
    require_planar(ctx, domain);
    if (n_theta < 8) throw ConfigError("boundary grid needs at least 8 angles");
    if (!(delta > 0.0)) throw ConfigError("diagonal exclusion must be positive");
    require_admissible(ctx, model);

    BoundaryGrid grid;
    grid.n_theta = n_theta;
    grid.delta = delta;
    grid.thetas.resize(static_cast<std::size_t>(n_theta));
    std::vector<Vec> points(static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_theta; ++i) {
        grid.thetas[static_cast<std::size_t>(i)] = kTwoPi * i / n_theta;
        points[static_cast<std::size_t>(i)] =
            domain.boundary_point(grid.thetas[static_cast<std::size_t>(i)]);
    }

    std::vector<std::vector<BoundaryGridRow>> rows_by(static_cast<std::size_t>(n_theta));
    std::vector<std::vector<BoundaryGridFailure>> fails_by(static_cast<std::size_t>(n_theta));

    auto row_fn = [&](int i) {
        ShootScratch scratch;
        ShootOptions row_opts = opts;
        auto& rows = rows_by[static_cast<std::size_t>(i)];
        auto& fails = fails_by[static_cast<std::size_t>(i)];
        bool have_prev = false;
        double prev_correction = 0.0;  // solved angle minus chord angle, carried along the row
        for (int jj = 1; jj < n_theta; ++jj) {
            int j = (i + jj) % n_theta;
            double ti = grid.thetas[static_cast<std::size_t>(i)];
            double tj = grid.thetas[static_cast<std::size_t>(j)];
            if (std::abs(wrap_pi(tj - ti)) < delta) continue;
            const Vec& qi = points[static_cast<std::size_t>(i)];
            const Vec& qj = points[static_cast<std::size_t>(j)];
            double chord_angle = direction_angle(qj - qi);
            if (have_prev)
                row_opts.initial_angle = chord_angle + prev_correction;
            else
                row_opts.initial_angle.reset();
            try {
                TransitSolution sol =
                    solve_boundary_value(ctx, model, domain, qi, qj, row_opts, &scratch);
                BoundaryGridRow row{i, j, ti, tj, sol.datum};
                if (hook) hook(row, sol);
                rows.push_back(row);
                prev_correction = direction_angle(sol.datum.k0) - chord_angle;
                have_prev = true;
            } catch (const Error& e) {
                fails.push_back({i, j, e.what()});
                have_prev = false;
            }
        }
    };
    parallel_rows(n_theta, threads, row_fn);

    for (int i = 0; i < n_theta; ++i) {
        auto& rows = rows_by[static_cast<std::size_t>(i)];
        grid.rows.insert(grid.rows.end(), rows.begin(), rows.end());
        auto& fails = fails_by[static_cast<std::size_t>(i)];
        grid.failures.insert(grid.failures.end(), fails.begin(), fails.end());
    }
    return grid;
}

} // namespace relnewt
