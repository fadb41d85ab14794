#include "relnewt/hodograph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relnewt/errors.hpp"
#include "relnewt/parallel.hpp"

namespace relnewt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool on_boundary(const ConvexDomain& domain, const Vec& p) {
    return std::abs(domain.level(p)) <= 1e-6;
}

TransitSolution solve_pair(const EnergyContext& ctx, const PotentialModel& model,
                           const ConvexDomain& domain, const Vec& zeta, const Vec& x,
                           const ShootOptions& opts, ShootScratch* scratch = nullptr) {
    if (!on_boundary(domain, zeta))
        throw ConfigError("distance source must sit on the boundary");
    if (on_boundary(domain, x))
        return solve_boundary_value(ctx, model, domain, zeta, x, opts, scratch);
    return solve_to_point(ctx, model, domain, zeta, x, opts, scratch);
}

// Interior-target paths run on to the domain exit; the distance stops at the
// arrival time, which is the path end for boundary targets.
double path_length(const MetricField& field, const TransitSolution& sol) {
    return metric_length(field, sol.path, sol.path.t_start(), sol.datum.s);
}

double launch_angle(const BoundaryDatum& d) { return std::atan2(d.k0[1], d.k0[0]); }

} // namespace

HodographPoint hodograph_distance(const EnergyContext& ctx, const PotentialModel& model,
                                  const ConvexDomain& domain, const Vec& zeta, const Vec& x,
                                  const ShootOptions& opts) {
    MetricField field(ctx, model);
    TransitSolution sol = solve_pair(ctx, model, domain, zeta, x, opts);
    return {path_length(field, sol), sol.datum.k, sol.datum.k0};
}

Vec nu_field(const EnergyContext& ctx, const PotentialModel& model,
             const ConvexDomain& domain, const Vec& zeta, const Vec& x,
             const ShootOptions& opts) {
    TransitSolution sol = solve_pair(ctx, model, domain, zeta, x, opts);
    return (-1.0 / norm(sol.datum.k)) * sol.datum.k;
}

GradientProbe gradient_identity_residual(const EnergyContext& ctx,
                                         const PotentialModel& model,
                                         const ConvexDomain& domain, const Vec& zeta,
                                         const Vec& x, double fd_step,
                                         const ShootOptions& opts) {
    if (!(domain.level(x) < -1e-7))
        throw ConfigError("gradient probe needs a strictly interior point");
    MetricField field(ctx, model);
    ShootScratch scr;
    TransitSolution center = solve_pair(ctx, model, domain, zeta, x, opts, &scr);

    // all four stencil solves start from the solved center configuration
    ShootOptions warm = opts;
    warm.initial_angle = launch_angle(center.datum);
    warm.initial_time = center.datum.s;

    Vec grad = Vec::zero(ctx.dim);
    for (int axis = 0; axis < ctx.dim; ++axis) {
        Vec xp = x, xm = x;
        xp[axis] += fd_step;
        xm[axis] -= fd_step;
        TransitSolution sp = solve_pair(ctx, model, domain, zeta, xp, warm, &scr);
        TransitSolution sm = solve_pair(ctx, model, domain, zeta, xm, warm, &scr);
        grad[axis] = (path_length(field, sp) - path_length(field, sm)) / (2.0 * fd_step);
    }

    GradientProbe out;
    out.diff = grad - momentum_of(center.datum.k, ctx.light_speed);
    double r = ctx.shell_momentum(model.value(x));
    out.eikonal_rel = std::abs(norm(grad) - r) / r;
    return out;
}

const HodographNode* HodographField::find(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_zeta || j >= n_x) return nullptr;
    int id = node_of_[static_cast<std::size_t>(i) * n_x + j];
    return id < 0 ? nullptr : &nodes[static_cast<std::size_t>(id)];
}

double HodographField::symmetry_residual() const {
    if (target != Target::boundary || n_zeta != n_x)
        throw ConfigError("symmetry needs a square boundary-boundary field");
    double worst = 0.0;
    for (const HodographNode& nd : nodes) {
        const HodographNode* mirror = find(nd.j, nd.i);
        if (mirror) worst = std::max(worst, std::abs(nd.l - mirror->l));
    }
    return worst;
}

HodographField hodograph_grid(const EnergyContext& ctx, const PotentialModel& model,
                              const ConvexDomain& domain, int n_zeta, int n_x,
                              HodographField::Target target, double delta,
                              const ShootOptions& opts, int threads) {
    if (ctx.dim != 2) throw ConfigError("distance fields are built in the plane");
    require_admissible(ctx, model);
    if (n_zeta < 8 || n_x < 8)
        throw ConfigError("hodograph grids need at least 8 nodes per axis");
    bool boundary_target = target == HodographField::Target::boundary;
    if (boundary_target && !(delta > 0.0))
        throw ConfigError("boundary-boundary fields need a positive diagonal band");

    HodographField f;
    f.target = target;
    f.n_zeta = n_zeta;
    f.delta = boundary_target ? delta : 0.0;
    f.theta_zeta.reserve(n_zeta);
    for (int i = 0; i < n_zeta; ++i) f.theta_zeta.push_back(kTwoPi * i / n_zeta);
    if (boundary_target) {
        f.n_x = n_x;
        f.theta_x.reserve(n_x);
        for (int j = 0; j < n_x; ++j) f.theta_x.push_back(kTwoPi * j / n_x);
    } else {
        PolarGrid grid(domain, n_x, std::max(4, n_x / 2));
        f.x_points = grid.nodes;
        f.x_weights = grid.weights;
        f.n_x = static_cast<int>(grid.nodes.size());
    }

    std::vector<std::vector<HodographNode>> rows_by(n_zeta);
    std::vector<std::vector<BoundaryGridFailure>> fails_by(n_zeta);

    auto do_row = [&](int i) {
        ShootScratch scr;
        MetricField field(ctx, model);
        Vec qi = domain.boundary_point(f.theta_zeta[i]);
        ShootOptions row_opts = opts;
        bool have_corr = false;
        double prev_corr = 0.0, prev_s = 0.0, prev_chord = 0.0;

        auto solve_into = [&](int j, const Vec& xj, double theta_xj) {
            Vec chord = xj - qi;
            double chord_angle = std::atan2(chord[1], chord[0]);
            double chord_len = norm(chord);
            if (have_corr) {
                row_opts.initial_angle = chord_angle + prev_corr;
                row_opts.initial_time =
                    prev_chord > 0.0 ? prev_s * chord_len / prev_chord : prev_s;
            } else {
                row_opts.initial_angle.reset();
                row_opts.initial_time.reset();
            }
            try {
                TransitSolution sol = solve_pair(ctx, model, domain, qi, xj, row_opts, &scr);
                HodographNode nd;
                nd.i = i;
                nd.j = j;
                nd.theta_zeta = f.theta_zeta[i];
                nd.theta_x = theta_xj;
                nd.x = xj;
                nd.l = path_length(field, sol);
                nd.k = sol.datum.k;
                nd.k0 = sol.datum.k0;
                rows_by[i].push_back(nd);
                prev_corr = launch_angle(sol.datum) - chord_angle;
                prev_s = sol.datum.s;
                prev_chord = chord_len;
                have_corr = true;
            } catch (const Error& e) {
                fails_by[i].push_back({i, j, e.what()});
                have_corr = false;
            }
        };

        if (boundary_target) {
            // sweep outward from the antipode; the band sits at the sweep ends
            int j0 = static_cast<int>(std::lround((f.theta_zeta[i] + std::numbers::pi) /
                                                 kTwoPi * n_x)) %
                     n_x;
            for (int jj = 0; jj < n_x; ++jj) {
                int j = (j0 + jj) % n_x;
                double gap = std::remainder(f.theta_x[j] - f.theta_zeta[i], kTwoPi);
                if (std::abs(gap) < delta) {
                    have_corr = false;
                    continue;
                }
                solve_into(j, domain.boundary_point(f.theta_x[j]), f.theta_x[j]);
            }
        } else {
            int per_line = f.n_x / n_x;  // nodes are angle-major
            for (int j = 0; j < f.n_x; ++j) {
                if (j % per_line == 0) have_corr = false;  // radius restarts near the center
                solve_into(j, f.x_points[static_cast<std::size_t>(j)], 0.0);
            }
        }
    };

    parallel_rows(n_zeta, resolve_thread_count(threads), do_row);

    f.node_of_.assign(static_cast<std::size_t>(n_zeta) * f.n_x, -1);
    for (int i = 0; i < n_zeta; ++i) {
        for (HodographNode& nd : rows_by[i]) {
            f.node_of_[static_cast<std::size_t>(i) * f.n_x + nd.j] =
                static_cast<int>(f.nodes.size());
            f.nodes.push_back(nd);
        }
        for (BoundaryGridFailure& fl : fails_by[i]) f.failures.push_back(fl);
    }
    return f;
}

} // namespace relnewt
