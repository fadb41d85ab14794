#include "relnewt/stability.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "relnewt/errors.hpp"
#include "relnewt/quadrature.hpp"

namespace relnewt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8th order periodic central first derivative, index arithmetic modulo n
double stencil_deriv(const std::vector<double>& f, int i, int n, double h) {
    auto at = [&](int m) { return f[static_cast<std::size_t>(((i + m) % n + n) % n)]; };
    return (0.8 * (at(1) - at(-1)) - 0.2 * (at(2) - at(-2)) +
            (4.0 / 105.0) * (at(3) - at(-3)) - (1.0 / 280.0) * (at(4) - at(-4))) /
           h;
}

void require_same_boundary_grid(const HodographField& f1, const HodographField& f2) {
    if (f1.target != HodographField::Target::boundary ||
        f2.target != HodographField::Target::boundary)
        throw GridMismatch("boundary pairing needs boundary-boundary fields");
    if (f1.n_zeta != f2.n_zeta || f1.n_x != f2.n_x || f1.delta != f2.delta)
        throw GridMismatch("boundary fields are on different grids");
    if (!f1.failures.empty() || !f2.failures.empty())
        throw GridMismatch("fields carry failed nodes");
}

} // namespace

double boundary_pairing(const HodographField& f1, const HodographField& f2) {
    return boundary_pairing_field(f1, f2).integral;
}

PairingField boundary_pairing_field(const HodographField& f1, const HodographField& f2) {
    require_same_boundary_grid(f1, f2);
    int nz = f1.n_zeta, nx = f1.n_x;
    double hz = kTwoPi / nz, hx = kTwoPi / nx;

    // distance difference, extended by zero across the excluded band
    std::vector<double> dl(static_cast<std::size_t>(nz) * nx, 0.0);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nx; ++j) {
            const HodographNode* a = f1.find(i, j);
            const HodographNode* b = f2.find(i, j);
            if (!a != !b) throw GridMismatch("node coverage differs between fields");
            if (a) dl[static_cast<std::size_t>(i) * nx + j] = b->l - a->l;
        }

    std::vector<double> row(static_cast<std::size_t>(nx));
    std::vector<double> col(static_cast<std::size_t>(nz));
    std::vector<double> dx(dl.size()), dz(dl.size());
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nx; ++j) row[static_cast<std::size_t>(j)] = dl[static_cast<std::size_t>(i) * nx + j];
        for (int j = 0; j < nx; ++j)
            dx[static_cast<std::size_t>(i) * nx + j] = stencil_deriv(row, j, nx, hx);
    }
    for (int j = 0; j < nx; ++j) {
        for (int i = 0; i < nz; ++i) col[static_cast<std::size_t>(i)] = dl[static_cast<std::size_t>(i) * nx + j];
        for (int i = 0; i < nz; ++i)
            dz[static_cast<std::size_t>(i) * nx + j] = stencil_deriv(col, i, nz, hz);
    }

    // orientation pinned so the pairing comes out nonnegative for data produced
    // by one metric dominating the other; the interior representation cross
    // checks the choice
    PairingField out;
    out.n_zeta = nz;
    out.n_x = nx;
    out.values.resize(dl.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < dl.size(); ++k) {
        out.values[k] = -(dx[k] * dz[k]);
        sum += dx[k] * dz[k];
    }
    out.integral = -sum * hz * hx;
    return out;
}

double interior_pairing(const HodographField& f1, const HodographField& f2,
                        const MetricField& g1, const MetricField& g2) {
    if (f1.target != HodographField::Target::interior ||
        f2.target != HodographField::Target::interior)
        throw GridMismatch("interior pairing needs boundary-interior fields");
    if (f1.n_zeta != f2.n_zeta || f1.n_x != f2.n_x)
        throw GridMismatch("interior fields are on different grids");
    if (!f1.failures.empty() || !f2.failures.empty())
        throw GridMismatch("fields carry failed nodes");
    for (int j = 0; j < f1.n_x; ++j) {
        const Vec& p = f1.x_points[static_cast<std::size_t>(j)];
        const Vec& q = f2.x_points[static_cast<std::size_t>(j)];
        if (p[0] != q[0] || p[1] != q[1])
            throw GridMismatch("interior point sets differ");
    }

    int nz = f1.n_zeta;
    double hz = kTwoPi / nz;
    double c = g1.context().light_speed;

    std::vector<double> a1(static_cast<std::size_t>(nz)), a2(a1), da1(a1), da2(a1);
    std::vector<Vec> grad1(static_cast<std::size_t>(nz), Vec::zero(2)), grad2(grad1);

    // periodic derivative of an angle sweep that gains a full turn per cycle:
    // differentiate the unwrapped sequence with the seam shifted by the total
    auto angle_deriv = [&](const std::vector<double>& a, std::vector<double>& da) {
        std::vector<double> u(a.size());
        u[0] = a[0];
        for (int i = 1; i < nz; ++i)
            u[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>(i - 1)] +
                std::remainder(a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i - 1)], kTwoPi);
        double turn = u[static_cast<std::size_t>(nz - 1)] +
                      std::remainder(a[0] - a[static_cast<std::size_t>(nz - 1)], kTwoPi) - u[0];
        auto at = [&](int m) {
            int w = 0;
            while (m >= nz) { m -= nz; ++w; }
            while (m < 0) { m += nz; --w; }
            return u[static_cast<std::size_t>(m)] + w * turn;
        };
        for (int i = 0; i < nz; ++i)
            da[static_cast<std::size_t>(i)] =
                (0.8 * (at(i + 1) - at(i - 1)) - 0.2 * (at(i + 2) - at(i - 2)) +
                 (4.0 / 105.0) * (at(i + 3) - at(i - 3)) -
                 (1.0 / 280.0) * (at(i + 4) - at(i - 4))) /
                hz;
    };

    double total = 0.0;
    for (int j = 0; j < f1.n_x; ++j) {
        for (int i = 0; i < nz; ++i) {
            const HodographNode* n1 = f1.find(i, j);
            const HodographNode* n2 = f2.find(i, j);
            if (!n1 || !n2) throw GridMismatch("node coverage differs between fields");
            a1[static_cast<std::size_t>(i)] = std::atan2(-n1->k[1], -n1->k[0]);
            a2[static_cast<std::size_t>(i)] = std::atan2(-n2->k[1], -n2->k[0]);
            grad1[static_cast<std::size_t>(i)] = momentum_of(n1->k, c);
            grad2[static_cast<std::size_t>(i)] = momentum_of(n2->k, c);
        }
        angle_deriv(a1, da1);
        angle_deriv(a2, da2);

        const Vec& x = f1.x_points[static_cast<std::size_t>(j)];
        double r1 = g1.weight(x), r2 = g2.weight(x);
        double slice = 0.0;
        for (int i = 0; i < nz; ++i) {
            std::size_t k = static_cast<std::size_t>(i);
            double cross = dot(grad1[k], grad2[k]);
            slice += r1 * r1 * da1[k] + r2 * r2 * da2[k] - cross * (da1[k] + da2[k]);
        }
        total += slice * hz * f1.x_weights[static_cast<std::size_t>(j)];
    }
    return total;
}

StabilityReport stability_estimate(const EnergyContext& ctx, const PotentialModel& m1,
                                   const PotentialModel& m2, const ConvexDomain& domain,
                                   const StabilityMesh& mesh) {
    if (ctx.dim != 2) throw ConfigError("the stability estimate is planar");
    require_admissible(ctx, m1);
    require_admissible(ctx, m2);

    StabilityReport rep;
    rep.mesh = mesh;
    using Target = HodographField::Target;
    int nb = mesh.n_boundary;

    HodographField b1 = hodograph_grid(ctx, m1, domain, nb, nb, Target::boundary,
                                       mesh.delta, {}, mesh.threads);
    HodographField b2 = hodograph_grid(ctx, m2, domain, nb, nb, Target::boundary,
                                       mesh.delta, {}, mesh.threads);
    rep.pairing_delta = boundary_pairing(b1, b2);
    HodographField h1 = hodograph_grid(ctx, m1, domain, nb, nb, Target::boundary,
                                       mesh.delta / 2.0, {}, mesh.threads);
    HodographField h2 = hodograph_grid(ctx, m2, domain, nb, nb, Target::boundary,
                                       mesh.delta / 2.0, {}, mesh.threads);
    rep.pairing_half = boundary_pairing(h1, h2);
    // first order band extrapolation toward zero width
    rep.pairing = 2.0 * rep.pairing_half - rep.pairing_delta;

    MetricField g1(ctx, m1), g2(ctx, m2);
    HodographField i1 = hodograph_grid(ctx, m1, domain, mesh.n_zeta, mesh.n_x,
                                       Target::interior, 0.0, {}, mesh.threads);
    HodographField i2 = hodograph_grid(ctx, m2, domain, mesh.n_zeta, mesh.n_x,
                                       Target::interior, 0.0, {}, mesh.threads);
    rep.interior = interior_pairing(i1, i2, g1, g2);

    PolarGrid quad(domain, mesh.quad_angular, mesh.quad_radial);
    rep.weight_misfit = quad.integrate([&](const Vec& x) {
        double d = g1.weight(x) - g2.weight(x);
        return d * d;
    });

    rep.bound = rep.pairing / kTwoPi;
    rep.slack = rep.bound - rep.weight_misfit;
    rep.pairing_gap = std::abs(rep.pairing - rep.interior);
    return rep;
}

} // namespace relnewt
