#include "relnewt/quadrature.hpp"

#include <cmath>
#include <cstddef>

#include "relnewt/errors.hpp"

namespace relnewt {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ConfigError("gauss_legendre needs n >= 1");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < half; ++k) {
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P'_n(x)
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(k)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - k)] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(k)] = w;
        weights[static_cast<std::size_t>(n - 1 - k)] = w;
    }
}

std::vector<double> periodic_derivative(const std::vector<double>& values, double h) {
    static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    const int n = static_cast<int>(values.size());
    if (n < 9) throw ConfigError("periodic_derivative needs at least 9 samples");
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= 4; ++k) {
            int ip = i + k < n ? i + k : i + k - n;
            int im = i - k >= 0 ? i - k : i - k + n;
            s += c[k - 1] * (values[static_cast<std::size_t>(ip)] - values[static_cast<std::size_t>(im)]);
        }
        out[static_cast<std::size_t>(i)] = s / h;
    }
    return out;
}

PolarGrid::PolarGrid(const ConvexDomain& domain, int n_angular_, int n_radial_) {
    if (domain.dim() != 2) throw ConfigError("PolarGrid is 2d only");
    if (n_angular_ < 4 || n_radial_ < 1) throw ConfigError("PolarGrid needs n_angular >= 4, n_radial >= 1");
    n_angular = n_angular_;
    n_radial = n_radial_;
    const double pi = 3.14159265358979323846;
    angles.resize(static_cast<std::size_t>(n_angular));
    for (int i = 0; i < n_angular; ++i) angles[static_cast<std::size_t>(i)] = 2.0 * pi * i / n_angular;

    std::vector<double> gx, gw;
    gauss_legendre(n_radial, gx, gw);
    rho.resize(static_cast<std::size_t>(n_radial));
    std::vector<double> wr(static_cast<std::size_t>(n_radial));
    for (int j = 0; j < n_radial; ++j) {
        rho[static_cast<std::size_t>(j)] = 0.5 * (gx[static_cast<std::size_t>(j)] + 1.0);
        wr[static_cast<std::size_t>(j)] = 0.5 * gw[static_cast<std::size_t>(j)];
    }

    const double a = domain.radii()[0], b = domain.radii()[1];
    const double dtheta = 2.0 * pi / n_angular;
    nodes.resize(static_cast<std::size_t>(n_angular * n_radial));
    weights.resize(nodes.size());
    for (int i = 0; i < n_angular; ++i) {
        double ct = std::cos(angles[static_cast<std::size_t>(i)]);
        double st = std::sin(angles[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n_radial; ++j) {
            double r = rho[static_cast<std::size_t>(j)];
            std::size_t k = static_cast<std::size_t>(index(i, j));
            nodes[k] = Vec(domain.center()[0] + a * r * ct, domain.center()[1] + b * r * st);
            weights[k] = a * b * r * wr[static_cast<std::size_t>(j)] * dtheta;
        }
    }
}

} // namespace relnewt
