#pragma once

#include <vector>

#include "relnewt/model.hpp"
#include "relnewt/vec.hpp"

namespace relnewt {

/** Gauss Legendre nodes and weights on [-1, 1]. */
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/** Fixed 7 point Gauss Legendre rule on [a, b], exact through degree 13. */
template <class F>
double gauss7(const F& f, double a, double b) {
    static const double xk[7] = {
        -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
        0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
    static const double wk[7] = {
        0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
        0.3818300505051189, 0.2797053914892767, 0.1294849661688697};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < 7; ++k) s += wk[k] * f(mid + half * xk[k]);
    return s * half;
}

/** d/dtheta of a periodic sample vector by the 8th order central stencil with
    wraparound. h is the grid spacing; values.size() is the period. */
std::vector<double> periodic_derivative(const std::vector<double>& values, double h);

/** Tensor quadrature grid over a 2d convex domain in scaled polar coordinates:
    uniform angles, Gauss Legendre nodes in the radial coordinate, weights carry
    the polar jacobian. Node (i, j) = angle index i, radial index j. */
struct PolarGrid {
    PolarGrid(const ConvexDomain& domain, int n_angular, int n_radial);

    int n_angular = 0;
    int n_radial = 0;
    std::vector<double> angles;
    std::vector<double> rho;       // radial coordinate in (0, 1)
    std::vector<Vec> nodes;        // size n_angular * n_radial, angle major
    std::vector<double> weights;   // matching area weights, sum approximates the area

    int index(int i_ang, int j_rad) const { return i_ang * n_radial + j_rad; }

    template <class F>
    double integrate(const F& f) const {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
        return s;
    }
};

} // namespace relnewt
