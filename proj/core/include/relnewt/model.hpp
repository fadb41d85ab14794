#pragma once

#include <array>
#include <vector>

#include "relnewt/vec.hpp"

namespace relnewt {

/** Value, gradient and hessian of the potential at one point. */
struct PotentialEval {
    double value = 0.0;
    Vec gradient;
    // symmetric, row major, only the leading n x n block is meaningful
    std::array<double, 9> hessian{};

    double hess(int i, int j) const { return hessian[static_cast<std::size_t>(3 * i + j)]; }
};

/** One compactly supported C^2 bump: A * (1 - |x - c|^2 / rho^2)^3 inside its ball. */
struct Bump {
    Vec center;
    double amplitude = 0.0;
    double radius = 1.0;
};

/** Sum of C^2 bumps. Smoothness at each support sphere is exactly C^2, which is the
    regularity class every solver here is rated for. */
class PotentialModel {
public:
    PotentialModel(int dim, std::vector<Bump> bumps);

    int dim() const { return dim_; }
    const std::vector<Bump>& bumps() const { return bumps_; }

    PotentialEval eval(const Vec& x) const;
    double value(const Vec& x) const;

    /** Upper bound for sup_x V(x), from per bump maxima plus overlap sampling. */
    double sup_bound() const { return sup_bound_; }

    /** Upper bound for max over |j| <= 2 of sup |d^j V|.
        Per bump the exact profile maxima are known in closed form (the hessian sup
        comes from its radial and tangential eigenvalues); bumps are summed, and a
        dense sample of the union support guarantees the result is never below an
        observed value. */
    double c2_norm_bound() const { return c2_bound_; }

    /** Center and radius of a ball containing the whole support. Radius 0 means
        the potential is identically zero. */
    Vec support_center() const { return support_center_; }
    double support_radius() const { return support_radius_; }

    /** True if the straight segment from p0 to p1 stays outside every bump, so a
        trajectory through these points feels no force. */
    bool segment_clear_of_support(const Vec& p0, const Vec& p1) const;

private:
    int dim_;
    std::vector<Bump> bumps_;
    Vec support_center_;
    double support_radius_ = 0.0;
    double sup_bound_ = 0.0;
    double c2_bound_ = 0.0;
};

/** Strictly convex bounded region, a disk/ball or an axis aligned ellipse/ellipsoid.
    Points with level(x) < 0 are inside. */
class ConvexDomain {
public:
    enum class Kind { disk, ellipse };

    ConvexDomain(Kind kind, int dim, Vec center, Vec radii);

    static ConvexDomain disk(int dim, Vec center, double radius);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    Vec center() const { return center_; }
    Vec radii() const { return radii_; }

    double level(const Vec& x) const;
    Vec level_gradient(const Vec& x) const;
    Vec outward_normal(const Vec& x) const;
    bool contains(const Vec& x, double tol = 0.0) const;
    double diameter() const;

    /** Boundary point for parameter theta, n = 2. */
    Vec boundary_point(double theta) const;
    /** Unit tangent in the direction of increasing theta, n = 2. */
    Vec boundary_tangent(double theta) const;
    /** Boundary parameter of a point on (or near) the boundary, n = 2. */
    double boundary_param(const Vec& x) const;
    /** Boundary point for polar angle in [0, pi] and azimuth, n = 3. */
    Vec boundary_point3(double polar, double azimuth) const;

    /** Euclidean normal curvature at boundary point x along unit tangent t.
        Strictly positive for positive radii. */
    double normal_curvature(const Vec& x, const Vec& t) const;

private:
    Kind kind_;
    int dim_;
    Vec center_;
    Vec radii_;
};

/** Intersection pattern of the line t -> x + t v with the closure of a domain.
    crossings is 2 for a transversal chord, 1 for a tangency (treated as no chord
    by every consumer), 0 for a miss. t_enter <= t_exit are set when crossings == 2. */
struct RayGeometry {
    int crossings = 0;
    double t_enter = 0.0;
    double t_exit = 0.0;
};

/** Classify the line against the domain. The tangency band is 1e-12 relative to
    the scale of the quadratic's coefficients. Throws ZeroDirection for |v| = 0. */
RayGeometry ray_intersections(const ConvexDomain& domain, const Vec& v, const Vec& x);

/** Same classification against an arbitrary ball (used for support spheres). */
RayGeometry ray_ball_intersections(const Vec& center, double radius, const Vec& v, const Vec& x);

/** True if the support of the model lies inside the domain with at least the given
    euclidean margin to the boundary. */
bool support_inside(const PotentialModel& model, const ConvexDomain& domain, double margin);

} // namespace relnewt
