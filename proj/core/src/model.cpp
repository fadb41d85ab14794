#include "relnewt/model.hpp"

#include <algorithm>
#include <cmath>

#include "relnewt/errors.hpp"

namespace relnewt {

namespace {

// profile maxima of a single bump, derived from the radial profile A(1-s)^3, s = |x-c|^2/rho^2:
//   sup |V|        = |A|
//   sup |grad V|   = 6|A|/rho * max_xi xi(1-xi^2)^2        = 96/(25 sqrt 5) |A|/rho
//   sup |hessian|  = 6|A|/rho^2 * max(|radial|, |tangential|) eigenvalue  = 6|A|/rho^2
constexpr double kGradProfileMax = 96.0 / (25.0 * 2.2360679774997896964091736687747);

double bump_grad_max(const Bump& b) { return kGradProfileMax * std::abs(b.amplitude) / b.radius; }
double bump_hess_max(const Bump& b) { return 6.0 * std::abs(b.amplitude) / (b.radius * b.radius); }

double segment_point_dist2(const Vec& p0, const Vec& p1, const Vec& c) {
    Vec d = p1 - p0;
    double dd = norm2(d);
    double t = dd > 0.0 ? dot(c - p0, d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm2(p0 + t * d - c);
}

} // namespace

PotentialModel::PotentialModel(int dim, std::vector<Bump> bumps)
    : dim_(dim), bumps_(std::move(bumps)) {
    if (dim_ != 2 && dim_ != 3) throw ConfigError("potential dimension must be 2 or 3");
    for (const Bump& b : bumps_) {
        if (!(b.radius > 0.0)) throw ConfigError("bump radius must be positive");
        if (b.center.dim() != dim_) throw ConfigError("bump center dimension mismatch");
    }

    // enclosing ball of all bumps with nonzero amplitude
    bool first = true;
    for (const Bump& b : bumps_) {
        if (b.amplitude == 0.0) continue;
        if (first) {
            support_center_ = b.center;
            support_radius_ = b.radius;
            first = false;
            continue;
        }
        Vec d = b.center - support_center_;
        double dist = norm(d);
        if (dist + b.radius <= support_radius_) continue;
        if (dist + support_radius_ <= b.radius) {
            support_center_ = b.center;
            support_radius_ = b.radius;
            continue;
        }
        double merged = 0.5 * (dist + support_radius_ + b.radius);
        support_center_ += ((merged - support_radius_) / dist) * d;
        support_radius_ = merged;
    }
    if (first) support_center_ = Vec::zero(dim_);

    double c2_analytic = 0.0;
    double sup_analytic = 0.0;
    double grad_sum = 0.0;
    for (const Bump& b : bumps_) {
        c2_analytic += std::max({std::abs(b.amplitude), bump_grad_max(b), bump_hess_max(b)});
        sup_analytic += std::max(b.amplitude, 0.0);
        grad_sum += bump_grad_max(b);
    }

    // dense sample over the support box, guarantees the bounds never undercut an
    // observed value and tightens sup V via a Lipschitz slack per grid cell
    double sampled_c2 = 0.0;
    double sampled_sup = 0.0;
    if (support_radius_ > 0.0) {
        const int m = dim_ == 2 ? 161 : 49;
        const double h = 2.0 * support_radius_ / (m - 1);
        Vec x = Vec::zero(dim_);
        const int mk = dim_ == 3 ? m : 1;
        for (int i = 0; i < m; ++i) {
            x[0] = support_center_[0] - support_radius_ + i * h;
            for (int j = 0; j < m; ++j) {
                x[1] = support_center_[1] - support_radius_ + j * h;
                for (int k = 0; k < mk; ++k) {
                    if (dim_ == 3) x[2] = support_center_[2] - support_radius_ + k * h;
                    PotentialEval e = eval(x);
                    sampled_sup = std::max(sampled_sup, e.value);
                    double m2 = std::abs(e.value);
                    for (int d = 0; d < dim_; ++d) m2 = std::max(m2, std::abs(e.gradient[d]));
                    for (int r = 0; r < dim_; ++r)
                        for (int c = 0; c < dim_; ++c) m2 = std::max(m2, std::abs(e.hess(r, c)));
                    sampled_c2 = std::max(sampled_c2, m2);
                }
            }
        }
        double slack = grad_sum * 0.5 * h * std::sqrt(static_cast<double>(dim_));
        sup_analytic = std::min(sup_analytic, sampled_sup + slack);
    }
    sup_bound_ = std::max(sup_analytic, sampled_sup);
    c2_bound_ = std::max(c2_analytic, sampled_c2);
}

PotentialEval PotentialModel::eval(const Vec& x) const {
    PotentialEval out;
    out.gradient = Vec::zero(dim_);
    for (const Bump& b : bumps_) {
        Vec d = x - b.center;
        double rho2 = b.radius * b.radius;
        double u = norm2(d) / rho2;
        if (u >= 1.0) continue;
        double w = 1.0 - u;
        double w2 = w * w;
        out.value += b.amplitude * w2 * w;
        double g = -6.0 * b.amplitude * w2 / rho2;
        for (int i = 0; i < dim_; ++i) out.gradient[i] += g * d[i];
        double h2 = 24.0 * b.amplitude * w / (rho2 * rho2);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                out.hessian[static_cast<std::size_t>(3 * i + j)] +=
                    (i == j ? g : 0.0) + h2 * d[i] * d[j];
            }
        }
    }
    return out;
}

double PotentialModel::value(const Vec& x) const {
    double v = 0.0;
    for (const Bump& b : bumps_) {
        Vec d = x - b.center;
        double u = norm2(d) / (b.radius * b.radius);
        if (u >= 1.0) continue;
        double w = 1.0 - u;
        v += b.amplitude * w * w * w;
    }
    return v;
}

bool PotentialModel::segment_clear_of_support(const Vec& p0, const Vec& p1) const {
    for (const Bump& b : bumps_) {
        if (b.amplitude == 0.0) continue;
        if (segment_point_dist2(p0, p1, b.center) < b.radius * b.radius) return false;
    }
    return true;
}

ConvexDomain::ConvexDomain(Kind kind, int dim, Vec center, Vec radii)
    : kind_(kind), dim_(dim), center_(center), radii_(radii) {
    if (dim_ != 2 && dim_ != 3) throw ConfigError("domain dimension must be 2 or 3");
    for (int i = 0; i < dim_; ++i)
        if (!(radii_[i] > 0.0)) throw ConfigError("domain radii must be positive");
    if (kind_ == Kind::disk) {
        for (int i = 1; i < dim_; ++i)
            if (radii_[i] != radii_[0]) throw ConfigError("disk radii must be equal");
    }
}

ConvexDomain ConvexDomain::disk(int dim, Vec center, double radius) {
    Vec r = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) r[i] = radius;
    return ConvexDomain(Kind::disk, dim, center, r);
}

double ConvexDomain::level(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        double t = (x[i] - center_[i]) / radii_[i];
        s += t * t;
    }
    return s - 1.0;
}

Vec ConvexDomain::level_gradient(const Vec& x) const {
    Vec g = Vec::zero(dim_);
    for (int i = 0; i < dim_; ++i) g[i] = 2.0 * (x[i] - center_[i]) / (radii_[i] * radii_[i]);
    return g;
}

Vec ConvexDomain::outward_normal(const Vec& x) const { return normalized(level_gradient(x)); }

bool ConvexDomain::contains(const Vec& x, double tol) const { return level(x) <= tol; }

double ConvexDomain::diameter() const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i) r = std::max(r, radii_[i]);
    return 2.0 * r;
}

Vec ConvexDomain::boundary_point(double theta) const {
    return Vec(center_[0] + radii_[0] * std::cos(theta), center_[1] + radii_[1] * std::sin(theta));
}

Vec ConvexDomain::boundary_tangent(double theta) const {
    return normalized(Vec(-radii_[0] * std::sin(theta), radii_[1] * std::cos(theta)));
}

double ConvexDomain::boundary_param(const Vec& x) const {
    return std::atan2((x[1] - center_[1]) / radii_[1], (x[0] - center_[0]) / radii_[0]);
}

Vec ConvexDomain::boundary_point3(double polar, double azimuth) const {
    double sp = std::sin(polar);
    return Vec(center_[0] + radii_[0] * sp * std::cos(azimuth),
               center_[1] + radii_[1] * sp * std::sin(azimuth),
               center_[2] + radii_[2] * std::cos(polar));
}

double ConvexDomain::normal_curvature(const Vec& x, const Vec& t) const {
    double num = 0.0;
    for (int i = 0; i < dim_; ++i) num += 2.0 * t[i] * t[i] / (radii_[i] * radii_[i]);
    return num / norm(level_gradient(x));
}

namespace {

RayGeometry classify_quadratic(double A, double B, double C) {
    RayGeometry out;
    double disc = B * B - 4.0 * A * C;
    double scale = B * B + std::abs(4.0 * A * C);
    double band = 1e-12 * scale;
    if (disc <= band) {
        // scale == 0 forces B == C == 0: the start point lies on the level set
        // with a tangent direction, which is still a single grazing contact.
        out.crossings = (disc >= -band) ? 1 : 0;
        return out;
    }
    double sq = std::sqrt(disc);
    double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    double t1 = q / A;
    double t2 = C / q;
    out.crossings = 2;
    out.t_enter = std::min(t1, t2);
    out.t_exit = std::max(t1, t2);
    return out;
}

} // namespace

RayGeometry ray_intersections(const ConvexDomain& domain, const Vec& v, const Vec& x) {
    if (norm2(v) == 0.0) throw ZeroDirection("ray direction has zero length");
    double A = 0.0, B = 0.0, C = -1.0;
    for (int i = 0; i < domain.dim(); ++i) {
        double ri = domain.radii()[i];
        double vi = v[i] / ri;
        double xi = (x[i] - domain.center()[i]) / ri;
        A += vi * vi;
        B += 2.0 * vi * xi;
        C += xi * xi;
    }
    return classify_quadratic(A, B, C);
}

RayGeometry ray_ball_intersections(const Vec& center, double radius, const Vec& v, const Vec& x) {
    if (norm2(v) == 0.0) throw ZeroDirection("ray direction has zero length");
    if (radius <= 0.0) return RayGeometry{};
    Vec d = x - center;
    double A = norm2(v);
    double B = 2.0 * dot(v, d);
    double C = norm2(d) - radius * radius;
    return classify_quadratic(A, B, C);
}

bool support_inside(const PotentialModel& model, const ConvexDomain& domain, double margin) {
    double amin = domain.radii()[0];
    for (int i = 1; i < domain.dim(); ++i) amin = std::min(amin, domain.radii()[i]);
    for (const Bump& b : model.bumps()) {
        if (b.amplitude == 0.0) continue;
        double g = std::sqrt(domain.level(b.center) + 1.0);
        // euclidean distance from the bump center to the boundary is at least (1-g)*amin
        if ((1.0 - g) * amin < b.radius + margin) return false;
    }
    return true;
}

} // namespace relnewt
