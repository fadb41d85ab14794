#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace relnewt {

/** Small euclidean vector with runtime dimension 2 or 3.
    Capacity is fixed so hot loops never touch the heap. */
struct Vec {
    std::array<double, 3> a{0.0, 0.0, 0.0};
    int n = 2;

    Vec() = default;
    Vec(double x, double y) : a{x, y, 0.0}, n(2) {}
    Vec(double x, double y, double z) : a{x, y, z}, n(3) {}
    static Vec zero(int dim) { Vec v; v.n = dim; return v; }

    double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
    int dim() const { return n; }

    Vec& operator+=(const Vec& o) { for (int i = 0; i < n; ++i) a[i] += o.a[i]; return *this; }
    Vec& operator-=(const Vec& o) { for (int i = 0; i < n; ++i) a[i] -= o.a[i]; return *this; }
    Vec& operator*=(double s) { for (int i = 0; i < n; ++i) a[i] *= s; return *this; }

    friend Vec operator+(Vec u, const Vec& v) { u += v; return u; }
    friend Vec operator-(Vec u, const Vec& v) { u -= v; return u; }
    friend Vec operator*(double s, Vec v) { v *= s; return v; }
    friend Vec operator*(Vec v, double s) { v *= s; return v; }
    friend Vec operator-(Vec v) { v *= -1.0; return v; }
};

inline double dot(const Vec& u, const Vec& v) {
    double s = 0.0;
    for (int i = 0; i < u.n; ++i) s += u.a[i] * v.a[i];
    return s;
}

inline double norm2(const Vec& v) { return dot(v, v); }
inline double norm(const Vec& v) { return std::sqrt(norm2(v)); }

inline Vec normalized(const Vec& v) {
    double m = norm(v);
    Vec u = v;
    if (m > 0.0) u *= 1.0 / m;
    return u;
}

/** z component of the cross product, n = 2 only. */
inline double cross2(const Vec& u, const Vec& v) { return u[0] * v[1] - u[1] * v[0]; }

/** Signed angle from u to v in (-pi, pi], n = 2 only. */
inline double signed_angle(const Vec& u, const Vec& v) {
    return std::atan2(cross2(u, v), dot(u, v));
}

} // namespace relnewt
