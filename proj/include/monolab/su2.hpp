// Lie algebra su(2) as real 3-vectors in an orthonormal basis, plus the
// SU(2) group as unit quaternions.  The basis e_a = -i*sigma_a is fixed so
// that inner(e_a, e_b) = delta_ab under the form -1/2 tr(AB); with that
// normalization [e_a, e_b] = 2 eps_abc e_c, i.e. bracket = 2 * cross.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace monolab {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    void set(int i, double v) { (i == 0 ? x : (i == 1 ? y : z)) = v; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

inline Vec3 axis_vec(int i) {
    return {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0};
}

// ---------------------------------------------------------------------------
// su(2)

struct Su2 {
    Vec3 c;  // coefficients in the orthonormal basis e_1, e_2, e_3

    Su2() = default;
    explicit Su2(const Vec3& v) : c(v) {}
    Su2(double a, double b, double d) : c(a, b, d) {}

    Su2 operator+(const Su2& o) const { return Su2(c + o.c); }
    Su2 operator-(const Su2& o) const { return Su2(c - o.c); }
    Su2 operator-() const { return Su2(-c); }
    Su2 operator*(double s) const { return Su2(c * s); }
    Su2& operator+=(const Su2& o) { c += o.c; return *this; }
    Su2& operator-=(const Su2& o) { c -= o.c; return *this; }
};

inline Su2 operator*(double s, const Su2& u) { return u * s; }

// -1/2 tr(uv) in the pinned basis
inline double inner(const Su2& u, const Su2& v) { return dot(u.c, v.c); }
inline double norm2(const Su2& u) { return dot(u.c, u.c); }
inline double norm(const Su2& u) { return std::sqrt(norm2(u)); }

// [u, v]; the structure constant 2 comes with the orthonormal basis
inline Su2 bracket(const Su2& u, const Su2& v) { return Su2(2.0 * cross(u.c, v.c)); }

// Matrix view: u -> sum_a u_a e_a with e_a = -i sigma_a, for checks against
// exact 2x2 complex arithmetic.
using Mat2 = std::array<std::array<std::complex<double>, 2>, 2>;

inline Mat2 to_matrix(const Su2& u) {
    const std::complex<double> I(0, 1);
    Mat2 m;
    // -i s1 = [[0,-i],[-i,0]], -i s2 = [[0,-1],[1,0]], -i s3 = [[-i,0],[0,i]]
    m[0][0] = -I * u.c.z;
    m[0][1] = -I * u.c.x - u.c.y;
    m[1][0] = -I * u.c.x + u.c.y;
    m[1][1] = I * u.c.z;
    return m;
}

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline std::complex<double> mat_trace(const Mat2& a) { return a[0][0] + a[1][1]; }

// ---------------------------------------------------------------------------
// errors

enum class Err {
    ZeroHiggs,
    MaskedPoint,
    AtPole,
    OnString,
    SphereHitsPole,
    NonclosedDifference,
    FitIllConditioned,
    SmallHiggs,
    LayoutOverlap,
    PatchString,
    InsufficientSweep,
    ResidualTooLarge,
    CoincidentPoints,
    ConfigParse,
    GateFailure,
    IoError,
};

struct Error : std::runtime_error {
    Err kind;
    Error(Err k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// ---------------------------------------------------------------------------
// splitting along a Higgs direction (p0 + p1 decomposition)

struct AdSplit {
    Su2 phi_hat;

    explicit AdSplit(const Su2& phi, double floor = 1e-12) {
        const double n = norm(phi);
        if (n < floor) throw Error(Err::ZeroHiggs, "AdSplit: |phi| below floor");
        phi_hat = phi * (1.0 / n);
    }

    double parallel(const Su2& u) const { return inner(phi_hat, u); }
    Su2 perp(const Su2& u) const { return u - phi_hat * parallel(u); }
};

// split(u, phi) -> (u0, u1) with u = u0 phi_hat + u1, u1 perp to phi_hat
inline std::pair<double, Su2> split(const Su2& u, const Su2& phi, double floor = 1e-12) {
    AdSplit s(phi, floor);
    const double u0 = s.parallel(u);
    return {u0, u - s.phi_hat * u0};
}

// ---------------------------------------------------------------------------
// SU(2) as unit quaternions w + v.e  (e_a e_b = -delta_ab + eps_abc e_c)

struct SuGroup {
    double w = 1.0;
    Vec3 v;

    SuGroup() = default;
    SuGroup(double w_, const Vec3& v_) : w(w_), v(v_) {}

    static SuGroup identity() { return {}; }
};

inline SuGroup operator*(const SuGroup& p, const SuGroup& q) {
    return {p.w * q.w - dot(p.v, q.v), p.w * q.v + q.w * p.v + cross(p.v, q.v)};
}

inline SuGroup conjugate(const SuGroup& g) { return {g.w, -g.v}; }

inline double group_norm(const SuGroup& g) { return std::sqrt(g.w * g.w + norm2(g.v)); }

// exp(X) for X in su(2); |X| is the rotation half-angle
inline SuGroup su2_exp(const Su2& x) {
    const double t = norm(x);
    if (t < 1e-30) return {1.0, x.c};
    return {std::cos(t), x.c * (std::sin(t) / t)};
}

// Ad(g) u = g u g^{-1}; acts on coefficient vectors as rotation by 2|v|-angle
inline Su2 ad_action(const SuGroup& g, const Su2& u) {
    const Vec3& v = g.v;
    Vec3 r = u.c + 2.0 * g.w * cross(v, u.c) + 2.0 * cross(v, cross(v, u.c));
    return Su2(r);
}

// su(2) part of a quaternion (projection killing the scalar slot)
inline Su2 su2_part(const SuGroup& g) { return Su2(g.v); }

// (d exp)_X(Y) exp(-X): right logarithmic derivative of exp along X.
// With lambda = 2|X| this is Ypar + (sin l / l) Yperp + ((1-cos l)/l) n x Yperp,
// n = X/|X|, acting through the bracket ad_X = 2 X x (.).
inline Su2 dexp_right(const Su2& x, const Su2& y) {
    const double t = norm(x);
    if (t < 1e-12) {
        // exp(X) ~ 1 + X: derivative is Y + [X,Y]/2 to first order
        return y + Su2(cross(x.c, y.c));
    }
    const Vec3 n = x.c / t;
    const double lambda = 2.0 * t;
    const Vec3 ypar = n * dot(n, y.c);
    const Vec3 yperp = y.c - ypar;
    const double a = std::sin(lambda) / lambda;
    const double b = (1.0 - std::cos(lambda)) / lambda;
    return Su2(ypar + a * yperp + b * cross(n, yperp));
}

}  // namespace monolab
