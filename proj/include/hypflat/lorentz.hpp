#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "tolerance.hpp"

namespace hypflat {

using complexd = std::complex<double>;

struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};
struct chart_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// 2x2 complex matrices (row major [[a,b],[c,d]])
// ---------------------------------------------------------------------------

struct Mat2c {
    complexd a{0}, b{0}, c{0}, d{0};

    complexd det() const { return a * d - b * c; }
    complexd trace() const { return a + d; }
    Mat2c adjugate() const { return {d, -b, -c, a}; }  // cofactor matrix
    Mat2c conj_transpose() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }

    Mat2c operator+(const Mat2c& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2c operator-(const Mat2c& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2c operator*(const Mat2c& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2c operator*(complexd k) const { return {a * k, b * k, c * k, d * k}; }
};

inline Mat2c operator*(complexd k, const Mat2c& m) { return m * k; }

// ---------------------------------------------------------------------------
// Herm(2) = L^4: a Hermitian matrix stored by its sigma-basis components,
//   X = x0*sigma0 + x1*sigma1 + x2*sigma2 + x3*sigma3,
// so matrix view [[x0+x3, x1+i x2],[x1-i x2, x0-x3]].
// ---------------------------------------------------------------------------

struct HermMat {
    double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

    static HermMat sigma0() { return {1, 0, 0, 0}; }
    static HermMat sigma1() { return {0, 1, 0, 0}; }
    static HermMat sigma2() { return {0, 0, 1, 0}; }
    static HermMat sigma3() { return {0, 0, 0, 1}; }

    // matrix view equals x0*sigma0 + ... + x3*sigma3 with the Pauli matrices,
    // so the (1,2) entry is x1 - i x2
    Mat2c matrix() const {
        return {complexd(x0 + x3, 0), complexd(x1, -x2),
                complexd(x1, x2), complexd(x0 - x3, 0)};
    }

    // Inverse of matrix(); the anti-Hermitian residue of m (from roundoff in
    // upstream products) is discarded.
    static HermMat from_matrix(const Mat2c& m) {
        HermMat r;
        r.x0 = 0.5 * (m.a.real() + m.d.real());
        r.x3 = 0.5 * (m.a.real() - m.d.real());
        r.x1 = 0.5 * (m.b.real() + m.c.real());
        r.x2 = 0.5 * (m.c.imag() - m.b.imag());
        return r;
    }

    double det() const { return x0 * x0 - x1 * x1 - x2 * x2 - x3 * x3; }
    double trace() const { return 2.0 * x0; }

    HermMat operator+(const HermMat& o) const { return {x0 + o.x0, x1 + o.x1, x2 + o.x2, x3 + o.x3}; }
    HermMat operator-(const HermMat& o) const { return {x0 - o.x0, x1 - o.x1, x2 - o.x2, x3 - o.x3}; }
    HermMat operator-() const { return {-x0, -x1, -x2, -x3}; }
    HermMat operator*(double k) const { return {x0 * k, x1 * k, x2 * k, x3 * k}; }
};

inline HermMat operator*(double k, const HermMat& m) { return m * k; }

// <X,Y> = -(1/2) trace(X * cof(Y)) = -x0 y0 + x1 y1 + x2 y2 + x3 y3
inline double minkowski_inner(const HermMat& X, const HermMat& Y) {
    return -X.x0 * Y.x0 + X.x1 * Y.x1 + X.x2 * Y.x2 + X.x3 * Y.x3;
}

inline double minkowski_norm2(const HermMat& X) { return minkowski_inner(X, X); }

inline double max_abs_component(const HermMat& X) {
    return std::max(std::max(std::abs(X.x0), std::abs(X.x1)),
                    std::max(std::abs(X.x2), std::abs(X.x3)));
}

// ---------------------------------------------------------------------------
// Points and tangents of H^3 = { det = 1, trace > 0 }
// ---------------------------------------------------------------------------

struct HPoint {
    HermMat m;

    HPoint() : m(HermMat::sigma0()) {}
    explicit HPoint(const HermMat& mm, bool validate = true) : m(mm) {
        if (validate) {
            if (std::abs(m.det() - 1.0) > 1e-6)
                throw contract_error("HPoint: det != 1");
            if (m.trace() <= 0.0)
                throw contract_error("HPoint: trace <= 0");
        }
    }
};

struct HTangent {
    HPoint base;
    HermMat m;

    HTangent() : m(HermMat::sigma3()) {}
    HTangent(const HPoint& p, const HermMat& mm, bool validate = true) : base(p), m(mm) {
        if (validate) {
            const double scale = std::max(1.0, max_abs_component(mm));
            if (std::abs(minkowski_inner(p.m, mm)) > 1e-6 * scale)
                throw contract_error("HTangent: not tangent to base point");
        }
    }
};

struct UnitTangent {
    HPoint p;
    HermMat v;

    UnitTangent() : v(HermMat::sigma3()) {}
    UnitTangent(const HPoint& pp, const HermMat& vv, bool validate = true) : p(pp), v(vv) {
        if (validate) {
            if (std::abs(minkowski_inner(p.m, v)) > 1e-8)
                throw contract_error("UnitTangent: not tangent");
            if (std::abs(minkowski_norm2(v) - 1.0) > 1e-8)
                throw contract_error("UnitTangent: |v| != 1");
        }
    }
};

inline bool same_base(const HPoint& p, const HPoint& q, double tol = 1e-8) {
    const HermMat d = p.m - q.m;
    return max_abs_component(d) <= tol * std::max(1.0, max_abs_component(p.m));
}

// cross product at p:  X x Y = (i/2)(X p^{-1} Y - Y p^{-1} X).
// Note the resulting orientation: at sigma0, sigma1 x sigma2 = -sigma3.
inline HermMat cross(const HPoint& p, const HermMat& X, const HermMat& Y) {
    const Mat2c pinv = p.m.matrix().adjugate();  // det p = 1
    const Mat2c xm = X.matrix(), ym = Y.matrix();
    const Mat2c r = complexd(0, 0.5) * (xm * pinv * ym - ym * pinv * xm);
    return HermMat::from_matrix(r);
}

inline HTangent cross(const HTangent& X, const HTangent& Y) {
    if (!same_base(X.base, Y.base))
        throw contract_error("cross: tangents based at different points");
    return HTangent(X.base, cross(X.base, X.m, Y.m), false);
}

// ---------------------------------------------------------------------------
// SL(2,C) acting by p -> a p a*
// ---------------------------------------------------------------------------

struct MoebiusMap {
    complexd a11{1}, a12{0}, a21{0}, a22{1};

    MoebiusMap() = default;
    MoebiusMap(complexd m11, complexd m12, complexd m21, complexd m22, bool validate = true)
        : a11(m11), a12(m12), a21(m21), a22(m22) {
        if (validate && std::abs(det() - 1.0) > tolerance().map_det)
            throw contract_error("MoebiusMap: det != 1");
    }

    static MoebiusMap identity() { return {}; }

    complexd det() const { return a11 * a22 - a12 * a21; }
    Mat2c matrix() const { return {a11, a12, a21, a22}; }
    MoebiusMap inverse() const { return {a22, -a12, -a21, a11, false}; }
    MoebiusMap operator*(const MoebiusMap& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22, false};
    }

    // boundary action on the Riemann sphere
    complexd boundary(complexd z) const { return (a11 * z + a12) / (a21 * z + a22); }
};

inline HermMat act_herm(const MoebiusMap& a, const HermMat& X) {
    const Mat2c am = a.matrix();
    return HermMat::from_matrix(am * X.matrix() * am.conj_transpose());
}

inline HPoint act_isometry(const MoebiusMap& a, const HPoint& p) {
    return HPoint(act_herm(a, p.m), false);
}

inline HTangent act_isometry(const MoebiusMap& a, const HTangent& X) {
    return HTangent(act_isometry(a, X.base), act_herm(a, X.m), false);
}

inline UnitTangent act_isometry(const MoebiusMap& a, const UnitTangent& pv) {
    return UnitTangent(act_isometry(a, pv.p), act_herm(a, pv.v), false);
}

// ---------------------------------------------------------------------------
// Model conversions
// ---------------------------------------------------------------------------

struct UpperHalfPoint {
    complexd w{0};
    double r = 1.0;
};

struct BallPoint {
    double x = 0, y = 0, z = 0;
};

// Psi reads the matrix entries: w = p12/p22, r = 1/p22
inline UpperHalfPoint to_upper(const HPoint& p) {
    const double den = p.m.x0 - p.m.x3;
    if (std::abs(den) < 1e-300)
        throw singularity_error("to_upper: overflow, point at the ideal boundary");
    return {complexd(p.m.x1, -p.m.x2) / den, 1.0 / den};
}

inline HPoint from_upper(const UpperHalfPoint& u) {
    if (!(u.r > 0.0)) throw contract_error("from_upper: r <= 0");
    HermMat m;
    m.x1 = u.w.real() / u.r;
    m.x2 = -u.w.imag() / u.r;
    const double sum = u.r + std::norm(u.w) / u.r;  // x0 + x3
    m.x0 = 0.5 * (sum + 1.0 / u.r);
    m.x3 = 0.5 * (sum - 1.0 / u.r);
    return HPoint(m, false);
}

inline BallPoint to_ball(const HPoint& p) {
    const double den = 1.0 + p.m.x0;
    return {p.m.x1 / den, p.m.x2 / den, p.m.x3 / den};
}

inline HPoint from_ball(const BallPoint& b) {
    const double n2 = b.x * b.x + b.y * b.y + b.z * b.z;
    if (!(n2 < 1.0)) throw contract_error("from_ball: point outside the unit ball");
    const double den = 1.0 - n2;
    return HPoint(HermMat{(1.0 + n2) / den, 2 * b.x / den, 2 * b.y / den, 2 * b.z / den}, false);
}

// d(p,q) = arccosh(-<p,q>); a roundoff dip of -<p,q> slightly below 1 for
// nearby points is clamped, anything beyond the window is a contract breach.
inline double hyperbolic_distance(const HPoint& p, const HPoint& q) {
    double c = -minkowski_inner(p.m, q.m);
    if (c < 1.0) {
        if (c < 1.0 - tolerance().acosh_clamp)
            throw contract_error("hyperbolic_distance: -<p,q> < 1, inputs not in H^3");
        c = 1.0;
    }
    return std::acosh(c);
}

// gamma_{p,v}(t) = p cosh t + v sinh t
inline HPoint geodesic_ray(const UnitTangent& pv, double t) {
    return HPoint(pv.p.m * std::cosh(t) + pv.v * std::sinh(t), false);
}

inline UnitTangent geodesic_flow(const UnitTangent& pv, double t) {
    const HermMat p = pv.p.m * std::cosh(t) + pv.v * std::sinh(t);
    const HermMat v = pv.p.m * std::sinh(t) + pv.v * std::cosh(t);
    return UnitTangent(HPoint(p, false), v, false);
}

}  // namespace hypflat
