#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geodesic_space.hpp"
#include "lorentz.hpp"
#include "tolerance.hpp"

namespace hypflat {

// ---------------------------------------------------------------------------
// Curves s -> (mu1(s), mu2(s)) in the chart U of LH^3
// ---------------------------------------------------------------------------

struct LCurve {
    double s_min = 0.0, s_max = 1.0;
    int grid_n = 512;
    std::function<GeodesicCoord(double)> eval;
    // optional analytic derivative; when absent, finite differences are used
    // and flagged in reports
    std::function<std::pair<complexd, complexd>(double)> deriv;
    bool analytic = false;
    std::vector<double> stiff_points;  // joints of piecewise definitions
    std::string name = "curve";
};

inline TangentLH curve_derivative(const LCurve& c, double s) {
    if (s < c.s_min - 1e-12 || s > c.s_max + 1e-12)
        throw contract_error("curve_derivative: s outside domain");
    if (c.deriv) {
        const auto [d1, d2] = c.deriv(s);
        return {c.eval(s), d1, d2};
    }
    // 4th-order stencils: central inside, one-sided at the domain ends
    const double h = 1e-4 * std::max(1.0, (c.s_max - c.s_min) / 6.0);
    auto mu = [&](double u) {
        const GeodesicCoord g = c.eval(u);
        return std::make_pair(g.mu1, g.mu2);
    };
    complexd d1, d2;
    auto combine = [&](const double* w, const double* off, double step) {
        complexd a{0}, b{0};
        for (int k = 0; k < 5; ++k) {
            const auto v = mu(s + off[k] * step);
            a += w[k] * v.first;
            b += w[k] * v.second;
        }
        d1 = a / (12.0 * step);
        d2 = b / (12.0 * step);
    };
    static const double wc[5] = {1, -8, 0, 8, -1};
    static const double oc[5] = {-2, -1, 0, 1, 2};
    static const double wf[5] = {-25, 48, -36, 16, -3};
    static const double of[5] = {0, 1, 2, 3, 4};
    if (s - 2 * h < c.s_min) {
        combine(wf, of, h);
    } else if (s + 2 * h > c.s_max) {
        combine(wf, of, -h);
    } else {
        combine(wc, oc, h);
    }
    return {c.eval(s), d1, d2};
}

// ---------------------------------------------------------------------------
// Classification: null with respect to G^i, causal with respect to G^r
// ---------------------------------------------------------------------------

enum class CurveVerdict { developable, ideal_cone, non_developable, irregular };

inline const char* to_string(CurveVerdict v) {
    switch (v) {
        case CurveVerdict::developable: return "developable";
        case CurveVerdict::ideal_cone: return "ideal-cone";
        case CurveVerdict::non_developable: return "non-developable";
        case CurveVerdict::irregular: return "irregular";
    }
    return "?";
}

struct CausalReport {
    std::vector<double> s;
    std::vector<complexd> g;        // G(alpha', alpha') per sample
    std::vector<complexd> dmu1, dmu2;
    bool null_gi = false;
    bool null_gr = false;
    bool causal_gr = false;
    bool regular = false;
    CurveVerdict verdict = CurveVerdict::irregular;
    std::optional<ExtComplex> vertex;
    std::optional<double> irregular_at;
    bool fd_derivative = false;
    double tol_used = 0;
    double gr_min = 0, gr_max = 0, gi_max_abs = 0;
};

inline CausalReport classify_curve(const LCurve& c, double tol = -1.0) {
    CausalReport rep;
    rep.fd_derivative = !c.analytic;
    rep.tol_used = tol > 0 ? tol : (c.analytic ? tolerance().null_analytic : tolerance().null_fd);

    const int n = std::max(2, c.grid_n);
    rep.s.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = c.s_min + (c.s_max - c.s_min) * i / double(n - 1);
        rep.s.push_back(s);
        TangentLH x;
        try {
            x = curve_derivative(c, s);
        } catch (const chart_error& e) {
            throw chart_error(std::string(e.what()) + " at s = " + std::to_string(s));
        }
        rep.dmu1.push_back(x.dmu1);
        rep.dmu2.push_back(x.dmu2);
        rep.g.push_back(eval_metric(x).g);
    }

    double gmax = 0, dmax = 0, d1max = 0, d2max = 0, d1min = 1e300, d2min = 1e300;
    for (int i = 0; i < n; ++i) {
        gmax = std::max(gmax, std::abs(rep.g[i]));
        const double a1 = std::abs(rep.dmu1[i]), a2 = std::abs(rep.dmu2[i]);
        dmax = std::max(dmax, a1 + a2);
        d1max = std::max(d1max, a1);
        d2max = std::max(d2max, a2);
        d1min = std::min(d1min, a1);
        d2min = std::min(d2min, a2);
        if (a1 + a2 <= tolerance().reg_tol && !rep.irregular_at)
            rep.irregular_at = rep.s[i];
    }
    (void)d1min;
    (void)d2min;

    const double scale = std::max(1.0, gmax);
    rep.null_gi = true;
    rep.null_gr = true;
    rep.causal_gr = true;
    rep.gr_min = rep.g[0].real();
    rep.gr_max = rep.g[0].real();
    for (const complexd& g : rep.g) {
        rep.gi_max_abs = std::max(rep.gi_max_abs, std::abs(g.imag()));
        rep.gr_min = std::min(rep.gr_min, g.real());
        rep.gr_max = std::max(rep.gr_max, g.real());
        if (std::abs(g.imag()) > rep.tol_used * scale) rep.null_gi = false;
        if (std::abs(g.real()) > rep.tol_used * scale) rep.null_gr = false;
        if (g.real() > rep.tol_used * scale) rep.causal_gr = false;
    }
    rep.regular = !rep.irregular_at.has_value();

    if (!rep.regular) {
        rep.verdict = CurveVerdict::irregular;
        return rep;
    }

    // ideal cone requires one coordinate constant over the whole grid
    const double dscale = std::max(1e-12, dmax);
    const bool mu1_const = d1max <= 1e-10 * dscale;
    const bool mu2_const = d2max <= 1e-10 * dscale;
    if (rep.null_gi && rep.null_gr && (mu1_const || mu2_const)) {
        rep.verdict = CurveVerdict::ideal_cone;
        const GeodesicCoord mid = c.eval(0.5 * (c.s_min + c.s_max));
        if (mu2_const) {
            rep.vertex = (std::abs(mid.mu2) == 0.0) ? ExtComplex::inf()
                                                    : ExtComplex::finite(1.0 / std::conj(mid.mu2));
        } else {
            rep.vertex = ExtComplex::finite(-mid.mu1);
        }
    } else if (rep.null_gi && rep.causal_gr) {
        rep.verdict = CurveVerdict::developable;
    } else {
        rep.verdict = CurveVerdict::non_developable;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Builtin families
// ---------------------------------------------------------------------------

enum class Family { nomizu1, nomizu2, nomizu3, nra };

struct ExampleParams {
    Family family = Family::nomizu2;
    double radius = 0.5;   // nomizu1 (default 1/3), nomizu2 (default 1/2)
    double omega = 1.0;    // angular speed of the circle parametrizations
    double kappa = 1.0;    // nomizu3
    double tau = 1.0;      // nomizu3
};

// Data of the helix whose rectifying developable nomizu3 builds. The helix
// is the orbit of the screw motion diag(e^{ws/2}, e^{-ws/2}) through the
// point at distance r from the axis, and sits on the surface section
// t = slide_a * s + t0 of the generated grid.
struct Nomizu3Info {
    complexd w{0};       // boundary multiplier exponent, w = (A+ + i A-)/sqrt(2)
    complexd C1{0}, C2{0};  // mu-coordinates of the ruling through the helix at s=0
    double slide_a = 0;  // translation rate along the axis per unit arc length
    double rot_b = 0;    // rotation rate
    double radius_r = 0; // distance of the helix from the axis
    double t0 = 0;       // ruling parameter at which the helix crosses s=0
    HermMat helix_p0;    // helix point at s = 0
};

namespace detail {

inline HermMat tangential_proj(const HermMat& W, const HermMat& p) {
    return W + minkowski_inner(W, p) * p;
}

}  // namespace detail

inline Nomizu3Info nomizu3_info(double kappa, double tau) {
    if (!(kappa > 0.0) || tau == 0.0)
        throw contract_error("nomizu3: requires kappa > 0 and tau != 0");
    const double ap = std::sqrt((kappa + 1) * (kappa + 1) + tau * tau);
    const double am = std::sqrt((kappa - 1) * (kappa - 1) + tau * tau);
    const double Ap2 = (1 - kappa * kappa - tau * tau) + ap * am;
    const double Am2 = -(1 - kappa * kappa - tau * tau) + ap * am;
    if (Ap2 < 0 || Am2 < 0)
        throw contract_error("nomizu3: A+/- imaginary for these (kappa, tau)");
    const double a = std::sqrt(Ap2 / 2.0);
    const double b = (tau > 0 ? 1.0 : -1.0) * std::sqrt(Am2 / 2.0);

    const double sh2 = (1 + kappa * kappa + tau * tau - ap * am) / (2 * ap * am);
    const double r = std::asinh(std::sqrt(std::max(0.0, sh2)));
    const double C = std::cosh(r), S = std::sinh(r);

    const HPoint p0(HermMat{C, S, 0, 0}, false);
    const HermMat e0{0, 0, -b * S, a * C};  // unit velocity of the orbit at s=0

    // derivative map of the screw motion on sigma components
    auto motion = [&](const HermMat& X) {
        return HermMat{a * X.x3, b * X.x2, -b * X.x1, a * X.x0};
    };

    const HermMat De = detail::tangential_proj(motion(e0), p0.m);
    const double kap = std::sqrt(minkowski_norm2(De));
    const HermMat n0 = De * (1.0 / kap);
    const HermMat b0 = cross(p0, e0, n0);

    // ruling along the rectifying (Darboux) direction; the sign of the
    // binormal component is fixed by requiring a null G value
    const double nrm = std::sqrt(kappa * kappa + tau * tau);
    Nomizu3Info info;
    info.slide_a = a;
    info.rot_b = b;
    info.radius_r = r;
    info.w = complexd(a, b);
    info.helix_p0 = p0.m;

    GeodesicCoord best(0, 0, false);
    double best_gi = 1e300;
    for (const double sign : {1.0, -1.0}) {
        const HermMat d0 = (std::abs(tau) * e0 + sign * kappa * b0) * (1.0 / nrm);
        const GeodesicCoord c0 = coords_of_ray(UnitTangent(p0, d0, false));
        const complexd q = 1.0 + c0.mu1 * std::conj(c0.mu2);
        const complexd G = -4.0 * info.w * info.w * c0.mu1 * std::conj(c0.mu2) / (q * q);
        if (std::abs(G.imag()) < best_gi && G.real() <= 1e-9) {
            best_gi = std::abs(G.imag());
            best = c0;
        }
    }
    if (best_gi > 1e-9)
        throw contract_error("nomizu3: no null rectifying direction found (unexpected)");
    info.C1 = best.mu1;
    info.C2 = best.mu2;

    // ruling parameter of the helix point on the s=0 ruling
    const UnitTangent ray0 = geodesic_ray_of(best, 0.0);
    const double ac = -minkowski_inner(ray0.p.m, p0.m);
    const double bc = -minkowski_inner(ray0.v, p0.m);
    info.t0 = -std::log(ac + bc);
    return info;
}

namespace detail {

// logistic glue 1/(1+e^X) with its derivative factor, overflow-safe
inline std::pair<double, double> sigmoid(double X) {
    if (X > 40.0) {
        const double e = std::exp(-X);
        return {e, -e};  // value, d/dX
    }
    const double e = std::exp(X);
    const double f = 1.0 / (1.0 + e);
    return {f, -e * f * f};
}

struct PiecewiseValue {
    double v = 0, dv = 0;
};

inline PiecewiseValue nra_x1(double s) {
    const double c = std::sqrt(2.0) - 1.0;
    if (s <= -1.0) return {0.0, 0.0};
    if (s < 0.0) {
        const double X = 1.0 / s + 1.0 / (s + 1.0);
        if (X > 345.0) return {0.0, 0.0};
        const double dX = -1.0 / (s * s) - 1.0 / ((s + 1.0) * (s + 1.0));
        const auto [f, dfdX] = sigmoid(X);
        return {c * (s + 1.0) * f, c * (f + (s + 1.0) * dfdX * dX)};
    }
    return {c * (s + 1.0), c};
}

inline PiecewiseValue nra_y1(double s) {
    const double q = std::sqrt(2.0);
    if (s <= q) return {0.0, 0.0};
    const double X = (q + 1.0) / (q - s);  // negative here
    if (X < -700.0) return {0.0, 0.0};
    const double e = 2.0 * std::exp(X);
    const double dX = (q + 1.0) / ((q - s) * (q - s));
    return {e, e * dX};
}

inline PiecewiseValue nra_x2(double s) {
    const PiecewiseValue m = nra_x1(-s);
    return {m.v, -m.dv};
}

inline PiecewiseValue nra_y2(double s) {
    const PiecewiseValue m = nra_y1(-s);
    return {m.v, -m.dv};
}

}  // namespace detail

inline LCurve builtin_curve(const ExampleParams& p) {
    LCurve c;
    switch (p.family) {
        case Family::nomizu1: {
            if (!(p.radius > 0.0) || !(p.radius < 1.0))
                throw contract_error("nomizu1: zeta must map into the unit disc (0 < radius < 1)");
            const double R = p.radius, om = p.omega;
            c.name = "nomizu1";
            c.s_min = -3.14159265358979323846;
            c.s_max = 3.14159265358979323846;
            c.eval = [R, om](double s) {
                const complexd z = R * std::exp(complexd(0, om * s));
                return GeodesicCoord(-z, z);
            };
            c.deriv = [R, om](double s) {
                const complexd dz = complexd(0, om) * R * std::exp(complexd(0, om * s));
                return std::make_pair(-dz, dz);
            };
            c.analytic = true;
            break;
        }
        case Family::nomizu2: {
            if (!(p.radius > 0.0))
                throw contract_error("nomizu2: radius must be positive");
            const double R = p.radius, om = p.omega;
            c.name = "nomizu2";
            c.s_min = -3.14159265358979323846;
            c.s_max = 3.14159265358979323846;
            c.eval = [R, om](double s) {
                return GeodesicCoord(R * std::exp(complexd(0, om * s)), 0.0);
            };
            c.deriv = [R, om](double s) {
                const complexd dz = complexd(0, om) * R * std::exp(complexd(0, om * s));
                return std::make_pair(dz, complexd(0));
            };
            c.analytic = true;
            break;
        }
        case Family::nomizu3: {
            const Nomizu3Info info = nomizu3_info(p.kappa, p.tau);
            const complexd w = info.w, C1 = info.C1, C2 = info.C2;
            c.name = "nomizu3";
            c.s_min = -2 * 3.14159265358979323846;
            c.s_max = 2 * 3.14159265358979323846;
            c.eval = [w, C1, C2](double s) {
                return GeodesicCoord(C1 * std::exp(w * s), C2 * std::exp(-std::conj(w) * s));
            };
            c.deriv = [w, C1, C2](double s) {
                return std::make_pair(w * C1 * std::exp(w * s),
                                      -std::conj(w) * C2 * std::exp(-std::conj(w) * s));
            };
            c.analytic = true;
            break;
        }
        case Family::nra: {
            const double q = std::sqrt(2.0);
            c.name = "nra";
            c.s_min = -2.5;
            c.s_max = 2.5;
            c.stiff_points = {-q, -1.0, 0.0, 1.0, q};
            c.eval = [](double s) {
                const auto x1 = detail::nra_x1(s), y1 = detail::nra_y1(s);
                const auto x2 = detail::nra_x2(s), y2 = detail::nra_y2(s);
                return GeodesicCoord(complexd(x1.v, y1.v), complexd(x2.v, y2.v));
            };
            c.deriv = [](double s) {
                const auto x1 = detail::nra_x1(s), y1 = detail::nra_y1(s);
                const auto x2 = detail::nra_x2(s), y2 = detail::nra_y2(s);
                return std::make_pair(complexd(x1.dv, y1.dv), complexd(x2.dv, y2.dv));
            };
            c.analytic = true;
            break;
        }
    }
    return c;
}

inline std::optional<ExtComplex> detect_ideal_cone(const LCurve& c) {
    const CausalReport rep = classify_curve(c);
    if (rep.verdict != CurveVerdict::ideal_cone) return std::nullopt;
    return rep.vertex;
}

}  // namespace hypflat
