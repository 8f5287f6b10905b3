#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lorentz.hpp"
#include "rng.hpp"
#include "tolerance.hpp"

namespace hypflat {

// ---------------------------------------------------------------------------
// Extended complex plane (Riemann sphere) with a tagged point at infinity.
// ---------------------------------------------------------------------------

struct ExtComplex {
    complexd z{0};
    bool infinite = false;

    static ExtComplex inf() { return {complexd(0), true}; }
    static ExtComplex finite(complexd v) { return {v, false}; }
};

inline bool approx_equal(const ExtComplex& a, const ExtComplex& b, double tol = 1e-12) {
    if (a.infinite || b.infinite) return a.infinite && b.infinite;
    return std::abs(a.z - b.z) <= tol * std::max(1.0, std::abs(a.z));
}

// ---------------------------------------------------------------------------
// The chart U of LH^3: (mu1, mu2) = (-gamma_-, 1/conj(gamma_+)), valid away
// from the reflected diagonal 1 + mu1*conj(mu2) = 0.
// ---------------------------------------------------------------------------

struct GeodesicCoord {
    complexd mu1{0}, mu2{0};

    GeodesicCoord() = default;
    GeodesicCoord(complexd m1, complexd m2, bool validate = true) : mu1(m1), mu2(m2) {
        if (validate && chart_margin() <= tolerance().chart_eps)
            throw chart_error("GeodesicCoord: on the reflected diagonal (chart margin too small)");
    }

    double chart_margin() const { return std::abs(1.0 + mu1 * std::conj(mu2)); }
};

struct TangentLH {
    GeodesicCoord at;
    complexd dmu1{0}, dmu2{0};
};

struct MetricValue {
    complexd g{0};

    double gr() const { return g.real(); }
    double gi() const { return g.imag(); }
    double g_theta(double theta) const {
        return std::cos(theta) * g.real() + std::sin(theta) * g.imag();
    }
};

// (h_xi, v_eta) decomposition of a tangent at the base geodesic [gamma_0]
struct HomogeneousTangent {
    complexd xi{0}, eta{0};
};

// ---------------------------------------------------------------------------
// Geodesic reconstruction
// ---------------------------------------------------------------------------

namespace detail {

inline Mat2c geodesic_matrix(complexd mu1, complexd mu2, double t) {
    const double et = std::exp(t), emt = std::exp(-t);
    return {complexd(et + emt * std::norm(mu1), 0),
            et * mu2 - emt * mu1,
            et * std::conj(mu2) - emt * std::conj(mu1),
            complexd(et * std::norm(mu2) + emt, 0)};
}

inline Mat2c geodesic_matrix_dt(complexd mu1, complexd mu2, double t) {
    const double et = std::exp(t), emt = std::exp(-t);
    return {complexd(et - emt * std::norm(mu1), 0),
            et * mu2 + emt * mu1,
            et * std::conj(mu2) + emt * std::conj(mu1),
            complexd(et * std::norm(mu2) - emt, 0)};
}

}  // namespace detail

inline HPoint geodesic_point(const GeodesicCoord& c, double t) {
    const double q = c.chart_margin();
    if (q <= tolerance().chart_eps)
        throw chart_error("geodesic_point: chart margin violated");
    return HPoint(HermMat::from_matrix((1.0 / q) * detail::geodesic_matrix(c.mu1, c.mu2, t)), false);
}

inline UnitTangent geodesic_ray_of(const GeodesicCoord& c, double t = 0.0) {
    const double q = c.chart_margin();
    if (q <= tolerance().chart_eps)
        throw chart_error("geodesic_ray_of: chart margin violated");
    const HermMat p = HermMat::from_matrix((1.0 / q) * detail::geodesic_matrix(c.mu1, c.mu2, t));
    const HermMat v = HermMat::from_matrix((1.0 / q) * detail::geodesic_matrix_dt(c.mu1, c.mu2, t));
    return UnitTangent(HPoint(p, false), v, false);
}

inline std::pair<ExtComplex, ExtComplex> endpoints(const GeodesicCoord& c) {
    const ExtComplex gm = ExtComplex::finite(-c.mu1);
    if (std::abs(c.mu2) == 0.0) return {ExtComplex::inf(), gm};
    return {ExtComplex::finite(1.0 / std::conj(c.mu2)), gm};
}

inline GeodesicCoord coords_from_endpoints(const ExtComplex& gplus, const ExtComplex& gminus) {
    if (gminus.infinite)
        throw chart_error("coords_from_endpoints: gamma_- = infinity is outside the chart");
    if (!gplus.infinite && std::abs(gplus.z) == 0.0)
        throw chart_error("coords_from_endpoints: gamma_+ = 0 is outside the chart");
    if (gplus.infinite == gminus.infinite && !gplus.infinite &&
        std::abs(gplus.z - gminus.z) == 0.0)
        throw contract_error("coords_from_endpoints: degenerate geodesic (equal endpoints)");
    const complexd mu1 = -gminus.z;
    const complexd mu2 = gplus.infinite ? complexd(0) : 1.0 / std::conj(gplus.z);
    return GeodesicCoord(mu1, mu2);  // validates the chart margin
}

// Boundary point of a nonzero null future-pointing Hermitian matrix, read in
// the upper half-space model: w = M12/M22, with M22 = 0 meaning infinity.
inline ExtComplex null_boundary_point(const HermMat& M) {
    const Mat2c m = M.matrix();
    const double scale = std::abs(m.a.real()) + std::abs(m.d.real());
    if (std::abs(m.d.real()) <= 1e-13 * scale) return ExtComplex::inf();
    return ExtComplex::finite(m.b / m.d.real());
}

inline GeodesicCoord coords_of_ray(const UnitTangent& pv) {
    const ExtComplex gp = null_boundary_point(pv.p.m + pv.v);
    const ExtComplex gm = null_boundary_point(pv.p.m - pv.v);
    if (gm.infinite)
        throw chart_error("coords_of_ray: gamma_- = infinity, geodesic outside chart U");
    const double scale = std::max(1.0, std::abs(gm.z));
    if (!gp.infinite && std::abs(gp.z) <= 1e-12 * scale)
        throw chart_error("coords_of_ray: gamma_+ = 0, geodesic outside chart U");
    return coords_from_endpoints(gp, gm);
}

// ---------------------------------------------------------------------------
// Invariant metric G = 4 dmu1 dconj(mu2) / (1 + mu1 conj(mu2))^2, polarized so
// the diagonal reproduces the coordinate formula.
// ---------------------------------------------------------------------------

inline bool same_coord(const GeodesicCoord& a, const GeodesicCoord& b, double tol = 1e-10) {
    const double scale = std::max(1.0, std::max(std::abs(a.mu1), std::abs(a.mu2)));
    return std::abs(a.mu1 - b.mu1) <= tol * scale && std::abs(a.mu2 - b.mu2) <= tol * scale;
}

inline MetricValue eval_metric(const TangentLH& x, const TangentLH& y) {
    if (!same_coord(x.at, y.at))
        throw contract_error("eval_metric: tangents at different base points");
    const complexd q = 1.0 + x.at.mu1 * std::conj(x.at.mu2);
    const complexd g =
        2.0 * (x.dmu1 * std::conj(y.dmu2) + y.dmu1 * std::conj(x.dmu2)) / (q * q);
    return {g};
}

inline MetricValue eval_metric(const TangentLH& x) { return eval_metric(x, x); }

inline TangentLH apply_J(const TangentLH& x) {
    return {x.at, complexd(0, 1) * x.dmu1, complexd(0, 1) * x.dmu2};
}

inline TangentLH apply_P(const TangentLH& x) { return {x.at, -x.dmu1, x.dmu2}; }

// Kaehler and para-Kaehler forms omega_J = G^i(., J.), omega_P = G^r(., P.).
// Antisymmetric, and omega_J + omega_P = 0 identically.
inline std::pair<double, double> form_values(const TangentLH& x, const TangentLH& y) {
    const double omega_j = eval_metric(x, apply_J(y)).gi();
    const double omega_p = eval_metric(x, apply_P(y)).gr();
    return {omega_j, omega_p};
}

// ---------------------------------------------------------------------------
// Moebius action on LH^3 (fractional-linear in both chart coordinates)
// ---------------------------------------------------------------------------

inline GeodesicCoord moebius_on_LH(const MoebiusMap& a, const GeodesicCoord& c) {
    const complexd den1 = a.a21 * c.mu1 - a.a22;
    const complexd den2 = std::conj(a.a12) * c.mu2 + std::conj(a.a11);
    if (std::abs(den1) < 1e-300 || std::abs(den2) < 1e-300)
        throw chart_error("moebius_on_LH: image leaves chart U");
    const complexd m1 = (-a.a11 * c.mu1 + a.a12) / den1;
    const complexd m2 = (std::conj(a.a22) * c.mu2 + std::conj(a.a21)) / den2;
    return GeodesicCoord(m1, m2);  // validates chart margin of the image
}

inline TangentLH moebius_pushforward(const MoebiusMap& a, const TangentLH& x) {
    const GeodesicCoord img = moebius_on_LH(a, x.at);
    const complexd den1 = a.a21 * x.at.mu1 - a.a22;
    const complexd den2 = std::conj(a.a12) * x.at.mu2 + std::conj(a.a11);
    return {img, x.dmu1 / (den1 * den1), x.dmu2 / (den2 * den2)};
}

// mu-coordinates of [a gamma_0 a*], gamma_0 the geodesic through sigma_0 with
// velocity sigma_3 (endpoints infinity and 0).
inline GeodesicCoord coords_of_group(const MoebiusMap& a) {
    if (std::abs(a.a22) < 1e-300 || std::abs(a.a11) < 1e-300)
        throw chart_error("coords_of_group: image geodesic outside chart U");
    return GeodesicCoord(-a.a12 / a.a22, std::conj(a.a21 / a.a11));
}

// ---------------------------------------------------------------------------
// Homogeneous-space picture at [gamma_0]
// ---------------------------------------------------------------------------

inline TangentLH homogeneous_to_coords(const HomogeneousTangent& x) {
    return {GeodesicCoord(0, 0, false), -x.xi + x.eta, x.xi + x.eta};
}

// B(X,Y) = 2 trace(XY) on sl(2,C) elements X = h_xi + v_eta, Y = h_beta + v_delta
inline complexd killing_form(const HomogeneousTangent& X, const HomogeneousTangent& Y) {
    return 2.0 * ((X.xi - X.eta) * std::conj(Y.xi + Y.eta) +
                  (Y.xi - Y.eta) * std::conj(X.xi + X.eta));
}

// psi: R^4 -> SL(2,C), a local section around [gamma_0]
inline Mat2c psi_section(double u1, double u2, double v1, double v2) {
    const complexd a(u1, -v2), b(u2, v1);
    return {complexd(1, 0), complexd(u1 - v1, u2 - v2),
            complexd(u1 + v1, -u2 - v2), complexd(1, 0) + a * a + b * b};
}

// mu-coordinates of pi_1(psi(u)) in closed form
inline std::pair<complexd, complexd> psi_mu(double u1, double u2, double v1, double v2) {
    const complexd a(u1, -v2), b(u2, v1);
    const complexd den = complexd(1, 0) + a * a + b * b;
    const complexd m1 = -(complexd(u1, u2) - complexd(v1, v2)) / den;
    const complexd m2 = complexd(u1, u2) + complexd(v1, v2);
    return {m1, m2};
}

// ---------------------------------------------------------------------------
// Structural verification reports
// ---------------------------------------------------------------------------

struct BGReport {
    double max_metric_deviation = 0;  // |G(x^,y^) + B(X,Y)| over directions
    double max_coord_fd_deviation = 0;  // analytic vs finite-difference psi pushforward
    bool passed = false;
};

// Checks G = -B_L: the Killing form against the metric of the pushed-forward
// homogeneous tangents, plus a finite-difference cross-check of the closed
// coordinate formulas along psi.
inline BGReport verify_BG(std::uint64_t seed = 1, int n_random = 64) {
    BGReport rep;
    Xoshiro256 rng(seed);

    std::vector<HomogeneousTangent> dirs = {
        {1, 0}, {0, 1}, {complexd(0, 1), 0}, {0, complexd(0, 1)}, {1, 1}, {1, complexd(0, 1)}};
    for (int k = 0; k < n_random; ++k)
        dirs.push_back({rng.cnormal(), rng.cnormal()});

    for (const auto& X : dirs) {
        for (const auto& Y : dirs) {
            const complexd lhs = eval_metric(homogeneous_to_coords(X), homogeneous_to_coords(Y)).g;
            const complexd rhs = -killing_form(X, Y);
            rep.max_metric_deviation = std::max(rep.max_metric_deviation, std::abs(lhs - rhs));
        }
    }

    // d/dh of the closed-form mu's along psi at the origin, 4th-order central
    const double h = 1e-4;
    auto fd_push = [&](const HomogeneousTangent& X) {
        const double dir[4] = {X.xi.real(), X.xi.imag(), X.eta.real(), X.eta.imag()};
        auto mu_at = [&](double w) {
            return psi_mu(w * dir[0], w * dir[1], w * dir[2], w * dir[3]);
        };
        const auto fp1 = mu_at(h), fm1 = mu_at(-h), fp2 = mu_at(2 * h), fm2 = mu_at(-2 * h);
        const complexd d1 = (fm2.first - 8.0 * fm1.first + 8.0 * fp1.first - fp2.first) / (12 * h);
        const complexd d2 = (fm2.second - 8.0 * fm1.second + 8.0 * fp1.second - fp2.second) / (12 * h);
        return std::make_pair(d1, d2);
    };
    for (const auto& X : dirs) {
        const auto fd = fd_push(X);
        const TangentLH an = homogeneous_to_coords(X);
        rep.max_coord_fd_deviation = std::max(
            {rep.max_coord_fd_deviation, std::abs(fd.first - an.dmu1), std::abs(fd.second - an.dmu2)});
    }

    rep.passed = rep.max_metric_deviation < 1e-6 && rep.max_coord_fd_deviation < 1e-6;
    return rep;
}

struct SymplecticReport {
    double max_jp_antisym = 0;     // |omega_J + omega_P| over random pairs
    double max_dtheta_deviation = 0;  // |dTheta - omega_P| over homogeneous pairs
    bool passed = false;
};

namespace detail {

// Theta_{(p,v)}(X,V) = <X, v> evaluated on the coordinate fields of the
// 2-parameter family psi(u*x1 + v*x2) pushed to UH^3.
inline double dtheta_fd(const HomogeneousTangent& X, const HomogeneousTangent& Y, double h = 1e-4) {
    const double dx[4] = {X.xi.real(), X.xi.imag(), X.eta.real(), X.eta.imag()};
    const double dy[4] = {Y.xi.real(), Y.xi.imag(), Y.eta.real(), Y.eta.imag()};

    auto family = [&](double u, double v, HermMat& p, HermMat& vf) {
        const Mat2c a = psi_section(u * dx[0] + v * dy[0], u * dx[1] + v * dy[1],
                                    u * dx[2] + v * dy[2], u * dx[3] + v * dy[3]);
        const Mat2c ast = a.conj_transpose();
        p = HermMat::from_matrix(a * ast);
        vf = HermMat::from_matrix(a * HermMat::sigma3().matrix() * ast);
    };

    // Theta(coordinate field along v) as a function of (u,v)
    auto theta_of_second = [&](double u, double v) {
        HermMat pp, pm, vf, dummy;
        family(u, v + h, pp, dummy);
        family(u, v - h, pm, dummy);
        family(u, v, dummy, vf);
        const HermMat dp = (pp - pm) * (1.0 / (2 * h));
        return minkowski_inner(dp, vf);
    };
    auto theta_of_first = [&](double u, double v) {
        HermMat pp, pm, vf, dummy;
        family(u + h, v, pp, dummy);
        family(u - h, v, pm, dummy);
        family(u, v, dummy, vf);
        const HermMat dp = (pp - pm) * (1.0 / (2 * h));
        return minkowski_inner(dp, vf);
    };

    const double du = (theta_of_second(h, 0) - theta_of_second(-h, 0)) / (2 * h);
    const double dv = (theta_of_first(0, h) - theta_of_first(0, -h)) / (2 * h);
    return du - dv;
}

}  // namespace detail

// (a) omega_J = -omega_P pointwise at random chart points;
// (b) the canonical form: finite-difference dTheta on psi coordinate families
//     against the forms of the projected tangents. With the contact form and
//     the coordinate-field exterior derivative spelled out this way, dTheta
//     lands on omega_P = -omega_J.
inline SymplecticReport verify_symplectic(std::uint64_t seed = 1, int n_random = 1000,
                                          int n_dtheta = 32, double h = 1e-4) {
    SymplecticReport rep;
    Xoshiro256 rng(seed);

    for (int k = 0; k < n_random; ++k) {
        GeodesicCoord c(0, 0, false);
        for (;;) {
            const complexd m1 = 0.8 * rng.cnormal(), m2 = 0.8 * rng.cnormal();
            if (std::abs(1.0 + m1 * std::conj(m2)) > 1e-2) {
                c = GeodesicCoord(m1, m2, false);
                break;
            }
        }
        const TangentLH x{c, rng.cnormal(), rng.cnormal()};
        const TangentLH y{c, rng.cnormal(), rng.cnormal()};
        const auto [oj, op] = form_values(x, y);
        rep.max_jp_antisym = std::max(rep.max_jp_antisym, std::abs(oj + op));
    }

    std::vector<std::pair<HomogeneousTangent, HomogeneousTangent>> pairs = {
        {{1, 0}, {0, 1}},  // (h_1, v_1)
        {{0, 1}, {1, 0}},
        {{1, 0}, {1, 0}},
    };
    for (int k = 0; k < n_dtheta; ++k)
        pairs.push_back({{rng.cnormal(), rng.cnormal()}, {rng.cnormal(), rng.cnormal()}});

    for (const auto& [X, Y] : pairs) {
        const double dt = detail::dtheta_fd(X, Y, h);
        const auto [oj, op] =
            form_values(homogeneous_to_coords(X), homogeneous_to_coords(Y));
        (void)oj;
        rep.max_dtheta_deviation = std::max(rep.max_dtheta_deviation, std::abs(dt - op));
    }

    rep.passed = rep.max_dtheta_deviation < 1e-5;
    return rep;
}

// Max relative deviation of the complex metric value under random Moebius
// pushforwards (invariance of G under the holomorphic action).
inline double verify_metric_invariance(std::uint64_t seed = 2, int n = 100) {
    Xoshiro256 rng(seed);
    double worst = 0;
    int done = 0;
    while (done < n) {
        Mat2c m{rng.cnormal(), rng.cnormal(), rng.cnormal(), rng.cnormal()};
        const complexd dt = m.det();
        if (std::abs(dt) < 1e-3) continue;
        const complexd s = std::sqrt(dt);
        const MoebiusMap a(m.a / s, m.b / s, m.c / s, m.d / s, false);

        const complexd m1 = 0.6 * rng.cnormal(), m2 = 0.6 * rng.cnormal();
        if (std::abs(1.0 + m1 * std::conj(m2)) < 0.1) continue;
        GeodesicCoord c(m1, m2, false);
        const TangentLH x{c, rng.cnormal(), rng.cnormal()};
        const TangentLH y{c, rng.cnormal(), rng.cnormal()};

        try {
            const TangentLH xi = moebius_pushforward(a, x);
            const TangentLH yi = moebius_pushforward(a, y);
            const complexd before = eval_metric(x, y).g;
            const complexd after = eval_metric(xi, yi).g;
            worst = std::max(worst, std::abs(after - before) / std::max(1.0, std::abs(before)));
        } catch (const chart_error&) {
            continue;  // image too close to the reflected diagonal; resample
        }
        ++done;
    }
    return worst;
}

// Standard embedding F(mu) = (mu, mu): the pulled-back G^r against the round
// metric 4|dmu|^2/(1+|mu|^2)^2 of curvature 1.
inline double verify_standard_embedding(std::uint64_t seed = 3, int n = 100) {
    Xoshiro256 rng(seed);
    double worst = 0;
    for (int k = 0; k < n; ++k) {
        const complexd mu = rng.cnormal();
        const complexd dmu = rng.cnormal();
        const GeodesicCoord c(mu, mu, false);
        const TangentLH x{c, dmu, dmu};
        const MetricValue mv = eval_metric(x);
        const double expected = 4.0 * std::norm(dmu) / ((1.0 + std::norm(mu)) * (1.0 + std::norm(mu)));
        worst = std::max(worst,
                         std::abs(mv.gr() - expected) / std::max(1.0, std::abs(expected)));
        worst = std::max(worst, std::abs(mv.gi()) / std::max(1.0, std::abs(expected)));
    }
    return worst;
}

}  // namespace hypflat
