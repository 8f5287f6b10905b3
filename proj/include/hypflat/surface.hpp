#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "geodesic_space.hpp"
#include "lorentz.hpp"
#include "tolerance.hpp"

namespace hypflat {

// ---------------------------------------------------------------------------
// Pointwise surface evaluation from the representation formula
// ---------------------------------------------------------------------------

inline HermMat surface_point(const LCurve& c, double s, double t) {
    const GeodesicCoord g = c.eval(s);
    const double q = g.chart_margin();
    if (q <= tolerance().chart_eps) throw chart_error("surface_point: chart margin violated");
    return HermMat::from_matrix((1.0 / q) * detail::geodesic_matrix(g.mu1, g.mu2, t));
}

inline HermMat surface_ft(const LCurve& c, double s, double t) {
    const GeodesicCoord g = c.eval(s);
    const double q = g.chart_margin();
    return HermMat::from_matrix((1.0 / q) * detail::geodesic_matrix_dt(g.mu1, g.mu2, t));
}

// chain rule through (mu1, mu2, mu1', mu2')
inline HermMat surface_fs(const LCurve& c, double s, double t) {
    const TangentLH x = curve_derivative(c, s);
    const complexd m1 = x.at.mu1, m2 = x.at.mu2, d1 = x.dmu1, d2 = x.dmu2;
    const complexd q = 1.0 + m1 * std::conj(m2);
    const double Q = std::abs(q);
    const complexd dq = d1 * std::conj(m2) + m1 * std::conj(d2);
    const double dQ = (std::conj(q) * dq).real() / Q;
    const double et = std::exp(t), emt = std::exp(-t);
    const Mat2c M = detail::geodesic_matrix(m1, m2, t);
    const Mat2c Ms{complexd(emt * 2 * (std::conj(m1) * d1).real(), 0),
                   et * d2 - emt * d1,
                   et * std::conj(d2) - emt * std::conj(d1),
                   complexd(et * 2 * (std::conj(m2) * d2).real(), 0)};
    return HermMat::from_matrix((1.0 / Q) * Ms - (dQ / (Q * Q)) * M);
}

// Lambda = |f_s x f_t|^2 in closed form
inline double lambda_field(const LCurve& c, double s, double t) {
    const TangentLH x = curve_derivative(c, s);
    const complexd q = 1.0 + x.at.mu1 * std::conj(x.at.mu2);
    const complexd G = 4.0 * x.dmu1 * std::conj(x.dmu2) / (q * q);
    return (std::exp(2 * t) * std::norm(x.dmu2) + std::exp(-2 * t) * std::norm(x.dmu1)) /
               std::norm(q) -
           0.5 * G.real();
}

// closed-form unit normal (equals f_s x f_t / |f_s x f_t|)
inline HermMat unit_normal(const LCurve& c, double s, double t) {
    const TangentLH x = curve_derivative(c, s);
    const complexd m1 = x.at.mu1, m2 = x.at.mu2, d1 = x.dmu1, d2 = x.dmu2;
    const complexd q12 = 1.0 + m1 * std::conj(m2);
    const complexd q21 = 1.0 + m2 * std::conj(m1);
    const double et = std::exp(t), emt = std::exp(-t);
    const double L = lambda_field(c, s, t);
    if (!(L > tolerance().lambda_floor))
        throw singularity_error("unit_normal: Lambda <= 0 at (s,t)=(" + std::to_string(s) +
                                "," + std::to_string(t) + ")");
    const complexd a =
        complexd(0, 2) *
        std::imag(et * q12 * std::conj(m1) * d2 - emt * q21 * std::conj(m1) * d1);
    const complexd b =
        complexd(0, -2) *
        std::imag(et * q12 * std::conj(m2) * d2 - emt * q21 * std::conj(m2) * d1);
    const complexd z = -et * (q12 * d2 + q21 * m1 * m2 * std::conj(d2)) +
                       emt * (q21 * d1 + q12 * m1 * m2 * std::conj(d1));
    const complexd pref = complexd(0, 1) / (std::pow(std::abs(q12), 3) * std::sqrt(L));
    const Mat2c nu{pref * a, pref * z, -pref * std::conj(z), pref * b};
    return HermMat::from_matrix(nu);
}

// ---------------------------------------------------------------------------
// Sampled surface grid
// ---------------------------------------------------------------------------

struct SurfaceGrid {
    LCurve curve;
    CausalReport classification;
    std::vector<double> s, t;
    std::vector<HermMat> f, fs, ft, nu;
    std::vector<double> lambda;
    std::vector<bool> excluded;  // singular or near a stiff joint

    int ns() const { return static_cast<int>(s.size()); }
    int nt() const { return static_cast<int>(t.size()); }
    int idx(int i, int j) const { return i * nt() + j; }
};

inline SurfaceGrid generate_surface(const LCurve& c, double s_lo, double s_hi, double t_lo,
                                    double t_hi, int ns, int nt, bool force = false) {
    if (ns < 2 || nt < 2) throw contract_error("generate_surface: grid too small");
    SurfaceGrid g;
    g.curve = c;
    g.classification = classify_curve(c);
    const CurveVerdict v = g.classification.verdict;
    if (v == CurveVerdict::irregular)
        throw contract_error("generate_surface: curve is irregular");
    if (!force && v == CurveVerdict::non_developable)
        throw contract_error(
            "generate_surface: curve is not null-causal; pass force to build the ruled "
            "(non-developable) locus anyway");

    g.s.resize(ns);
    g.t.resize(nt);
    for (int i = 0; i < ns; ++i) g.s[i] = s_lo + (s_hi - s_lo) * i / double(ns - 1);
    for (int j = 0; j < nt; ++j) g.t[j] = t_lo + (t_hi - t_lo) * j / double(nt - 1);

    const int n = ns * nt;
    g.f.resize(n);
    g.fs.resize(n);
    g.ft.resize(n);
    g.nu.resize(n);
    g.lambda.resize(n);
    g.excluded.assign(n, false);

    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            const double si = g.s[i], tj = g.t[j];
            g.f[k] = surface_point(c, si, tj);
            g.fs[k] = surface_fs(c, si, tj);
            g.ft[k] = surface_ft(c, si, tj);
            g.lambda[k] = lambda_field(c, si, tj);
            if (g.lambda[k] > tolerance().lambda_floor) {
                g.nu[k] = unit_normal(c, si, tj);
            } else {
                if (!force)
                    throw singularity_error("generate_surface: Lambda <= 0 at (s,t)=(" +
                                            std::to_string(si) + "," + std::to_string(tj) + ")");
                g.excluded[k] = true;
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fundamental forms; the second form uses 4th-order finite differences of the
// closed-form normal (step 1e-4 in t, grid-spacing-based in s)
// ---------------------------------------------------------------------------

struct FundamentalForms {
    std::vector<double> g11, g12, g22, h11, h12, h22;
    std::vector<bool> excluded;
};

namespace detail {

// 4th-order first derivative of the closed-form normal with respect to s,
// stencil shifted one-sided near stiff joints of the curve
inline HermMat nu_ds(const LCurve& c, double s, double t, double hs) {
    static const double wc[5] = {1, -8, 0, 8, -1};
    static const double oc[5] = {-2, -1, 0, 1, 2};
    static const double wf[5] = {-25, 48, -36, 16, -3};
    static const double of[5] = {0, 1, 2, 3, 4};
    const double* w = wc;
    const double* o = oc;
    double step = hs;
    for (const double bp : c.stiff_points) {
        if (std::abs(s - bp) < 2.5 * hs) {
            w = wf;
            o = of;
            step = (s >= bp) ? hs : -hs;
            break;
        }
    }
    if (s - 2.5 * hs < c.s_min) { w = wf; o = of; step = hs; }
    if (s + 2.5 * hs > c.s_max) { w = wf; o = of; step = -hs; }
    HermMat acc{0, 0, 0, 0};
    for (int k = 0; k < 5; ++k) acc = acc + w[k] * unit_normal(c, s + o[k] * step, t);
    return acc * (1.0 / (12.0 * step));
}

inline HermMat nu_dt(const LCurve& c, double s, double t, double ht) {
    const HermMat m2 = unit_normal(c, s, t - 2 * ht);
    const HermMat m1 = unit_normal(c, s, t - ht);
    const HermMat p1 = unit_normal(c, s, t + ht);
    const HermMat p2 = unit_normal(c, s, t + 2 * ht);
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) * (1.0 / (12.0 * ht));
}

}  // namespace detail

inline FundamentalForms fundamental_forms(const SurfaceGrid& g) {
    FundamentalForms F;
    const int n = g.ns() * g.nt();
    F.g11.resize(n);
    F.g12.resize(n);
    F.g22.resize(n);
    F.h11.assign(n, 0.0);
    F.h12.assign(n, 0.0);
    F.h22.assign(n, 0.0);
    F.excluded = g.excluded;

    // grid-spacing bound keeps stencils local; the 1e-3 cap keeps the
    // truncation error of the normal derivatives near roundoff
    const double hs = std::min((g.s.back() - g.s.front()) / double(g.ns() - 1) / 4.0, 1e-3);
    const double ht = 1e-4;

    for (int i = 0; i < g.ns(); ++i) {
        // columns too close to a stiff joint are excluded from differentiation
        bool stiff = false;
        for (const double bp : g.curve.stiff_points)
            if (std::abs(g.s[i] - bp) < 10.0 * hs) stiff = true;
        for (int j = 0; j < g.nt(); ++j) {
            const int k = g.idx(i, j);
            F.g11[k] = minkowski_inner(g.fs[k], g.fs[k]);
            F.g12[k] = minkowski_inner(g.fs[k], g.ft[k]);
            F.g22[k] = minkowski_inner(g.ft[k], g.ft[k]);
            if (F.excluded[k]) continue;
            if (stiff) {
                F.excluded[k] = true;
                continue;
            }
            const HermMat ns_ = detail::nu_ds(g.curve, g.s[i], g.t[j], hs);
            const HermMat nt_ = detail::nu_dt(g.curve, g.s[i], g.t[j], ht);
            F.h11[k] = -minkowski_inner(ns_, g.fs[k]);
            F.h22[k] = -minkowski_inner(nt_, g.ft[k]);
            F.h12[k] = -0.5 * (minkowski_inner(ns_, g.ft[k]) + minkowski_inner(nt_, g.fs[k]));
        }
    }
    return F;
}

// ---------------------------------------------------------------------------
// Curvature fields
// ---------------------------------------------------------------------------

struct CurvatureField {
    std::vector<double> lambda, kext_closed, kext_numeric, mean, k_intrinsic;
    std::vector<bool> excluded;       // no curvature data
    std::vector<bool> intr_excluded;  // no intrinsic-K data (grid margins)
};

namespace detail {

// 4th-order grid derivative along one index of a scalar field
template <typename Get>
inline double grid_d1(const Get& val, int i, int n, double h) {
    if (i >= 2 && i + 2 < n)
        return (val(i - 2) - 8 * val(i - 1) + 8 * val(i + 1) - val(i + 2)) / (12 * h);
    if (i + 4 < n)
        return (-25 * val(i) + 48 * val(i + 1) - 36 * val(i + 2) + 16 * val(i + 3) -
                3 * val(i + 4)) /
               (12 * h);
    return (25 * val(i) - 48 * val(i - 1) + 36 * val(i - 2) - 16 * val(i - 3) +
            3 * val(i - 4)) /
           (12 * h);
}

template <typename Get>
inline double grid_d2(const Get& val, int i, int n, double h) {
    if (i >= 2 && i + 2 < n)
        return (-val(i - 2) + 16 * val(i - 1) - 30 * val(i) + 16 * val(i + 1) - val(i + 2)) /
               (12 * h * h);
    if (i + 5 < n)
        return (45 * val(i) - 154 * val(i + 1) + 214 * val(i + 2) - 156 * val(i + 3) +
                61 * val(i + 4) - 10 * val(i + 5)) /
               (12 * h * h);
    return (45 * val(i) - 154 * val(i - 1) + 214 * val(i - 2) - 156 * val(i - 3) +
            61 * val(i - 4) - 10 * val(i - 5)) /
           (12 * h * h);
}

}  // namespace detail

inline CurvatureField curvature_fields(const SurfaceGrid& g, const FundamentalForms& F) {
    CurvatureField C;
    const int ns = g.ns(), nt = g.nt(), n = ns * nt;
    C.lambda = g.lambda;
    C.kext_closed.assign(n, 0.0);
    C.kext_numeric.assign(n, 0.0);
    C.mean.assign(n, 0.0);
    C.k_intrinsic.assign(n, 0.0);
    C.excluded = F.excluded;
    C.intr_excluded.assign(n, true);

    for (int i = 0; i < ns; ++i) {
        const TangentLH x = curve_derivative(g.curve, g.s[i]);
        const double gi = eval_metric(x).gi();
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            const double L = g.lambda[k];
            if (L > tolerance().lambda_floor)
                C.kext_closed[k] = -gi / (2.0 * std::pow(L, 1.5));
            if (C.excluded[k]) continue;
            const double det_g = F.g11[k] * F.g22[k] - F.g12[k] * F.g12[k];
            if (std::abs(det_g) < 1e-14) {
                C.excluded[k] = true;
                continue;
            }
            C.kext_numeric[k] = (F.h11[k] * F.h22[k] - F.h12[k] * F.h12[k]) / det_g;
            C.mean[k] =
                (F.g22[k] * F.h11[k] - 2 * F.g12[k] * F.h12[k] + F.g11[k] * F.h22[k]) /
                (2 * det_g);
        }
    }

    // intrinsic K by the Brioschi formula with grid finite differences
    const double hs = (g.s.back() - g.s.front()) / double(ns - 1);
    const double ht = (g.t.back() - g.t.front()) / double(nt - 1);
    auto field = [&](const std::vector<double>& a, int i, int j) { return a[g.idx(i, j)]; };
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            if (C.excluded[k]) continue;
            bool ok = i >= 2 && i + 2 < ns && j >= 2 && j + 2 < nt;
            if (ok)
                for (int di = -2; di <= 2 && ok; ++di)
                    for (int dj = -2; dj <= 2 && ok; ++dj)
                        if (C.excluded[g.idx(i + di, j + dj)]) ok = false;
            if (!ok) continue;

            auto in_s = [&](const std::vector<double>& a, int jj) {
                return detail::grid_d1([&](int ii) { return field(a, ii, jj); }, i, ns, hs);
            };
            auto in_t = [&](const std::vector<double>& a, int ii) {
                return detail::grid_d1([&](int jj) { return field(a, ii, jj); }, j, nt, ht);
            };
            const double E = F.g11[k], Fm = F.g12[k], G = F.g22[k];
            const double E_u = in_s(F.g11, j), F_u = in_s(F.g12, j), G_u = in_s(F.g22, j);
            const double E_v = in_t(F.g11, i), F_v = in_t(F.g12, i), G_v = in_t(F.g22, i);
            const double E_vv =
                detail::grid_d2([&](int jj) { return field(F.g11, i, jj); }, j, nt, ht);
            const double G_uu =
                detail::grid_d2([&](int ii) { return field(F.g22, ii, j); }, i, ns, hs);
            // F_uv: derivative in t of the s-derivative field
            const double F_uv = detail::grid_d1(
                [&](int jj) {
                    return detail::grid_d1([&](int ii) { return field(F.g12, ii, jj); }, i, ns,
                                           hs);
                },
                j, nt, ht);

            const double m00 = -0.5 * E_vv + F_uv - 0.5 * G_uu;
            const double det1 = m00 * (E * G - Fm * Fm) -
                                0.5 * E_u * ((F_v - 0.5 * G_u) * G - Fm * 0.5 * G_v) +
                                (F_u - 0.5 * E_v) * ((F_v - 0.5 * G_u) * Fm - E * 0.5 * G_v);
            const double det2 = -(0.5 * E_v) * (0.5 * E_v * G - Fm * 0.5 * G_u) +
                                0.5 * G_u * (0.5 * E_v * Fm - E * 0.5 * G_u);
            const double den = (E * G - Fm * Fm) * (E * G - Fm * Fm);
            C.k_intrinsic[k] = (det1 - det2) / den;
            C.intr_excluded[k] = false;
        }
    }
    return C;
}

// ---------------------------------------------------------------------------
// Massey fit: 1/H = P cosh t + Q sinh t per ruling
// ---------------------------------------------------------------------------

enum class RulingType { umbilic, exp_type, cosh_type, sinh_violation };
enum class SurfaceVerdict { totally_umbilic, exponential_type, cosh_type, mixed };

inline const char* to_string(RulingType t) {
    switch (t) {
        case RulingType::umbilic: return "umbilic";
        case RulingType::exp_type: return "exp";
        case RulingType::cosh_type: return "cosh";
        case RulingType::sinh_violation: return "sinh-violation";
    }
    return "?";
}

inline const char* to_string(SurfaceVerdict v) {
    switch (v) {
        case SurfaceVerdict::totally_umbilic: return "totally-umbilic";
        case SurfaceVerdict::exponential_type: return "exponential-type";
        case SurfaceVerdict::cosh_type: return "cosh-type";
        case SurfaceVerdict::mixed: return "mixed";
    }
    return "?";
}

struct MasseyRuling {
    double s = 0;
    double P = 0, Q = 0;
    double residual = 0;      // max |u - fit| / max |u|
    double ode_residual = 0;  // max |u'' - u| / max |u|
    RulingType type = RulingType::umbilic;
    int exp_dir = 0;  // +1: H ~ e^{+t} (vertex towards t -> +inf), -1: H ~ e^{-t}
    double max_abs_H = 0;
};

struct MasseyReport {
    std::vector<MasseyRuling> rulings;
    SurfaceVerdict verdict = SurfaceVerdict::totally_umbilic;
    double fit_tol = 0;
};

// Second forms from finite differences carry ~1e-10 absolute noise; rulings
// whose |H| never clears this floor cannot be fitted meaningfully and are
// treated as umbilic.
inline constexpr double kMasseyNoiseFloor = 1e-6;

inline MasseyReport massey_fit(const SurfaceGrid& g, const CurvatureField& C,
                               double fit_tol = -1.0) {
    MasseyReport rep;
    rep.fit_tol = fit_tol > 0 ? fit_tol : tolerance().fit_tol;
    const int ns = g.ns(), nt = g.nt();

    bool any_exp = false, any_cosh = false, any_bad = false, any_nonumb = false;

    for (int i = 0; i < ns; ++i) {
        MasseyRuling r;
        r.s = g.s[i];
        std::vector<double> ts, us;
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            if (C.excluded[k]) continue;
            r.max_abs_H = std::max(r.max_abs_H, std::abs(C.mean[k]));
            if (std::abs(C.mean[k]) < tolerance().umb_tol) continue;
            ts.push_back(g.t[j]);
            us.push_back(1.0 / C.mean[k]);
        }
        if (static_cast<int>(ts.size()) < 8 ||
            r.max_abs_H < std::max(tolerance().umb_tol, kMasseyNoiseFloor)) {
            r.type = RulingType::umbilic;
            rep.rulings.push_back(r);
            continue;
        }
        any_nonumb = true;

        // least squares against {cosh, sinh}
        double acc = 0, bcc = 0, ccc = 0, rc = 0, rs = 0;
        for (std::size_t m = 0; m < ts.size(); ++m) {
            const double ch = std::cosh(ts[m]), sh = std::sinh(ts[m]);
            acc += ch * ch;
            bcc += ch * sh;
            ccc += sh * sh;
            rc += ch * us[m];
            rs += sh * us[m];
        }
        const double det = acc * ccc - bcc * bcc;
        double P = (rc * ccc - rs * bcc) / det;
        double Q = (acc * rs - bcc * rc) / det;

        double umax = 0, res = 0;
        for (std::size_t m = 0; m < ts.size(); ++m) {
            umax = std::max(umax, std::abs(us[m]));
            res = std::max(res, std::abs(us[m] - (P * std::cosh(ts[m]) + Q * std::sinh(ts[m]))));
        }
        r.residual = res / umax;

        if (P < 0) {
            P = -P;
            Q = -Q;
        }
        r.P = P;
        r.Q = Q;

        // direct ODE residual (u = 1/H along the full ruling where defined)
        {
            std::vector<double> uu, tt;
            for (int j = 0; j < nt; ++j) {
                const int k = g.idx(i, j);
                if (C.excluded[k] || std::abs(C.mean[k]) < tolerance().umb_tol) {
                    uu.clear();  // keep only a contiguous trailing run
                    tt.clear();
                    continue;
                }
                uu.push_back(1.0 / C.mean[k]);
                tt.push_back(g.t[j]);
            }
            if (uu.size() >= 6) {
                const double ht = tt[1] - tt[0];
                double worst = 0, scale = 0;
                for (std::size_t m = 2; m + 2 < uu.size(); ++m) {
                    const double upp = (-uu[m - 2] + 16 * uu[m - 1] - 30 * uu[m] +
                                        16 * uu[m + 1] - uu[m + 2]) /
                                       (12 * ht * ht);
                    worst = std::max(worst, std::abs(upp - uu[m]));
                    scale = std::max(scale, std::abs(uu[m]));
                }
                r.ode_residual = worst / std::max(scale, 1e-300);
            }
        }

        if (std::abs(P - std::abs(Q)) <= rep.fit_tol * P) {
            r.type = RulingType::exp_type;
            r.exp_dir = (Q < 0) ? +1 : -1;  // 1/H ~ P e^{-dir.t}
            any_exp = true;
        } else if (P > std::abs(Q)) {
            r.type = RulingType::cosh_type;
            any_cosh = true;
        } else {
            r.type = RulingType::sinh_violation;
            any_bad = true;
        }
        rep.rulings.push_back(r);
    }

    if (!any_nonumb)
        rep.verdict = SurfaceVerdict::totally_umbilic;
    else if (any_bad || (any_exp && any_cosh))
        rep.verdict = SurfaceVerdict::mixed;
    else if (any_exp)
        rep.verdict = SurfaceVerdict::exponential_type;
    else
        rep.verdict = SurfaceVerdict::cosh_type;
    return rep;
}

// ---------------------------------------------------------------------------
// Asymptotic test: <p+v, q+w> = 0 iff the rays are forward asymptotic
// ---------------------------------------------------------------------------

inline double asymptotic_test(const UnitTangent& r1, const UnitTangent& r2) {
    return minkowski_inner(r1.p.m + r1.v, r2.p.m + r2.v);
}

// ---------------------------------------------------------------------------
// Frenet apparatus of a sampled curve in H^3
// ---------------------------------------------------------------------------

struct FrenetSample {
    double s = 0;       // original parameter
    double arc = 0;     // cumulative arc length
    double speed = 0;
    HermMat p, e, n, b;
    double kappa = 0;
    std::optional<double> tau;
};

struct FrenetData {
    std::vector<FrenetSample> samples;
};

namespace detail {

struct CurveJet {
    HermMat p, d1, d2;  // value and first/second parameter derivatives
};

// 6th-order stencils on the raw evaluator; accuracy ~1e-11 at h = 1e-2
inline CurveJet curve_jet(const std::function<HermMat(double)>& c, double u, double h) {
    const HermMat m3 = c(u - 3 * h), m2 = c(u - 2 * h), m1 = c(u - h);
    const HermMat p0 = c(u);
    const HermMat p1 = c(u + h), p2 = c(u + 2 * h), p3 = c(u + 3 * h);
    CurveJet j;
    j.p = p0;
    j.d1 = (-1.0 * m3 + 9.0 * m2 - 45.0 * m1 + 45.0 * p1 - 9.0 * p2 + 1.0 * p3) * (1.0 / (60 * h));
    j.d2 = (2.0 * m3 - 27.0 * m2 + 270.0 * m1 - 490.0 * p0 + 270.0 * p1 - 27.0 * p2 + 2.0 * p3) *
           (1.0 / (180 * h * h));
    return j;
}

struct FrenetFrame {
    HermMat p, e, n, b;
    double speed, kappa;
    bool kappa_ok;
};

inline FrenetFrame frenet_frame_at(const std::function<HermMat(double)>& c, double u, double h) {
    const CurveJet j = curve_jet(c, u, h);
    FrenetFrame f;
    f.p = j.p;
    f.speed = std::sqrt(std::max(minkowski_inner(j.d1, j.d1), 0.0));
    f.e = j.d1 * (1.0 / f.speed);
    const double dsp = minkowski_inner(j.d2, j.d1) / f.speed;
    const HermMat eprime = j.d2 * (1.0 / f.speed) - j.d1 * (dsp / (f.speed * f.speed));
    const HermMat Dse = tangential_proj(eprime * (1.0 / f.speed), j.p);
    f.kappa = std::sqrt(std::max(minkowski_inner(Dse, Dse), 0.0));
    f.kappa_ok = f.kappa > tolerance().frenet_tol;
    if (f.kappa_ok) {
        f.n = Dse * (1.0 / f.kappa);
        f.b = cross(HPoint(j.p, false), f.e, f.n);
    }
    return f;
}

}  // namespace detail

// Frenet frame, curvature and torsion of a curve evaluator on [s0, s1].
// Derivatives use 6th-order stencils; the evaluator must admit evaluation in
// a 3h-collar around the domain. Torsion is left undefined where the
// curvature is below the frenet tolerance.
inline FrenetData frenet_apparatus(const std::function<HermMat(double)>& c, double s0, double s1,
                                   int n, double h = -1.0) {
    if (n < 2) throw contract_error("frenet_apparatus: need at least 2 samples");
    if (h <= 0) h = 1e-2 * std::max(0.1, (s1 - s0) / 6.283185307179586);
    FrenetData data;
    data.samples.reserve(n);
    double arc = 0, prev_speed = 0, prev_s = s0;
    for (int i = 0; i < n; ++i) {
        const double u = s0 + (s1 - s0) * i / double(n - 1);
        const detail::FrenetFrame f = detail::frenet_frame_at(c, u, h);
        FrenetSample smp;
        smp.s = u;
        smp.speed = f.speed;
        smp.p = f.p;
        smp.e = f.e;
        smp.kappa = f.kappa;
        if (f.kappa_ok) {
            smp.n = f.n;
            smp.b = f.b;
            auto bfield = [&](double uu) {
                const detail::FrenetFrame ff = detail::frenet_frame_at(c, uu, h);
                if (!ff.kappa_ok)
                    throw singularity_error("frenet_apparatus: kappa below tolerance inside stencil");
                return ff.b;
            };
            try {
                HermMat db{0, 0, 0, 0};
                static const double w[7] = {-1, 9, -45, 0, 45, -9, 1};
                for (int k = -3; k <= 3; ++k)
                    if (k != 0) db = db + w[k + 3] * bfield(u + k * h);
                db = db * (1.0 / (60 * h));
                const HermMat Dsb = detail::tangential_proj(db * (1.0 / f.speed), f.p);
                smp.tau = -minkowski_inner(Dsb, f.n);
            } catch (const singularity_error&) {
                smp.tau = std::nullopt;
            }
        }
        if (i > 0) arc += 0.5 * (f.speed + prev_speed) * (u - prev_s);
        smp.arc = arc;
        prev_speed = f.speed;
        prev_s = u;
        data.samples.push_back(smp);
    }
    return data;
}

// ---------------------------------------------------------------------------
// Structural checks for exponential-type surfaces (Claims 1-3 machinery)
// ---------------------------------------------------------------------------

struct StructuralReport {
    bool applicable = false;
    std::string reason;
    std::vector<double> s;            // rulings entering the checks
    std::vector<double> delta;        // II = e^{eps t} delta g11 ds^2
    std::vector<int> orientation;     // eps per ruling
    double delta_t_variation = 0;
    double kappa_residual = 0;        // |kappa - sqrt(1+delta^2)|
    double tau_residual = 0;          // |tau -(or +) delta'/(1+delta^2)|, best sign
    int tau_sign = 0;
    double direction_residual = 0;    // |eps f_t - (n - delta b)/sqrt(1+delta^2)|
    double asym_within_max = 0;       // asymptotic_test within orientation groups
    double asym_cross_min = 1e300;    // |asymptotic_test| between groups (if 2 groups)
    bool two_groups = false;
};

inline StructuralReport structural_checks(const SurfaceGrid& g, const FundamentalForms& F,
                                          const MasseyReport& massey) {
    StructuralReport rep;
    if (massey.verdict != SurfaceVerdict::exponential_type &&
        massey.verdict != SurfaceVerdict::totally_umbilic) {
        rep.reason = std::string("surface is ") + to_string(massey.verdict) +
                     ", structural checks apply to exponential type";
        return rep;
    }
    rep.applicable = true;

    const int ns = g.ns(), nt = g.nt();
    std::vector<int> eps(ns, 0);
    for (int i = 0; i < ns; ++i)
        eps[i] = massey.rulings[i].type == RulingType::exp_type ? massey.rulings[i].exp_dir : 0;
    // umbilic rulings inherit the orientation of the nearest classified ruling
    for (int i = 0; i < ns; ++i) {
        if (eps[i] != 0) continue;
        for (int d = 1; d < ns && eps[i] == 0; ++d) {
            if (i - d >= 0 && eps[i - d] != 0) eps[i] = eps[i - d];
            if (i + d < ns && eps[i + d] != 0) eps[i] = eps[i + d];
        }
        if (eps[i] == 0) eps[i] = 1;
    }

    for (int i = 0; i < ns; ++i) {
        double dmin = 1e300, dmax = -1e300, dsum = 0;
        int cnt = 0;
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            if (F.excluded[k]) continue;
            const double d = F.h11[k] * std::exp(-eps[i] * g.t[j]) / F.g11[k];
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
            dsum += d;
            ++cnt;
        }
        if (cnt == 0) continue;
        rep.s.push_back(g.s[i]);
        rep.delta.push_back(dsum / cnt);
        rep.orientation.push_back(eps[i]);
        rep.delta_t_variation = std::max(rep.delta_t_variation, dmax - dmin);
    }
    if (rep.s.empty()) {
        rep.applicable = false;
        rep.reason = "no usable rulings (all excluded)";
        return rep;
    }

    // Frenet of the base section c(s) = f(s, 0)
    const LCurve curve = g.curve;
    auto section = [curve](double s) { return surface_point(curve, s, 0.0); };
    const double span = g.s.back() - g.s.front();
    const double margin = 0.02 * span;
    const FrenetData fr =
        frenet_apparatus(section, g.s.front() + margin, g.s.back() - margin,
                         std::max(16, ns / 2));

    // piecewise-linear delta(s) over the usable rulings
    auto delta_at = [&](double s, int& eo) {
        std::size_t hi = std::lower_bound(rep.s.begin(), rep.s.end(), s) - rep.s.begin();
        if (hi == 0) {
            eo = rep.orientation[0];
            return rep.delta[0];
        }
        if (hi >= rep.s.size()) {
            eo = rep.orientation.back();
            return rep.delta.back();
        }
        const double w = (s - rep.s[hi - 1]) / (rep.s[hi] - rep.s[hi - 1]);
        eo = rep.orientation[w < 0.5 ? hi - 1 : hi];
        return (1 - w) * rep.delta[hi - 1] + w * rep.delta[hi];
    };

    double tau_res_plus = 0, tau_res_minus = 0;
    for (std::size_t m = 0; m < fr.samples.size(); ++m) {
        const FrenetSample& smp = fr.samples[m];
        int eo = 1;
        const double d = delta_at(smp.s, eo);
        const double root = std::sqrt(1.0 + d * d);
        rep.kappa_residual = std::max(rep.kappa_residual, std::abs(smp.kappa - root));

        if (smp.kappa > tolerance().frenet_tol) {
            const HermMat v = surface_ft(curve, smp.s, 0.0) * double(eo);
            const HermMat pred = (smp.n - d * smp.b) * (1.0 / root);
            rep.direction_residual =
                std::max(rep.direction_residual, max_abs_component(v - pred));
        }

        if (smp.tau && m >= 2 && m + 2 < fr.samples.size()) {
            // delta' with respect to arc length via neighbouring samples
            int e2;
            const double dm = delta_at(fr.samples[m - 1].s, e2);
            const double dp = delta_at(fr.samples[m + 1].s, e2);
            const double darc = fr.samples[m + 1].arc - fr.samples[m - 1].arc;
            const double dprime = (dp - dm) / darc;
            const double expect = dprime / (1.0 + d * d);
            tau_res_plus = std::max(tau_res_plus, std::abs(*smp.tau - expect));
            tau_res_minus = std::max(tau_res_minus, std::abs(*smp.tau + expect));
        }
    }
    if (tau_res_plus <= tau_res_minus) {
        rep.tau_residual = tau_res_plus;
        rep.tau_sign = +1;
    } else {
        rep.tau_residual = tau_res_minus;
        rep.tau_sign = -1;
    }

    // asymptotic matrix: rays oriented towards the shared end per group
    std::vector<HermMat> plus, minus;
    for (std::size_t m = 0; m < rep.s.size(); ++m) {
        const double s = rep.s[m];
        const HermMat p = surface_point(curve, s, 0.0);
        const HermMat v = surface_ft(curve, s, 0.0) * double(rep.orientation[m]);
        (rep.orientation[m] > 0 ? plus : minus).push_back(p + v);
    }
    auto pairwise_max = [](const std::vector<HermMat>& grp) {
        double worst = 0;
        for (std::size_t a = 0; a < grp.size(); ++a)
            for (std::size_t b = a + 1; b < grp.size(); ++b)
                worst = std::max(worst, std::abs(minkowski_inner(grp[a], grp[b])));
        return worst;
    };
    rep.asym_within_max = std::max(pairwise_max(plus), pairwise_max(minus));
    if (!plus.empty() && !minus.empty()) {
        rep.two_groups = true;
        for (const HermMat& a : plus)
            for (const HermMat& b : minus)
                rep.asym_cross_min = std::min(rep.asym_cross_min, std::abs(minkowski_inner(a, b)));
    }
    return rep;
}

}  // namespace hypflat
