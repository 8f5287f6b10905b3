#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curve.hpp"
#include "interp.hpp"
#include "surface.hpp"

namespace hypflat {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Mesh extraction
// ---------------------------------------------------------------------------

enum class Model { ball, upper };

struct Mesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::map<std::string, std::vector<double>> channels;  // per-vertex scalars
    int clipped = 0;  // upper-model vertices clamped near the ideal boundary
};

inline Mesh project_grid(const SurfaceGrid& g, Model model, const CurvatureField* curv = nullptr) {
    Mesh m;
    const int ns = g.ns(), nt = g.nt();
    m.vertices.reserve(ns * nt);
    std::vector<double>& ch_h = m.channels["H"];
    std::vector<double>& ch_k = m.channels["Kext"];
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int k = g.idx(i, j);
            const HPoint p(g.f[k], false);
            if (model == Model::ball) {
                const BallPoint b = to_ball(p);
                m.vertices.push_back({b.x, b.y, b.z});
            } else {
                UpperHalfPoint u = to_upper(p);
                // clip instead of failing so cones with vertex at infinity export
                if (u.r > 1e6 || std::abs(u.w) > 1e6) {
                    const double f = 1e6 / std::max(u.r, std::abs(u.w));
                    u.r *= f;
                    u.w *= f;
                    ++m.clipped;
                }
                m.vertices.push_back({u.w.real(), u.w.imag(), u.r});
            }
            ch_h.push_back(curv && !curv->excluded[k] ? curv->mean[k] : 0.0);
            ch_k.push_back(curv && !curv->excluded[k] ? curv->kext_numeric[k] : 0.0);
        }
    }
    for (int i = 0; i + 1 < ns; ++i) {
        for (int j = 0; j + 1 < nt; ++j) {
            const int a = g.idx(i, j), b = g.idx(i + 1, j);
            const int c = g.idx(i + 1, j + 1), d = g.idx(i, j + 1);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, d});
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// OBJ + sidecar CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_obj(const Mesh& m, const std::string& path) {
    for (const auto& v : m.vertices)
        for (const double x : v)
            if (!std::isfinite(x)) throw parse_error("write_obj: refusing non-finite vertex");
    std::ofstream out(path);
    if (!out) throw parse_error("write_obj: cannot open " + path);
    out << "# hypflat surface mesh\n";
    for (const auto& v : m.vertices)
        out << "v " << detail::fmt17(v[0]) << ' ' << detail::fmt17(v[1]) << ' '
            << detail::fmt17(v[2]) << '\n';
    for (const auto& t : m.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline Mesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("read_obj: cannot open " + path);
    Mesh m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            std::istringstream ss(line.substr(2));
            std::array<double, 3> v{};
            ss >> v[0] >> v[1] >> v[2];
            m.vertices.push_back(v);
        } else if (line.rfind("f ", 0) == 0) {
            std::istringstream ss(line.substr(2));
            std::array<int, 3> t{};
            ss >> t[0] >> t[1] >> t[2];
            m.triangles.push_back({t[0] - 1, t[1] - 1, t[2] - 1});
        }
    }
    return m;
}

inline void write_channels_csv(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("write_channels_csv: cannot open " + path);
    out << "index";
    for (const auto& [name, _] : m.channels) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        out << i;
        for (const auto& [_, vals] : m.channels) out << ',' << detail::fmt17(vals[i]);
        out << '\n';
    }
}

inline void write_curvature_csv(const SurfaceGrid& g, const CurvatureField& C,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("write_curvature_csv: cannot open " + path);
    out << "s,t,lambda,kext_closed,kext_numeric,H,excluded\n";
    for (int i = 0; i < g.ns(); ++i)
        for (int j = 0; j < g.nt(); ++j) {
            const int k = g.idx(i, j);
            out << detail::fmt17(g.s[i]) << ',' << detail::fmt17(g.t[j]) << ','
                << detail::fmt17(C.lambda[k]) << ',' << detail::fmt17(C.kext_closed[k]) << ','
                << detail::fmt17(C.kext_numeric[k]) << ',' << detail::fmt17(C.mean[k]) << ','
                << (C.excluded[k] ? 1 : 0) << '\n';
        }
}

// ---------------------------------------------------------------------------
// Curve JSON:
//   {"type":"builtin","name":"nomizu2","params":{"radius":0.5,...}}
//   {"type":"samples","s":[...],"mu1":[[re,im],...],"mu2":[[re,im],...]}
// ---------------------------------------------------------------------------

inline LCurve curve_from_json(const nlohmann::json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "builtin") {
            const std::string name = j.at("name").get<std::string>();
            ExampleParams p;
            if (name == "nomizu1") {
                p.family = Family::nomizu1;
                p.radius = 1.0 / 3.0;
            } else if (name == "nomizu2") {
                p.family = Family::nomizu2;
                p.radius = 0.5;
            } else if (name == "nomizu3") {
                p.family = Family::nomizu3;
            } else if (name == "nra") {
                p.family = Family::nra;
            } else {
                throw parse_error("curve_from_json: unknown builtin '" + name + "'");
            }
            if (j.contains("params")) {
                const auto& q = j["params"];
                if (q.contains("radius")) p.radius = q["radius"].get<double>();
                if (q.contains("omega")) p.omega = q["omega"].get<double>();
                if (q.contains("kappa")) p.kappa = q["kappa"].get<double>();
                if (q.contains("tau")) p.tau = q["tau"].get<double>();
            }
            LCurve c = builtin_curve(p);
            if (j.contains("domain")) {
                c.s_min = j["domain"].at(0).get<double>();
                c.s_max = j["domain"].at(1).get<double>();
            }
            if (j.contains("grid")) c.grid_n = j["grid"].get<int>();
            return c;
        }
        if (type == "samples") {
            const auto s = j.at("s").get<std::vector<double>>();
            const auto m1 = j.at("mu1").get<std::vector<std::array<double, 2>>>();
            const auto m2 = j.at("mu2").get<std::vector<std::array<double, 2>>>();
            if (s.size() != m1.size() || s.size() != m2.size() || s.size() < 2)
                throw parse_error("curve_from_json: samples arrays must have equal length >= 2");
            std::vector<double> re1(s.size()), im1(s.size()), re2(s.size()), im2(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) {
                re1[i] = m1[i][0];
                im1[i] = m1[i][1];
                re2[i] = m2[i][0];
                im2[i] = m2[i][1];
            }
            auto p_re1 = std::make_shared<MonotoneCubic>(s, re1);
            auto p_im1 = std::make_shared<MonotoneCubic>(s, im1);
            auto p_re2 = std::make_shared<MonotoneCubic>(s, re2);
            auto p_im2 = std::make_shared<MonotoneCubic>(s, im2);
            LCurve c;
            c.name = "samples";
            c.s_min = s.front();
            c.s_max = s.back();
            c.eval = [=](double u) {
                return GeodesicCoord(complexd((*p_re1)(u), (*p_im1)(u)),
                                     complexd((*p_re2)(u), (*p_im2)(u)));
            };
            c.deriv = [=](double u) {
                return std::make_pair(complexd(p_re1->derivative(u), p_im1->derivative(u)),
                                      complexd(p_re2->derivative(u), p_im2->derivative(u)));
            };
            c.analytic = false;  // interpolated data, use finite-difference tolerances
            if (j.contains("grid")) c.grid_n = j["grid"].get<int>();
            return c;
        }
        throw parse_error("curve_from_json: unknown type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("curve_from_json: ") + e.what());
    }
}

inline LCurve read_curve_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("read_curve_json: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("read_curve_json: ") + e.what());
    }
    return curve_from_json(j);
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

inline nlohmann::json causal_report_json(const CausalReport& r) {
    nlohmann::json j;
    j["verdict"] = to_string(r.verdict);
    j["null_gi"] = r.null_gi;
    j["null_gr"] = r.null_gr;
    j["causal_gr"] = r.causal_gr;
    j["regular"] = r.regular;
    j["fd_derivative"] = r.fd_derivative;
    j["tol"] = r.tol_used;
    j["gr_min"] = r.gr_min;
    j["gr_max"] = r.gr_max;
    j["gi_max_abs"] = r.gi_max_abs;
    if (r.vertex) {
        if (r.vertex->infinite)
            j["vertex"] = "inf";
        else
            j["vertex"] = {r.vertex->z.real(), r.vertex->z.imag()};
    }
    if (r.irregular_at) j["irregular_at"] = *r.irregular_at;
    return j;
}

inline nlohmann::json analysis_report_json(const SurfaceGrid& g, const CurvatureField& C,
                                           const MasseyReport& massey,
                                           const StructuralReport& st) {
    nlohmann::json j;
    j["classification"] = causal_report_json(g.classification);
    double max_kext = 0;
    for (std::size_t k = 0; k < C.kext_numeric.size(); ++k)
        if (!C.excluded[k]) max_kext = std::max(max_kext, std::abs(C.kext_numeric[k]));
    j["max_abs_kext_numeric"] = max_kext;
    j["surface_verdict"] = to_string(massey.verdict);
    nlohmann::json rulings = nlohmann::json::array();
    for (const MasseyRuling& r : massey.rulings) {
        rulings.push_back({{"s", r.s},
                           {"P", r.P},
                           {"Q", r.Q},
                           {"residual", r.residual},
                           {"ode_residual", r.ode_residual},
                           {"type", to_string(r.type)}});
    }
    j["massey"] = std::move(rulings);
    nlohmann::json stj;
    stj["applicable"] = st.applicable;
    if (!st.applicable) {
        stj["reason"] = st.reason;
    } else {
        stj["delta_t_variation"] = st.delta_t_variation;
        stj["kappa_residual"] = st.kappa_residual;
        stj["tau_residual"] = st.tau_residual;
        stj["tau_sign"] = st.tau_sign;
        stj["direction_residual"] = st.direction_residual;
        stj["asymptotic_within_max"] = st.asym_within_max;
        if (st.two_groups) stj["asymptotic_cross_min"] = st.asym_cross_min;
    }
    j["structural"] = std::move(stj);
    return j;
}

inline void write_report_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("write_report_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace hypflat
