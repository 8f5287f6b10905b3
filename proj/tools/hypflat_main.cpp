// hypflat: developable surfaces in hyperbolic 3-space from null-causal curves
// in the space of oriented geodesics.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <hypflat/mesh_io.hpp>
#include <hypflat/rng.hpp>
#include <hypflat/surface.hpp>

using namespace hypflat;

namespace {

struct RunConfig {
    std::string curve_path;
    int ns = 256, nt = 128;
    double s_min = 0, s_max = 0;  // defaults to the curve's own domain
    bool s_range_set = false;
    double t_min = -2.0, t_max = 2.0;
    std::string model = "ball";
    double tol = -1.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
    bool force = false;
};

// Chart-boundary recovery: conjugate the whole curve by a small random
// rotation and retry (up to three times).
LCurve rotate_curve(const LCurve& c, Xoshiro256& rng, nlohmann::json& log) {
    const double phi = rng.uniform(0.05, 0.25) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const double psi = rng.uniform(0.0, 6.283185307179586);
    const complexd ca = std::cos(phi / 2), sa = std::sin(phi / 2);
    const MoebiusMap rot(ca + complexd(0, 1) * sa * std::cos(psi),
                         complexd(0, 1) * sa * std::sin(psi),
                         complexd(0, 1) * sa * std::sin(psi),
                         ca - complexd(0, 1) * sa * std::cos(psi), false);
    LCurve out = c;
    out.eval = [c, rot](double s) { return moebius_on_LH(rot, c.eval(s)); };
    if (c.deriv) {
        out.deriv = [c, rot](double s) {
            TangentLH x;
            x.at = c.eval(s);
            const auto [d1, d2] = c.deriv(s);
            x.dmu1 = d1;
            x.dmu2 = d2;
            const TangentLH y = moebius_pushforward(rot, x);
            return std::make_pair(y.dmu1, y.dmu2);
        };
    }
    log["chart_rotation"].push_back({{"phi", phi}, {"psi", psi}});
    return out;
}

template <typename F>
auto with_chart_retries(LCurve curve, Xoshiro256& rng, nlohmann::json& log, F&& body) {
    for (int attempt = 0;; ++attempt) {
        try {
            return body(curve);
        } catch (const chart_error&) {
            if (attempt >= 3) throw;
            curve = rotate_curve(curve, rng, log);
        }
    }
}

void emit(const nlohmann::json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_report_json(j, out);
}

int run_classify(const RunConfig& cfg) {
    Xoshiro256 rng(cfg.seed);
    LCurve c = read_curve_json(cfg.curve_path);
    nlohmann::json j;
    const CausalReport rep = with_chart_retries(
        c, rng, j, [&](const LCurve& cc) { return classify_curve(cc, cfg.tol); });
    j.update(causal_report_json(rep));
    j["curve"] = c.name;
    j["seed"] = cfg.seed;
    emit(j, cfg.out);
    return 0;
}

SurfaceGrid make_grid(const RunConfig& cfg, const LCurve& c) {
    const double s0 = cfg.s_range_set ? cfg.s_min : c.s_min;
    const double s1 = cfg.s_range_set ? cfg.s_max : c.s_max;
    return generate_surface(c, s0, s1, cfg.t_min, cfg.t_max, cfg.ns, cfg.nt, cfg.force);
}

int run_surface(const RunConfig& cfg) {
    Xoshiro256 rng(cfg.seed);
    LCurve c = read_curve_json(cfg.curve_path);
    nlohmann::json log;
    const Mesh mesh = with_chart_retries(c, rng, log, [&](const LCurve& cc) {
        const SurfaceGrid g = make_grid(cfg, cc);
        const FundamentalForms F = fundamental_forms(g);
        const CurvatureField C = curvature_fields(g, F);
        return project_grid(g, cfg.model == "upper" ? Model::upper : Model::ball, &C);
    });
    const std::string out = cfg.out.empty() ? "surface.obj" : cfg.out;
    write_obj(mesh, out);
    write_channels_csv(mesh, out + ".csv");
    std::cerr << "wrote " << out << " (" << mesh.vertices.size() << " vertices, "
              << mesh.triangles.size() << " triangles";
    if (mesh.clipped) std::cerr << ", " << mesh.clipped << " clipped";
    std::cerr << ") and " << out << ".csv\n";
    return 0;
}

int run_analyze(const RunConfig& cfg) {
    Xoshiro256 rng(cfg.seed);
    LCurve c = read_curve_json(cfg.curve_path);
    nlohmann::json j;
    j = with_chart_retries(c, rng, j, [&](const LCurve& cc) {
        nlohmann::json out = j;
        const SurfaceGrid g = make_grid(cfg, cc);
        const FundamentalForms F = fundamental_forms(g);
        const CurvatureField C = curvature_fields(g, F);
        const MasseyReport m = massey_fit(g, C, cfg.tol);
        const StructuralReport st = structural_checks(g, F, m);
        out.update(analysis_report_json(g, C, m, st));
        if (!cfg.csv.empty()) write_curvature_csv(g, C, cfg.csv);
        return out;
    });
    j["curve"] = c.name;
    j["seed"] = cfg.seed;
    j["grid"] = {{"ns", cfg.ns}, {"nt", cfg.nt}, {"t", {cfg.t_min, cfg.t_max}}};
    j["tolerances"] = {{"null_analytic", tolerance().null_analytic},
                       {"null_fd", tolerance().null_fd},
                       {"fit_tol", tolerance().fit_tol},
                       {"umb_tol", tolerance().umb_tol}};
    emit(j, cfg.out);
    return 0;
}

int run_verify(const RunConfig& cfg) {
    bool ok = true;
    auto line = [&](const char* name, double value, double bound) {
        const bool pass = value < bound;
        ok = ok && pass;
        std::printf("[%s] %-28s %.3e (< %.0e)\n", pass ? "PASS" : "FAIL", name, value, bound);
    };

    const SymplecticReport sym = verify_symplectic(cfg.seed, 1000, 32);
    line("omega_J + omega_P", sym.max_jp_antisym, 1e-12);
    line("dTheta vs omega_P", sym.max_dtheta_deviation, 1e-5);

    const BGReport bg = verify_BG(cfg.seed + 1, 64);
    line("G vs -B_L", bg.max_metric_deviation, 1e-6);
    line("psi coordinate pushforward", bg.max_coord_fd_deviation, 1e-6);

    line("metric Moebius invariance", verify_metric_invariance(cfg.seed + 2, 100), 1e-8);
    line("standard embedding metric", verify_standard_embedding(cfg.seed + 3, 100), 1e-10);

    std::printf("%s (seed %llu)\n", ok ? "all checks passed" : "verification FAILED",
                static_cast<unsigned long long>(cfg.seed));
    return ok ? 0 : 4;
}

int run_examples() {
    nlohmann::json j = nlohmann::json::array();
    j.push_back({{"name", "nomizu1"},
                 {"description", "hyperbolic 2-cylinder over zeta(s) = radius e^{i omega s}"},
                 {"params", {{"radius", 1.0 / 3.0}, {"omega", 1.0}}},
                 {"domain", {-3.141592653589793, 3.141592653589793}}});
    j.push_back({{"name", "nomizu2"},
                 {"description",
                  "ideal cone with vertex at infinity over mu(s) = radius e^{i omega s}"},
                 {"params", {{"radius", 0.5}, {"omega", 1.0}}},
                 {"domain", {-3.141592653589793, 3.141592653589793}}});
    j.push_back({{"name", "nomizu3"},
                 {"description",
                  "rectifying developable of the helix with the given curvature and torsion"},
                 {"params", {{"kappa", 1.0}, {"tau", 1.0}}},
                 {"domain", {-6.283185307179586, 6.283185307179586}}});
    j.push_back({{"name", "nra"},
                 {"description",
                  "non-real-analytic developable of exponential type, asymptotic to 0 and infinity"},
                 {"params", nlohmann::json::object()},
                 {"domain", {-2.5, 2.5}}});
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"developable surfaces in H^3 from null-causal curves in LH^3"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool needs_curve) {
        if (needs_curve)
            sub->add_option("--curve", cfg.curve_path, "curve spec JSON")->required();
        sub->add_option("--ns", cfg.ns, "ruling samples")->check(CLI::Range(8, 1 << 20));
        sub->add_option("--nt", cfg.nt, "samples per ruling")->check(CLI::Range(8, 1 << 20));
        auto* smin = sub->add_option("--s-min", cfg.s_min, "curve parameter range");
        sub->add_option("--s-max", cfg.s_max, "curve parameter range")->needs(smin);
        sub->add_option("--t-min", cfg.t_min, "ruling parameter range");
        sub->add_option("--t-max", cfg.t_max, "ruling parameter range");
        sub->add_option("--tol", cfg.tol, "classification/fit tolerance override")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "RNG seed for retries and fuzz");
        sub->add_option("--out", cfg.out, "output path");
        sub->callback([&cfg, sub]() { cfg.s_range_set = sub->count("--s-min") > 0; });
    };

    auto* classify = app.add_subcommand("classify", "null/causal classification of a curve");
    add_common(classify, true);
    auto* surface = app.add_subcommand("surface", "export the developable surface mesh");
    add_common(surface, true);
    surface->add_option("--model", cfg.model, "projection model")
        ->check(CLI::IsMember({"ball", "upper"}));
    surface->add_flag("--force", cfg.force, "build the ruled locus even if not developable");
    auto* analyze = app.add_subcommand("analyze", "curvature, Massey fit and structural checks");
    add_common(analyze, true);
    analyze->add_option("--csv", cfg.csv, "dump curvature fields to CSV");
    analyze->add_flag("--force", cfg.force, "analyze the ruled locus even if not developable");
    auto* verify = app.add_subcommand("verify", "run the structural theorem suite");
    verify->add_option("--seed", cfg.seed, "RNG seed");
    app.add_subcommand("examples", "list builtin curve families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify->parsed()) return run_classify(cfg);
        if (surface->parsed()) return run_surface(cfg);
        if (analyze->parsed()) return run_analyze(cfg);
        if (verify->parsed()) return run_verify(cfg);
        return run_examples();
    } catch (const chart_error& e) {
        std::cerr << "chart error: " << e.what() << '\n';
        return 3;
    } catch (const singularity_error& e) {
        std::cerr << "singularity: " << e.what() << '\n';
        return 3;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const contract_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
