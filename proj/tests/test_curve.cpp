#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <hypflat/curve.hpp>
#include <hypflat/rng.hpp>

using namespace hypflat;

TEST_CASE("builtin values at s = 0") {
    ExampleParams p2;
    p2.family = Family::nomizu2;
    p2.radius = 0.5;
    const LCurve c2 = builtin_curve(p2);
    const GeodesicCoord g2 = c2.eval(0.0);
    CHECK(g2.mu1 == complexd(0.5));
    CHECK(g2.mu2 == complexd(0));

    ExampleParams p1;
    p1.family = Family::nomizu1;
    p1.radius = 1.0 / 3.0;
    const LCurve c1 = builtin_curve(p1);
    const GeodesicCoord g1 = c1.eval(0.0);
    CHECK_THAT(g1.mu1.real(), Catch::Matchers::WithinAbs(-1.0 / 3.0, 1e-15));
    CHECK_THAT(g1.mu2.real(), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));

    // nomizu1 requires zeta in the unit disc
    ExampleParams bad = p1;
    bad.radius = 1.0;
    CHECK_THROWS_AS(builtin_curve(bad), contract_error);
}

TEST_CASE("nomizu3 constants") {
    // kappa = tau = 1: a+ = sqrt5, a- = 1, A+ = sqrt(sqrt5 - 1), A- = sqrt(sqrt5 + 1)
    const Nomizu3Info info = nomizu3_info(1.0, 1.0);
    const double s5 = std::sqrt(5.0);
    CHECK_THAT(info.w.real() * std::sqrt(2.0),
               Catch::Matchers::WithinRel(std::sqrt(s5 - 1.0), 1e-12));
    CHECK_THAT(info.w.imag() * std::sqrt(2.0),
               Catch::Matchers::WithinRel(std::sqrt(s5 + 1.0), 1e-12));
    CHECK(info.t0 == Catch::Approx(0.0).margin(1e-10));

    // the curve has constant G, real and non-positive (null-causal)
    ExampleParams p;
    p.family = Family::nomizu3;
    p.kappa = 1.0;
    p.tau = 1.0;
    const LCurve c = builtin_curve(p);
    for (const double s : {-4.0, -1.0, 0.0, 2.0, 5.5}) {
        const complexd g = eval_metric(curve_derivative(c, s)).g;
        CHECK_THAT(g.real(), Catch::Matchers::WithinAbs(-0.5, 1e-10));
        CHECK_THAT(g.imag(), Catch::Matchers::WithinAbs(0.0, 1e-10));
    }

    CHECK_THROWS_AS(nomizu3_info(1.0, 0.0), contract_error);
    CHECK_THROWS_AS(nomizu3_info(-1.0, 1.0), contract_error);

    // other parameter values stay null-causal too
    for (const auto& [kp, tu] : {std::pair{2.0, 0.5}, {0.5, 1.5}, {1.5, -0.7}}) {
        ExampleParams q;
        q.family = Family::nomizu3;
        q.kappa = kp;
        q.tau = tu;
        const LCurve cc = builtin_curve(q);
        const CausalReport rep = classify_curve(cc);
        CHECK(rep.verdict == CurveVerdict::developable);
    }
}

TEST_CASE("curve derivatives") {
    ExampleParams p2;
    p2.family = Family::nomizu2;
    p2.radius = 0.5;
    LCurve c2 = builtin_curve(p2);
    const TangentLH d0 = curve_derivative(c2, 0.0);
    CHECK(std::abs(d0.dmu1 - complexd(0, 0.5)) < 1e-15);
    CHECK(std::abs(d0.dmu2) == 0.0);

    // finite differences agree with the analytic derivative
    ExampleParams p1;
    p1.family = Family::nomizu1;
    p1.radius = 1.0 / 3.0;
    LCurve c1 = builtin_curve(p1);
    LCurve c1fd = c1;
    c1fd.deriv = nullptr;
    c1fd.analytic = false;
    for (int i = 0; i < 100; ++i) {
        const double s = c1.s_min + (c1.s_max - c1.s_min) * i / 99.0;
        const TangentLH a = curve_derivative(c1, s);
        const TangentLH b = curve_derivative(c1fd, s);
        CHECK(std::abs(a.dmu1 - b.dmu1) < 1e-8);
        CHECK(std::abs(a.dmu2 - b.dmu2) < 1e-8);
    }

    CHECK_THROWS_AS(curve_derivative(c2, 100.0), contract_error);
}

TEST_CASE("classification of the example families") {
    ExampleParams p1;
    p1.family = Family::nomizu1;
    p1.radius = 1.0 / 3.0;
    const CausalReport r1 = classify_curve(builtin_curve(p1));
    CHECK(r1.verdict == CurveVerdict::developable);
    CHECK(r1.null_gi);
    CHECK(r1.causal_gr);
    // gr = -4|zeta'|^2/(1-|zeta|^2)^2 = -0.5625 for zeta = e^{is}/3
    CHECK_THAT(r1.gr_min, Catch::Matchers::WithinAbs(-0.5625, 1e-10));
    CHECK_THAT(r1.gr_max, Catch::Matchers::WithinAbs(-0.5625, 1e-10));
    CHECK(r1.gi_max_abs < 1e-10);

    ExampleParams p2;
    p2.family = Family::nomizu2;
    p2.radius = 0.5;
    const CausalReport r2 = classify_curve(builtin_curve(p2));
    CHECK(r2.verdict == CurveVerdict::ideal_cone);
    REQUIRE(r2.vertex.has_value());
    CHECK(r2.vertex->infinite);
    CHECK(r2.gi_max_abs == 0.0);
    CHECK(r2.gr_min == 0.0);
    CHECK(r2.gr_max == 0.0);

    // non-developable witness alpha(s) = (s, is)
    LCurve w;
    w.s_min = -0.5;
    w.s_max = 0.5;
    w.name = "witness";
    w.eval = [](double s) { return GeodesicCoord(s, complexd(0, s)); };
    w.deriv = [](double) { return std::make_pair(complexd(1), complexd(0, 1)); };
    w.analytic = true;
    const CausalReport rw = classify_curve(w);
    CHECK(rw.verdict == CurveVerdict::non_developable);
    const complexd g0 = eval_metric(curve_derivative(w, 0.0)).g;
    CHECK_THAT(g0.imag(), Catch::Matchers::WithinAbs(-4.0, 1e-14));
    CHECK_THAT(g0.real(), Catch::Matchers::WithinAbs(0.0, 1e-14));

    // constant curve is irregular
    LCurve cc = w;
    cc.eval = [](double) { return GeodesicCoord(0.1, 0.0); };
    cc.deriv = [](double) { return std::make_pair(complexd(0), complexd(0)); };
    const CausalReport rc = classify_curve(cc);
    CHECK(rc.verdict == CurveVerdict::irregular);
    CHECK(rc.irregular_at.has_value());
}

TEST_CASE("nra family") {
    ExampleParams p;
    p.family = Family::nra;
    const LCurve c = builtin_curve(p);
    REQUIRE(c.stiff_points.size() == 5);

    // continuity and C^1 gluing across the joints
    for (const double b : c.stiff_points) {
        const GeodesicCoord l = c.eval(b - 1e-9), r = c.eval(b + 1e-9);
        CHECK(std::abs(l.mu1 - r.mu1) < 1e-8);
        CHECK(std::abs(l.mu2 - r.mu2) < 1e-8);
        const auto [dl1, dl2] = c.deriv(b - 1e-9);
        const auto [dr1, dr2] = c.deriv(b + 1e-9);
        CHECK(std::abs(dl1 - dr1) < 1e-7);
        CHECK(std::abs(dl2 - dr2) < 1e-7);
    }

    // ends: mu1 = 0 for s <= -1, mu2 = 0 for s >= 1
    CHECK(std::abs(c.eval(-1.7).mu1) == 0.0);
    CHECK(std::abs(c.eval(2.0).mu2) == 0.0);

    const CausalReport rep = classify_curve(c);
    CHECK(rep.verdict == CurveVerdict::developable);  // not a single ideal cone
    CHECK(rep.null_gi);
    CHECK(rep.causal_gr);
    CHECK(rep.gi_max_abs == 0.0);
    CHECK(rep.gr_min < -0.5);  // strictly timelike in the middle strip

    // analytic derivative matches finite differences away from the joints
    LCurve cfd = c;
    cfd.deriv = nullptr;
    cfd.analytic = false;
    for (const double s : {-2.2, -0.5, 0.37, 1.2, 2.1}) {
        const TangentLH a = curve_derivative(c, s);
        const TangentLH b = curve_derivative(cfd, s);
        CHECK(std::abs(a.dmu1 - b.dmu1) < 1e-7);
        CHECK(std::abs(a.dmu2 - b.dmu2) < 1e-7);
    }
}

TEST_CASE("verdict invariances") {
    ExampleParams p1;
    p1.family = Family::nomizu1;
    p1.radius = 1.0 / 3.0;
    const LCurve c1 = builtin_curve(p1);

    // orientation-preserving reparametrization: s -> s^3/5 + s (phi' > 0)
    LCurve rep = c1;
    rep.eval = [c1](double u) { return c1.eval(u * u * u / 5.0 + u); };
    rep.deriv = nullptr;
    rep.analytic = false;
    rep.s_min = -1.2;
    rep.s_max = 1.2;
    const CausalReport r = classify_curve(rep);
    CHECK(r.verdict == CurveVerdict::developable);

    // Moebius pushforward preserves the verdict and G-values
    const MoebiusMap a(complexd(0.96, 0.28), 0.1, complexd(0, -0.05),
                       (1.0 + 0.1 * complexd(0, -0.05)) / complexd(0.96, 0.28), false);
    LCurve mc = c1;
    mc.eval = [c1, a](double s) { return moebius_on_LH(a, c1.eval(s)); };
    mc.deriv = nullptr;
    mc.analytic = false;
    const CausalReport rm = classify_curve(mc);
    CHECK(rm.verdict == CurveVerdict::developable);
    for (const double s : {-2.0, 0.0, 1.5}) {
        const complexd before = eval_metric(curve_derivative(c1, s)).g;
        const complexd pushed =
            eval_metric(moebius_pushforward(a, curve_derivative(c1, s))).g;
        CHECK(std::abs(before - pushed) < 1e-8 * std::max(1.0, std::abs(before)));
    }

    // nomizu2 with any immersed plane curve is an ideal cone (Prop vertex)
    LCurve any_cone;
    any_cone.s_min = -1;
    any_cone.s_max = 1;
    any_cone.eval = [](double s) {
        return GeodesicCoord(complexd(s, 0.2 * s * s - 0.3 * s), 0.0);
    };
    any_cone.deriv = [](double s) {
        return std::make_pair(complexd(1, 0.4 * s - 0.3), complexd(0));
    };
    any_cone.analytic = true;
    const CausalReport ra = classify_curve(any_cone);
    CHECK(ra.verdict == CurveVerdict::ideal_cone);
    REQUIRE(ra.vertex.has_value());
    CHECK(ra.vertex->infinite);
}

TEST_CASE("detect_ideal_cone") {
    ExampleParams p2;
    p2.family = Family::nomizu2;
    const auto v2 = detect_ideal_cone(builtin_curve(p2));
    REQUIRE(v2.has_value());
    CHECK(v2->infinite);

    ExampleParams p1;
    p1.family = Family::nomizu1;
    p1.radius = 1.0 / 3.0;
    CHECK_FALSE(detect_ideal_cone(builtin_curve(p1)).has_value());

    ExampleParams pn;
    pn.family = Family::nra;
    CHECK_FALSE(detect_ideal_cone(builtin_curve(pn)).has_value());

    // a cone with the vertex at a finite point: mu1 constant
    LCurve c;
    c.s_min = -1;
    c.s_max = 1;
    c.eval = [](double s) { return GeodesicCoord(complexd(0.25, -0.5), complexd(s, 0.1)); };
    c.deriv = [](double) { return std::make_pair(complexd(0), complexd(1)); };
    c.analytic = true;
    const auto v = detect_ideal_cone(c);
    REQUIRE(v.has_value());
    CHECK_FALSE(v->infinite);
    CHECK(std::abs(v->z - complexd(-0.25, 0.5)) < 1e-14);  // gamma_- = -mu1
}
