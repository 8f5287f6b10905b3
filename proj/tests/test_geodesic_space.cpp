#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <hypflat/geodesic_space.hpp>
#include <hypflat/rng.hpp>

using namespace hypflat;

namespace {

MoebiusMap random_sl2(Xoshiro256& rng) {
    for (;;) {
        const complexd a = rng.cnormal(), b = rng.cnormal();
        const complexd c = rng.cnormal(), d = rng.cnormal();
        const complexd det = a * d - b * c;
        if (std::abs(det) < 1e-3) continue;
        const complexd s = std::sqrt(det);
        return MoebiusMap(a / s, b / s, c / s, d / s, false);
    }
}

GeodesicCoord random_chart_coord(Xoshiro256& rng, double margin = 0.1) {
    for (;;) {
        const complexd m1 = 0.8 * rng.cnormal(), m2 = 0.8 * rng.cnormal();
        if (std::abs(1.0 + m1 * std::conj(m2)) > margin) return GeodesicCoord(m1, m2, false);
    }
}

}  // namespace

TEST_CASE("geodesic reconstruction") {
    // (0,0) is the axis geodesic diag(e^t, e^{-t})
    for (const double t : {-1.3, 0.0, 0.7}) {
        const HPoint p = geodesic_point(GeodesicCoord(0, 0), t);
        CHECK_THAT(p.m.x0, Catch::Matchers::WithinAbs(std::cosh(t), 1e-14));
        CHECK_THAT(p.m.x3, Catch::Matchers::WithinAbs(std::sinh(t), 1e-14));
        CHECK_THAT(p.m.x1, Catch::Matchers::WithinAbs(0, 1e-15));
    }
    // (0,1): [[e^t, e^t],[e^t, e^t + e^{-t}]]
    const double t = 0.35;
    const Mat2c m = geodesic_point(GeodesicCoord(0, 1), t).m.matrix();
    CHECK_THAT(m.a.real(), Catch::Matchers::WithinRel(std::exp(t), 1e-13));
    CHECK_THAT(m.b.real(), Catch::Matchers::WithinRel(std::exp(t), 1e-13));
    CHECK_THAT(m.d.real(), Catch::Matchers::WithinRel(std::exp(t) + std::exp(-t), 1e-13));
    CHECK_THAT(m.b.imag(), Catch::Matchers::WithinAbs(0, 1e-14));

    Xoshiro256 rng(21);
    for (int k = 0; k < 200; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const HPoint p = geodesic_point(c, rng.uniform(-2, 2));
        CHECK_THAT(p.m.det(), Catch::Matchers::WithinAbs(1.0, 1e-10));
        CHECK(p.m.trace() > 0);
    }
    // unit speed in t
    for (int k = 0; k < 50; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const double t0 = rng.uniform(-1, 1), t1 = rng.uniform(-1, 1);
        CHECK_THAT(hyperbolic_distance(geodesic_point(c, t0), geodesic_point(c, t1)),
                   Catch::Matchers::WithinAbs(std::abs(t1 - t0), 1e-9));
    }
}

TEST_CASE("chart boundary is rejected") {
    CHECK_THROWS_AS(GeodesicCoord(1, -1), chart_error);  // 1 + mu1 conj(mu2) = 0
    CHECK_THROWS_AS(geodesic_point(GeodesicCoord(1, -1 + 1e-12, false), 0.0), chart_error);
}

TEST_CASE("endpoints and inverse") {
    const auto [gp0, gm0] = endpoints(GeodesicCoord(0, 0));
    CHECK(gp0.infinite);
    CHECK(gm0.z == complexd(0));

    const auto [gp1, gm1] = endpoints(GeodesicCoord(complexd(0, 1), 0));
    CHECK(gp1.infinite);
    CHECK(gm1.z == complexd(0, -1));

    CHECK_THROWS_AS(coords_from_endpoints(ExtComplex::finite(complexd(0.3, 0.1)),
                                          ExtComplex::finite(complexd(0.3, 0.1))),
                    contract_error);
    CHECK_THROWS_AS(coords_from_endpoints(ExtComplex::finite(0), ExtComplex::finite(1)),
                    chart_error);
    CHECK_THROWS_AS(coords_from_endpoints(ExtComplex::finite(1), ExtComplex::inf()), chart_error);

    Xoshiro256 rng(22);
    for (int k = 0; k < 1000; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const auto [gp, gm] = endpoints(c);
        const GeodesicCoord back = coords_from_endpoints(gp, gm);
        CHECK(std::abs(back.mu1 - c.mu1) < 1e-12 * std::max(1.0, std::abs(c.mu1)));
        CHECK(std::abs(back.mu2 - c.mu2) < 1e-12 * std::max(1.0, std::abs(c.mu2)));
    }
}

TEST_CASE("coords of a ray") {
    // (sigma0, sigma3) -> (0,0)
    const GeodesicCoord c0 = coords_of_ray(UnitTangent(HPoint(), HermMat::sigma3()));
    CHECK(std::abs(c0.mu1) < 1e-14);
    CHECK(std::abs(c0.mu2) < 1e-14);

    // orientation reversal leaves chart U
    CHECK_THROWS_AS(coords_of_ray(UnitTangent(HPoint(), -HermMat::sigma3())), chart_error);

    // round trip through geodesic_ray_of
    Xoshiro256 rng(23);
    for (int k = 0; k < 300; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const UnitTangent ray = geodesic_ray_of(c, rng.uniform(-1, 1));
        const GeodesicCoord back = coords_of_ray(ray);
        const double scale = std::max(1.0, std::abs(c.mu1));
        CHECK(std::abs(back.mu1 - c.mu1) < 1e-8 * scale);
        CHECK(std::abs(back.mu2 - c.mu2) < 1e-8 * std::max(1.0, std::abs(c.mu2)));
        // the base point lies on the reconstructed geodesic
        const UnitTangent rec = geodesic_ray_of(back, 0.0);
        const double ac = -minkowski_inner(rec.p.m, ray.p.m);
        const double bc = -minkowski_inner(rec.v, ray.p.m);
        CHECK(std::sqrt(std::max(ac * ac - bc * bc, 1.0)) - 1.0 < 1e-8);
    }
}

TEST_CASE("metric values") {
    const GeodesicCoord o(0, 0);
    const TangentLH x11{o, 1, 1};
    CHECK_THAT(eval_metric(x11).gr(), Catch::Matchers::WithinAbs(4.0, 1e-15));
    CHECK_THAT(eval_metric(x11).gi(), Catch::Matchers::WithinAbs(0.0, 1e-15));

    const TangentLH x1i{o, 1, complexd(0, 1)};
    CHECK_THAT(eval_metric(x1i).gr(), Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(eval_metric(x1i).gi(), Catch::Matchers::WithinAbs(-4.0, 1e-15));

    const GeodesicCoord i1(complexd(0, 1), 1);
    const TangentLH y{i1, 1, 1};
    CHECK_THAT(eval_metric(y).gr(), Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(eval_metric(y).gi(), Catch::Matchers::WithinAbs(-2.0, 1e-15));

    CHECK_THROWS_AS(eval_metric(x11, y), contract_error);  // base mismatch

    // g_theta decomposition is exact
    Xoshiro256 rng(24);
    for (int k = 0; k < 100; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const TangentLH u{c, rng.cnormal(), rng.cnormal()};
        const MetricValue g = eval_metric(u);
        const double th = rng.uniform(0, 6.283);
        CHECK(g.g_theta(th) == std::cos(th) * g.gr() + std::sin(th) * g.gi());
        CHECK(g.g_theta(0) == g.gr());
    }
}

TEST_CASE("J and P structures") {
    Xoshiro256 rng(25);
    for (int k = 0; k < 200; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const TangentLH x{c, rng.cnormal(), rng.cnormal()};
        const TangentLH y{c, rng.cnormal(), rng.cnormal()};

        const TangentLH jjx = apply_J(apply_J(x));
        CHECK(std::abs(jjx.dmu1 + x.dmu1) < 1e-15);
        CHECK(std::abs(jjx.dmu2 + x.dmu2) < 1e-15);
        const TangentLH ppx = apply_P(apply_P(x));
        CHECK(std::abs(ppx.dmu1 - x.dmu1) == 0.0);
        CHECK(std::abs(ppx.dmu2 - x.dmu2) == 0.0);

        // G_theta(P.,P.) = -G_theta(.,.) and G(J.,J.) = G(.,.)
        const complexd g = eval_metric(x, y).g;
        CHECK(std::abs(eval_metric(apply_P(x), apply_P(y)).g + g) <
              1e-13 * std::max(1.0, std::abs(g)));
        CHECK(std::abs(eval_metric(apply_J(x), apply_J(y)).g - g) <
              1e-13 * std::max(1.0, std::abs(g)));
    }
}

TEST_CASE("Kaehler and para-Kaehler forms") {
    const TangentLH h1 = homogeneous_to_coords({1, 0});
    const TangentLH v1 = homogeneous_to_coords({0, 1});

    // antisymmetry
    const auto [ojx, opx] = form_values(h1, h1);
    CHECK(ojx == 0.0);
    CHECK(opx == 0.0);

    // values on (h_1, v_1): the coordinate formulas give (4, -4); the paper's
    // proof prints (2, -2) but that contradicts its own metric formula
    const auto [oj, op] = form_values(h1, v1);
    CHECK_THAT(oj, Catch::Matchers::WithinAbs(4.0, 1e-14));
    CHECK_THAT(op, Catch::Matchers::WithinAbs(-4.0, 1e-14));

    // omega_J = -omega_P on 1000 random pairs, antisymmetric in the arguments
    Xoshiro256 rng(26);
    for (int k = 0; k < 1000; ++k) {
        const GeodesicCoord c = random_chart_coord(rng);
        const TangentLH x{c, rng.cnormal(), rng.cnormal()};
        const TangentLH y{c, rng.cnormal(), rng.cnormal()};
        const auto [a, b] = form_values(x, y);
        CHECK(std::abs(a + b) < 1e-12 * std::max(1.0, std::abs(a)));
        const auto [ar, br] = form_values(y, x);
        CHECK(std::abs(a + ar) < 1e-12 * std::max(1.0, std::abs(a)));
        CHECK(std::abs(b + br) < 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("Moebius action on LH3") {
    const MoebiusMap a(2.0, 0, 0, 0.5);
    const GeodesicCoord img = moebius_on_LH(a, GeodesicCoord(1, 1));
    CHECK_THAT(img.mu1.real(), Catch::Matchers::WithinAbs(4.0, 1e-14));
    CHECK_THAT(img.mu2.real(), Catch::Matchers::WithinAbs(0.25, 1e-14));

    const GeodesicCoord fix = moebius_on_LH(MoebiusMap(), GeodesicCoord(0.3, complexd(0, 0.2)));
    CHECK(std::abs(fix.mu1 - complexd(0.3)) < 1e-15);
    CHECK(std::abs(fix.mu2 - complexd(0, 0.2)) < 1e-15);

    Xoshiro256 rng(27);
    int done = 0;
    while (done < 200) {
        const MoebiusMap m = random_sl2(rng);
        const GeodesicCoord c = random_chart_coord(rng);
        try {
            const GeodesicCoord ci = moebius_on_LH(m, c);

            // endpoints transform by the boundary Moebius map
            const auto [gp, gm] = endpoints(c);
            const auto [gpi, gmi] = endpoints(ci);
            if (!gp.infinite && !gpi.infinite && std::abs(m.a21 * gp.z + m.a22) > 1e-2) {
                CHECK(std::abs(gpi.z - m.boundary(gp.z)) <
                      1e-8 * std::max(1.0, std::abs(gpi.z)));
            }
            if (!gmi.infinite && std::abs(m.a21 * gm.z + m.a22) > 1e-2) {
                CHECK(std::abs(gmi.z - m.boundary(gm.z)) <
                      1e-8 * std::max(1.0, std::abs(gmi.z)));
            }

            // compatible with act_isometry: transformed points stay on the
            // image geodesic (the parametrization slides, the locus agrees)
            const HPoint p = geodesic_point(c, 0.4);
            const HPoint q = act_isometry(m, p);
            const UnitTangent rec = geodesic_ray_of(ci, 0.0);
            const double ac = -minkowski_inner(rec.p.m, q.m);
            const double bc = -minkowski_inner(rec.v, q.m);
            CHECK(std::sqrt(std::max(ac * ac - bc * bc, 1.0)) - 1.0 < 1e-8);
        } catch (const chart_error&) {
            continue;
        }
        ++done;
    }
}

TEST_CASE("metric invariance under the action") {
    CHECK(verify_metric_invariance(7, 100) < 1e-8);
}

TEST_CASE("homogeneous tangents and the Killing form") {
    const TangentLH h1 = homogeneous_to_coords({1, 0});
    CHECK(h1.dmu1 == complexd(-1));
    CHECK(h1.dmu2 == complexd(1));
    const TangentLH v1 = homogeneous_to_coords({0, 1});
    CHECK(v1.dmu1 == complexd(1));
    CHECK(v1.dmu2 == complexd(1));
    CHECK_THAT(eval_metric(h1).gr(), Catch::Matchers::WithinAbs(-4.0, 1e-15));

    CHECK(killing_form({1, 0}, {1, 0}) == complexd(4));
    CHECK(killing_form({0, 1}, {0, 1}) == complexd(-4));
    CHECK(killing_form({1, 1}, {1, 1}) == complexd(0));

    Xoshiro256 rng(28);
    for (int k = 0; k < 200; ++k) {
        const HomogeneousTangent X{rng.cnormal(), rng.cnormal()};
        const complexd diag = killing_form(X, X);
        const double expect_r = 4.0 * (std::norm(X.xi) - std::norm(X.eta));
        const double expect_i = 8.0 * std::imag(X.xi * std::conj(X.eta));
        CHECK_THAT(diag.real(), Catch::Matchers::WithinAbs(expect_r, 1e-12));
        CHECK_THAT(diag.imag(), Catch::Matchers::WithinAbs(expect_i, 1e-12));
    }
}

TEST_CASE("verify_BG") {
    const BGReport rep = verify_BG(5, 64);
    INFO("metric dev " << rep.max_metric_deviation << ", fd dev " << rep.max_coord_fd_deviation);
    CHECK(rep.passed);
    CHECK(rep.max_metric_deviation < 1e-6);
    CHECK(rep.max_coord_fd_deviation < 1e-6);
}

TEST_CASE("verify_symplectic") {
    const SymplecticReport rep = verify_symplectic(6, 1000, 24);
    INFO("antisym " << rep.max_jp_antisym << ", dTheta dev " << rep.max_dtheta_deviation);
    CHECK(rep.passed);
    CHECK(rep.max_jp_antisym < 1e-12);
    CHECK(rep.max_dtheta_deviation < 1e-5);

    // the canonical form lands on omega_P: check the (h_1, v_1) value directly
    const double dt = detail::dtheta_fd({1, 0}, {0, 1});
    CHECK_THAT(dt, Catch::Matchers::WithinAbs(-4.0, 1e-6));
}

TEST_CASE("standard embedding is isometric onto the round sphere") {
    CHECK(verify_standard_embedding(8, 100) < 1e-10);
}
