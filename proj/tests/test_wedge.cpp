#include "wedgescatter/wedge.hpp"
#include "wedgescatter/fit.hpp"

#include "doctest.h"

#include <cmath>

using namespace ws;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<long>(v.size()));
    long i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

FourVector fv(std::initializer_list<double> v) { return FourVector(vec(v)); }

LorentzTransform random_lorentz(int dim, Rng& rng) {
    std::vector<LorentzTransform> factors;
    factors.push_back(lorentz_boost(dim, 1, rng.uniform(-1.2, 1.2)));
    if (dim >= 3) {
        factors.push_back(lorentz_rotation(dim, 1, 2, rng.uniform(0.0, 2.0 * M_PI)));
        factors.push_back(lorentz_boost(dim, 2, rng.uniform(-0.8, 0.8)));
    }
    return lorentz_compose(factors);
}

FourVector random_wr_point(int dim, Rng& rng) {
    Vec y(dim);
    y[1] = std::exp(rng.uniform(-1.0, 1.2));
    y[0] = rng.uniform(-0.85, 0.85) * y[1];
    for (int a = 2; a < dim; ++a) y[a] = rng.uniform(-2.0, 2.0);
    return FourVector(y);
}

}  // namespace

TEST_CASE("right wedge membership") {
    const Wedge wr = Wedge::right(3);
    CHECK(wr.contains(fv({0, 1, 0})));
    CHECK_FALSE(wr.contains(fv({1, 1, 0})));  // boundary |t| = x^1 excluded
    CHECK_FALSE(wr.contains(fv({0, -1, 0})));
    CHECK_FALSE(wr.contains(fv({2, 1, 5})));
}

TEST_CASE("boosted wedge reproduces the tilted membership inequality") {
    const double beta = 0.8;
    const Wedge w(lorentz_boost(3, 2, beta), fv({0, 0, 0}));
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const FourVector p = fv({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
        const bool expect =
            std::abs(std::cosh(beta) * p.c[0] - std::sinh(beta) * p.c[2]) < p.c[1];
        CHECK(w.contains(p) == expect);
    }
}

TEST_CASE("causal complement flips the defining inequality") {
    const Wedge wr = Wedge::right(3);
    const Wedge wc = wr.complement();
    CHECK(wc.contains(fv({0, -1, 0})));
    CHECK_FALSE(wc.contains(fv({0, 1, 0})));

    Rng rng(7);
    SUBCASE("complement membership is the reflected membership") {
        const Wedge w(random_lorentz(3, rng), fv({0.2, -0.1, 0.4}));
        const Wedge wp = w.complement();
        const Wedge w_centered = w.centered();
        const Wedge wp_centered = wp.centered();
        for (int i = 0; i < 2000; ++i) {
            const FourVector p = fv({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
            CHECK(wp_centered.contains(p) == w_centered.contains(-p));
        }
    }

    SUBCASE("involution in d = 3 and d = 2") {
        const Wedge w3(random_lorentz(3, rng), fv({0.3, 0.1, -0.2}));
        const Wedge w3cc = w3.complement().complement();
        for (int i = 0; i < 2000; ++i) {
            const FourVector p = fv({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
            CHECK(w3.contains(p) == w3cc.contains(p));
        }
        const Wedge w2(lorentz_boost(2, 1, 0.4), fv({0.1, 0.2}));
        const Wedge w2cc = w2.complement().complement();
        CHECK(w2cc.complemented() == w2.complemented());
        for (int i = 0; i < 500; ++i) {
            const FourVector p = fv({rng.uniform(-3, 3), rng.uniform(-3, 3)});
            CHECK(w2.contains(p) == w2cc.contains(p));
        }
    }

    SUBCASE("disjointness of wedge and complement") {
        const Wedge w(random_lorentz(3, rng), fv({0.1, 0.5, -0.3}));
        const Wedge wp = w.complement();
        for (int i = 0; i < 3000; ++i) {
            const FourVector p = fv({rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)});
            const bool in_both = w.contains(p) && wp.contains(p);
            CHECK_FALSE(in_both);
        }
    }
}

TEST_CASE("uprightness") {
    CHECK(Wedge::right(3).is_upright());
    CHECK(Wedge::right(2).is_upright());
    CHECK_FALSE(Wedge(lorentz_boost(3, 2, 0.5), fv({0, 0, 0})).is_upright());

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const LorentzTransform r = lorentz_rotation(3, 1, 2, rng.uniform(0.0, 2.0 * M_PI));
        const Wedge w(r, fv({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
        CHECK(w.is_upright());
        // invariant under translation and under stabilizer right-composition
        CHECK(w.translated(fv({1, 2, 3})).is_upright());
        const LorentzTransform stab =
            lorentz_boost(3, 1, rng.uniform(-1, 1));  // x^1 boosts stabilize W_r
        CHECK(Wedge(r * stab, w.translation()).is_upright());
    }
    // d = 4: rotation fixing x^1 also stabilizes, keeps uprightness
    const Wedge w4(lorentz_rotation(4, 2, 3, 0.7), FourVector(Vec(Vec::Zero(4))));
    CHECK(w4.is_upright());
    CHECK_FALSE(Wedge(lorentz_boost(4, 3, 0.3), FourVector(Vec(Vec::Zero(4)))).is_upright());
}

TEST_CASE("precursor order basics") {
    const Wedge wr = Wedge::right(3);
    const RegionSample o1 = RegionSample::general({fv({1, -1, 0})});
    const RegionSample o2 = RegionSample::general({fv({1, 1, 0})});
    CHECK(precursor_order(o1, o2, wr));        // difference (0, 2, 0) in W_r
    CHECK_FALSE(precursor_order(o2, o1, wr));  // reversed order fails

    const RegionSample empty = RegionSample::general({});
    CHECK(precursor_order(empty, o1, wr));  // vacuously true
    CHECK(precursor_order(o1, empty, wr));
}

TEST_CASE("precursor order is Poincare covariant") {
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const Wedge w(random_lorentz(3, rng), fv({rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                  rng.uniform(-1, 1)}));
        std::vector<FourVector> p1, p2;
        for (int k = 0; k < 3; ++k) {
            p1.push_back(fv({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}));
            p2.push_back(fv({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}));
        }
        const RegionSample o1 = RegionSample::general(p1);
        const RegionSample o2 = RegionSample::general(p2);

        const PoincareElement lam(random_lorentz(3, rng),
                                  fv({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
        std::vector<FourVector> q1, q2;
        for (const auto& p : p1) q1.push_back(lam * p);
        for (const auto& p : p2) q2.push_back(lam * p);

        const bool before = precursor_order(o1, o2, w);
        const bool after = precursor_order(RegionSample::general(q1), RegionSample::general(q2),
                                           w.transformed(lam));
        CHECK(before == after);
    }
}

TEST_CASE("precursor order is transitive and anti-symmetric on samples") {
    Rng rng(15);
    const Wedge wr = Wedge::right(3);
    int ordered_triples = 0;
    for (int i = 0; i < 3000; ++i) {
        const RegionSample a = RegionSample::general({random_wr_point(3, rng) * -1.0});
        const RegionSample b = RegionSample::general(
            {fv({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)})});
        const RegionSample c = RegionSample::general({random_wr_point(3, rng)});
        if (precursor_order(a, b, wr) && precursor_order(b, c, wr)) {
            ++ordered_triples;
            CHECK(precursor_order(a, c, wr));
        }
        if (precursor_order(a, b, wr)) CHECK_FALSE(precursor_order(b, a, wr));
    }
    CHECK(ordered_triples > 50);  // the witness set must not be vacuous
}

TEST_CASE("centered wedges are convex cones") {
    Rng rng(19);
    const Wedge w(random_lorentz(3, rng), fv({0, 0, 0}));
    for (int i = 0; i < 2000; ++i) {
        const FourVector p = w.lorentz() * random_wr_point(3, rng);
        const FourVector q = w.lorentz() * random_wr_point(3, rng);
        CHECK(w.contains(p + q));
        CHECK(w.contains(p * rng.uniform(0.1, 5.0)));
    }
}

TEST_CASE("quasi-totality witness") {
    const Wedge wr = Wedge::right(3);
    auto vs = [](double v1) { return RegionSample::velocity_points({vec({v1, 0.0})}); };

    SUBCASE("separated pairs give both") {
        CHECK(quasi_total_witness(vs(0.5), vs(-0.5), vs(0.6), vs(-0.6), wr) ==
              QuasiTotalOutcome::Both);
    }
    SUBCASE("degenerate repeat of the same pair gives both") {
        CHECK(quasi_total_witness(vs(0.5), vs(-0.5), vs(0.5), vs(-0.5), wr) ==
              QuasiTotalOutcome::Both);
    }
    SUBCASE("interleaved pairs give a single side") {
        // V1 = 0.5, V2 = -0.5; V1' = 0.7, V2' = 0.6: V2' prec V1 fails,
        // V2 prec V1' holds.
        CHECK(quasi_total_witness(vs(0.5), vs(-0.5), vs(0.7), vs(0.6), wr) ==
              QuasiTotalOutcome::Second);
        CHECK(quasi_total_witness(vs(0.7), vs(0.6), vs(0.5), vs(-0.5), wr) ==
              QuasiTotalOutcome::First);
    }
    SUBCASE("preconditions are enforced and distinct from violations") {
        CHECK_THROWS_AS(quasi_total_witness(vs(-0.5), vs(0.5), vs(0.6), vs(-0.6), wr),
                        std::invalid_argument);
        const Wedge tilted(lorentz_boost(3, 2, 0.4), fv({0, 0, 0}));
        CHECK_THROWS_AS(quasi_total_witness(vs(0.5), vs(-0.5), vs(0.6), vs(-0.6), tilted),
                        std::invalid_argument);
        // the unchecked decision on deliberately disordered data aborts
        CHECK_THROWS_AS(quasi_total_outcome_unchecked(vs(-0.5), vs(0.5), vs(-0.5), vs(0.5), wr),
                        InvariantViolation);
    }
}

TEST_CASE("quasi-totality never falsified over random upright configurations") {
    Rng rng(21);
    for (int i = 0; i < 10000; ++i) {
        const LorentzTransform rot = lorentz_rotation(3, 1, 2, rng.uniform(0.0, 2.0 * M_PI));
        const Wedge w(rot, fv({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));

        // generate ordered pairs along the rotated wedge direction
        const Vec e1 = rot.matrix().block(1, 1, 2, 2).col(0);
        auto sample_pair = [&](RegionSample& fast, RegionSample& slow) {
            const double gap = rng.uniform(0.05, 0.6);
            const double base = rng.uniform(-0.3, 0.3);
            std::vector<Vec> vf, vsl;
            for (int k = 0; k < 3; ++k) {
                const Vec perp = vec({-e1[1], e1[0]});
                vf.push_back(Vec((base + gap + rng.uniform(0.0, 0.2)) * e1 +
                                 rng.uniform(-0.2, 0.2) * perp));
                vsl.push_back(Vec((base - rng.uniform(0.0, 0.2)) * e1 +
                                  rng.uniform(-0.2, 0.2) * perp));
            }
            fast = RegionSample::velocity_points(vf);
            slow = RegionSample::velocity_points(vsl);
        };
        RegionSample v1, v2, v1p, v2p;
        sample_pair(v1, v2);
        sample_pair(v1p, v2p);
        if (!precursor_order(v2, v1, w) || !precursor_order(v2p, v1p, w)) continue;
        CHECK_NOTHROW(quasi_total_witness(v1, v2, v1p, v2p, w));
    }
}

TEST_CASE("forbidden region measure") {
    const Box2 box{-1.0, 1.0, -1.0, 1.0};

    SUBCASE("beta = 0 leaves a null set") {
        CHECK(forbidden_region_measure(0.0, box, 100000, 42) <= 1e-3);
    }
    SUBCASE("matches the square closed form within Monte Carlo error") {
        for (double beta : {0.4, 1.0, 1.7}) {
            const std::int64_t n = 200000;
            const double est = forbidden_region_measure(beta, box, n, 7);
            const double exact = forbidden_region_square_fraction(beta);
            const double se = std::sqrt(exact * (1.0 - exact) / n);
            CHECK(std::abs(est - exact) <= 4.0 * se + 1e-12);
        }
    }
    SUBCASE("monotone in |beta| and symmetric under beta -> -beta") {
        const double a = forbidden_region_measure(0.3, box, 50000, 11);
        const double b = forbidden_region_measure(0.8, box, 50000, 11);
        const double c = forbidden_region_measure(1.6, box, 50000, 11);
        CHECK(a < b);
        CHECK(b < c);
        CHECK(forbidden_region_measure(0.8, box, 50000, 11) ==
              forbidden_region_measure(-0.8, box, 50000, 11));
    }
    SUBCASE("reproducible for a fixed seed, rejects bad input") {
        CHECK(forbidden_region_measure(0.5, box, 10000, 3) ==
              forbidden_region_measure(0.5, box, 10000, 3));
        CHECK_THROWS_AS(forbidden_region_measure(0.5, Box2{1, -1, 0, 1}, 10000, 3),
                        std::invalid_argument);
        CHECK_THROWS_AS(forbidden_region_measure(0.5, box, 10, 3), std::invalid_argument);
    }
}

TEST_CASE("stabilizer factorization") {
    SUBCASE("pure boost and pure rotation") {
        const auto fb = stabilizer_factorize(lorentz_boost(4, 1, 0.9));
        CHECK(fb.rapidity == doctest::Approx(0.9));
        CHECK(fb.rotation.matrix().isIdentity(1e-12));
        const auto fr = stabilizer_factorize(lorentz_rotation(4, 2, 3, 1.1));
        CHECK(fr.rapidity == doctest::Approx(0.0));
        CHECK((fr.rotation.matrix() - lorentz_rotation(4, 2, 3, 1.1).matrix()).norm() <= 1e-12);
    }
    SUBCASE("round trip on random products") {
        Rng rng(25);
        for (int i = 0; i < 100; ++i) {
            const double beta = rng.uniform(-1.5, 1.5);
            const double ang = rng.uniform(0.0, 2.0 * M_PI);
            const LorentzTransform L =
                lorentz_boost(4, 1, beta) * lorentz_rotation(4, 2, 3, ang);
            const auto f = stabilizer_factorize(L);
            CHECK(f.rapidity == doctest::Approx(beta).epsilon(1e-10));
            const Mat recon = lorentz_boost(4, 1, f.rapidity).matrix() * f.rotation.matrix();
            CHECK((recon - L.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("rejects non-stabilizers") {
        CHECK_THROWS_AS(stabilizer_factorize(lorentz_boost(3, 2, 0.5)), std::invalid_argument);
        CHECK_THROWS_AS(stabilizer_factorize(lorentz_rotation(3, 1, 2, 0.3)),
                        std::invalid_argument);
    }
}

TEST_CASE("L*(W) membership and representatives") {
    Rng rng(27);
    const LorentzTransform L = random_lorentz(3, rng);
    const Wedge w(L, fv({0.3, -0.2, 0.1}));
    CHECK(lstar_member(L, w));
    CHECK(lstar_member(L * lorentz_boost(3, 1, 0.7), w));  // stabilizer freedom
    CHECK_FALSE(lstar_member(L * lorentz_boost(3, 2, 0.7), w));

    const auto rep = lstar_representative(w.complement());
    REQUIRE(rep.has_value());
    CHECK(lstar_member(*rep, w.complement()));

    const Wedge w2 = Wedge::right(2).complement();
    CHECK_FALSE(lstar_representative(w2).has_value());
}

TEST_CASE("separation threshold certificates") {
    const Wedge wr = Wedge::right(3);
    const Wedge wperp = wr.complement();
    auto vsupport = [](double lo, double hi) {
        return RegionSample::velocity_points({vec({lo, 0.1}), vec({lo, -0.1}), vec({hi, 0.1}),
                                              vec({hi, -0.1})});
    };

    SUBCASE("centered pair has tau* = 0 and positive eps") {
        const auto cert = separation_threshold(vsupport(0.3, 0.5), vsupport(-0.5, -0.3), wr,
                                               wperp);
        CHECK(cert.epsilon > 0.0);
        CHECK(cert.delta_max == doctest::Approx(cert.epsilon / 3.0));
        CHECK(cert.tau_star == 0.0);
    }
    SUBCASE("translated wedges give the 3(|x1|+|x2|)/eps threshold") {
        const Wedge wt = wr.translated(fv({0.1, 0.6, 0.0}));
        const Wedge wpt = wperp.translated(fv({0.0, -0.4, 0.3}));
        const auto cert = separation_threshold(vsupport(0.3, 0.5), vsupport(-0.5, -0.3), wt,
                                               wpt);
        const double num = cone_norm(wt.translation()) + cone_norm(wpt.translation());
        CHECK(cert.tau_star == doctest::Approx(3.0 * num / cert.epsilon));
    }
    SUBCASE("eps shrinks monotonically as the gap closes") {
        double prev = 1e9;
        for (double gap : {0.4, 0.2, 0.1, 0.05}) {
            const auto cert =
                separation_threshold(vsupport(gap, gap + 0.2), vsupport(-0.5, -0.3), wr, wperp);
            CHECK(cert.epsilon < prev);
            prev = cert.epsilon;
        }
    }
    SUBCASE("ordering violations and bad opposite wedges are rejected") {
        CHECK_THROWS_AS(
            separation_threshold(vsupport(-0.5, -0.3), vsupport(0.3, 0.5), wr, wperp),
            std::domain_error);
        CHECK_THROWS_AS(separation_threshold(vsupport(0.3, 0.5), vsupport(-0.5, -0.3), wr, wr),
                        std::invalid_argument);
    }
}
