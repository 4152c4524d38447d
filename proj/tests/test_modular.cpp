#include "wedgescatter/modular.hpp"
#include "wedgescatter/fit.hpp"

#include "doctest.h"

#include <cmath>

using namespace ws;

namespace {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

Eigen::VectorXcd vec_of(const CMat& x) {
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

// Real 2n^2 x 2n^2 matrix of an antilinear map on coefficient matrices.
RMat real_matrix_of_antilinear(const std::function<CMat(const CMat&)>& op, int n) {
    const int m = n * n;
    RMat out(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        CMat basis = CMat::Zero(n, n);
        basis(j % n, j / n) = 1.0;  // column-major to match vec_of
        const Eigen::VectorXcd real_img = vec_of(op(basis));
        const Eigen::VectorXcd imag_img = vec_of(op(Complex(0, 1) * basis));
        for (int i = 0; i < m; ++i) {
            out(i, j) = real_img[i].real();
            out(i + m, j) = real_img[i].imag();
            out(i, j + m) = imag_img[i].real();
            out(i + m, j + m) = imag_img[i].imag();
        }
    }
    return out;
}

}  // namespace

TEST_CASE("tracial vector gives trivial modular data") {
    const auto alg = FiniteVNAlgebra::random(3, 101);
    const auto mod = tomita_operator(alg, CyclicVector::tracial(3));

    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        CMat x(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) x(r, c) = Complex(rng.normal(), rng.normal());
        CHECK((mod.delta_power(x, 1.0) - x).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((mod.conjugation_J(x) - x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    // J (a (x) 1) J = 1 (x) conj(a): right multiplier a^*
    for (const auto& a : alg.generators)
        CHECK((mod.jmj_right_multiplier(a) - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("n = 2 Schmidt weights reproduce the known Delta spectrum") {
    const double p = 0.3;
    CMat omega = CMat::Zero(2, 2);
    omega(0, 0) = std::sqrt(p);
    omega(1, 1) = std::sqrt(1.0 - p);
    const auto alg = FiniteVNAlgebra::random(2, 55);
    const auto mod = tomita_operator(alg, CyclicVector::from_matrix(omega));

    // brute-force oracle: build S from the defining relation on the doubled
    // space, then diagonalize S^T S
    const RMat s_real =
        real_matrix_of_antilinear([&](const CMat& x) { return mod.tomita_S(x); }, 2);
    Eigen::SelfAdjointEigenSolver<RMat> eig(RMat(s_real.transpose() * s_real));
    RVec got = eig.eigenvalues();
    std::sort(got.data(), got.data() + got.size());

    std::vector<double> expect = {p / (1 - p), (1 - p) / p, 1.0, 1.0};
    std::sort(expect.begin(), expect.end());
    // real representation doubles each eigenvalue
    REQUIRE(got.size() == 8);
    for (int i = 0; i < 4; ++i) {
        CHECK(got[2 * i] == doctest::Approx(expect[i]).epsilon(1e-10));
        CHECK(got[2 * i + 1] == doctest::Approx(expect[i]).epsilon(1e-10));
    }

    // and the closed-form Delta action agrees with the brute-force matrix
    Rng rng(2);
    CMat x(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) x(r, c) = Complex(rng.normal(), rng.normal());
    const CMat via_closed = mod.delta_power(x, 1.0);
    // Delta = S* S evaluated through the real matrix
    Eigen::VectorXd xr(8);
    xr << vec_of(x).real(), vec_of(x).imag();
    const Eigen::VectorXd dx = s_real.transpose() * (s_real * xr);
    CMat brute(2, 2);
    for (int i = 0; i < 4; ++i) brute(i % 2, i / 2) = Complex(dx[i], dx[i + 4]);
    CHECK((brute - via_closed).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("defining relation and polar identities on random instances") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto alg = FiniteVNAlgebra::random(n, 1000 + seed);
        const auto omega = CyclicVector::random(n, 2000 + seed);
        const auto mod = tomita_operator(alg, omega);

        for (const auto& a : alg.generators) {
            const CMat lhs = mod.tomita_S(a * omega.coeff);
            const CMat rhs = a.adjoint() * omega.coeff;
            CHECK((lhs - rhs).norm() <= 1e-10);
        }
        // S = J Delta^{1/2}
        Rng rng(3000 + seed);
        CMat x(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) x(r, c) = Complex(rng.normal(), rng.normal());
        const CMat via_polar = mod.conjugation_J(mod.delta_power(x, 0.5));
        CHECK((via_polar - mod.tomita_S(x)).cwiseAbs().maxCoeff() <= 1e-10);

        // fixed points and J^2 = 1
        CHECK((mod.delta_power(omega.coeff, 1.0) - omega.coeff).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((mod.conjugation_J(omega.coeff) - omega.coeff).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((mod.conjugation_J(mod.conjugation_J(x)) - x).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("omega must be separating") {
    CMat singular = CMat::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(CyclicVector::from_matrix(singular), std::invalid_argument);
}

TEST_CASE("duality residuals stay below 1e-10") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto mod = tomita_operator(FiniteVNAlgebra::random(n, 40 + seed),
                                         CyclicVector::random(n, 90 + seed));
        const auto rep = verify_duality(mod);
        CHECK(rep.max_commutant_residual <= 1e-10);
        CHECK(rep.max_flow_residual <= 1e-9);
    }
}

TEST_CASE("swap partner") {
    SUBCASE("identity swaps to identity") {
        const auto mod =
            tomita_operator(FiniteVNAlgebra::random(3, 7), CyclicVector::random(3, 8));
        const CMat bt = swap_partner_right_multiplier(CMat(CMat::Identity(3, 3)), mod);
        CHECK((bt - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("tracial case is exact") {
        const auto alg = FiniteVNAlgebra::random(3, 9);
        const auto mod = tomita_operator(alg, CyclicVector::tracial(3));
        CMat a = alg.generators[2];
        a = 0.5 * (a + a.adjoint());
        const CMat bt = swap_partner_right_multiplier(a, mod);
        CHECK((bt - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        const CMat lhs = left_action_on_omega(a, mod);
        const CMat rhs = right_action_on_omega(bt, mod);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("random instances swap with small residual, oracle cross-check") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const int n = 2 + static_cast<int>(seed % 3);
            const auto alg = FiniteVNAlgebra::random(n, 500 + seed);
            const auto mod = tomita_operator(alg, CyclicVector::random(n, 700 + seed));

            CMat a = alg.generators[0];
            if (seed % 2 == 0) a = 0.5 * (a + a.adjoint());  // alternate hermitian / general
            const CMat bt = swap_partner_right_multiplier(a, mod);

            const CMat swap_resid = left_action_on_omega(a, mod) - right_action_on_omega(bt, mod);
            CHECK(swap_resid.cwiseAbs().maxCoeff() <= 1e-9);

            // independent route: J Delta^{1/2} (a (x) 1) Delta^{-1/2} J through
            // the doubled-space actions. The J-conjugation is antilinear, so
            // the comparison runs over the hermitian halves separately.
            const CMat a1 = 0.5 * (a + a.adjoint());
            const CMat a2 = Complex(0, -0.5) * (a - a.adjoint());
            const CMat bt1 = swap_partner_right_multiplier(a1, mod);
            const CMat bt2 = swap_partner_right_multiplier(a2, mod);
            CHECK((bt - bt1 - Complex(0, 1) * bt2).cwiseAbs().maxCoeff() <= 1e-10);
            for (const CMat* part : {&a1, &a2}) {
                const CMat& h = *part;
                const CMat bth = swap_partner_right_multiplier(h, mod);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        CMat e = CMat::Zero(n, n);
                        e(i, j) = 1.0;
                        const CMat via_def = mod.conjugation_J(mod.delta_power(
                            h * mod.delta_power(mod.conjugation_J(e), -0.5), 0.5));
                        CHECK((via_def - e * bth).cwiseAbs().maxCoeff() <= 1e-8);
                    }
            }
        }
    }
    SUBCASE("ill-conditioned omega is refused until regularized") {
        CMat skew = CMat::Zero(2, 2);
        skew(0, 0) = 1.0;
        skew(1, 1) = 3e-8;
        skew(0, 1) = 0.2;
        const auto alg = FiniteVNAlgebra::random(2, 77);
        const auto mod = tomita_operator(alg, CyclicVector::from_matrix(skew));
        CMat a = alg.generators[0];
        a = 0.5 * (a + a.adjoint());
        CHECK_THROWS_AS(swap_partner_right_multiplier(a, mod), std::domain_error);

        const CMat a_delta = regularize(a, mod, 0.05);
        const CMat bt = swap_partner_right_multiplier(a_delta, mod);
        const CMat resid =
            left_action_on_omega(a_delta, mod) - right_action_on_omega(bt, mod);
        CHECK(resid.cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("regularization") {
    const auto alg = FiniteVNAlgebra::random(3, 11);
    const auto mod = tomita_operator(alg, CyclicVector::random(3, 12));
    const CMat a = alg.generators[0];

    SUBCASE("trivial flow leaves A untouched") {
        const auto tracial = tomita_operator(alg, CyclicVector::tracial(3));
        CHECK((regularize(a, tracial, 0.7) - a).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("A_delta Omega -> A Omega monotonically as delta -> 0") {
        const CMat target = left_action_on_omega(a, mod);
        double first = 0.0, prev = std::numeric_limits<double>::infinity();
        for (double delta : {1.0, 0.1, 0.01, 0.001}) {
            const double dist =
                (left_action_on_omega(regularize(a, mod, delta), mod) - target).norm();
            CHECK(dist < prev);
            if (delta == 1.0) first = dist;
            prev = dist;
        }
        CHECK(prev <= 0.05 * first);
    }
    SUBCASE("large delta kills off-diagonal entries in the eigenbasis") {
        Eigen::SelfAdjointEigenSolver<CMat> eig(mod.rho_left());
        const CMat in_basis =
            eig.eigenvectors().adjoint() * regularize(a, mod, 1e6) * eig.eigenvectors();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(std::abs(in_basis(i, j)) <= 1e-8);
    }
    SUBCASE("flow recenters the Gaussian average") {
        for (double t : {0.4, -1.3}) {
            const CMat lhs = mod.flow(regularize(a, mod, 0.3), t);
            const CMat rhs = regularize(mod.flow(a, t), mod, 0.3);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("delta must be positive") {
        CHECK_THROWS_AS(regularize(a, mod, 0.0), std::invalid_argument);
    }
}
