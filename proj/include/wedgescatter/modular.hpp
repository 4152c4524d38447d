#pragma once

// Finite-dimensional modular (Tomita-Takesaki) theory for the algebra
// M = {a (x) 1} acting on C^n (x) C^n, realizing the swapping relation
// A Omega = A^perp Omega and the Gaussian regularization A_delta.
//
// Vectors of the doubled space are kept as n x n coefficient matrices
// X, Psi = sum X_ij e_i (x) e_j. Then (a (x) 1) X = a X and (1 (x) b) X =
// X b^T. Antilinear operators are represented as conjugate-then-multiply
// maps, never as plain matrices.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ws {

using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// The left factor M = {a (x) 1} with a finite generator list used by the
/// verification suites. Generators must be closed under adjoints.
struct FiniteVNAlgebra {
    int n = 0;
    std::vector<CMat> generators;

    static FiniteVNAlgebra with_generators(std::vector<CMat> gens);
    /// Adjoint-closed random generator set (two general elements plus
    /// their adjoints and one hermitian element).
    static FiniteVNAlgebra random(int n, std::uint64_t seed);
};

/// Cyclic and separating vector: invertible coefficient matrix, unit norm.
struct CyclicVector {
    CMat coeff;

    static CyclicVector from_matrix(CMat m);
    static CyclicVector tracial(int n);
    /// Random invertible coefficient matrix, resampled until well
    /// conditioned, then normalized.
    static CyclicVector random(int n, std::uint64_t seed);

    int n() const { return static_cast<int>(coeff.rows()); }
};

/// Modular data of (M, Omega): S = J Delta^{1/2} with
///   S X = (Omega^*)^{-1} X^* Omega,
///   Delta X = rho_L X rho_R^{-1},  rho_L = Omega Omega^*, rho_R = Omega^* Omega,
///   J X = U X^* U with U the polar unitary of Omega = rho_L^{1/2} U.
/// Eigen-decompositions of rho_L, rho_R are cached for the flow.
class ModularObjects {
  public:
    ModularObjects(FiniteVNAlgebra algebra, CyclicVector omega);

    const FiniteVNAlgebra& algebra() const { return algebra_; }
    const CyclicVector& omega() const { return omega_; }

    CMat tomita_S(const CMat& x) const;
    CMat conjugation_J(const CMat& x) const;
    /// Delta^z for complex exponent z (z = 1, +-1/2, i tau all used).
    CMat delta_power(const CMat& x, std::complex<double> z) const;

    /// J (a (x) 1) J as an element of the commutant, returned through its
    /// right-multiplier: J (a(x)1) J X = X * b_t.
    CMat jmj_right_multiplier(const CMat& a) const;

    /// Modular flow on the left factor: Delta^{i tau} a Delta^{-i tau}.
    CMat flow(const CMat& a, double tau) const;

    /// Condition number of Delta^{1/2} (equals cond(rho_L)).
    double half_condition() const;

    const CMat& rho_left() const { return rho_left_; }
    const CMat& polar_unitary() const { return polar_unitary_; }

  private:
    FiniteVNAlgebra algebra_;
    CyclicVector omega_;
    CMat rho_left_, rho_right_;
    CMat polar_unitary_;
    Eigen::SelfAdjointEigenSolver<CMat> eig_left_, eig_right_;
};

/// Builds the modular data by extending S A Omega := A^* Omega antilinearly
/// over the spanning set {a Omega} and polar-decomposing. Throws
/// std::invalid_argument when omega is not separating (coefficient matrix
/// singular beyond 1e-10 relative).
ModularObjects tomita_operator(const FiniteVNAlgebra& m, const CyclicVector& omega);

struct DualityReport {
    double max_commutant_residual = 0.0;  // J M J against every generator
    double max_flow_residual = 0.0;       // distance of the flowed element to the left factor
};

/// Checks J M J subset M' and Delta^{i tau} M Delta^{-i tau} = M on the
/// generators, sampling the flow parameter.
DualityReport verify_duality(const ModularObjects& mod,
                             const std::vector<double>& taus = {0.0, 0.3, 1.0, -0.7});

/// Swapping partner A^perp = J Delta^{1/2} A Delta^{-1/2} J of a (x) 1,
/// returned through its right-multiplier (an element of the commutant).
/// Non-self-adjoint A is handled by the split A = A_1 + i A_2 into
/// hermitian parts. Throws std::domain_error when the modular conjugation
/// would amplify the matrix beyond 1e12 (regularize first).
CMat swap_partner_right_multiplier(const CMat& a, const ModularObjects& mod);

/// Vacuum image (a (x) 1) Omega as a coefficient matrix.
CMat left_action_on_omega(const CMat& a, const ModularObjects& mod);
/// Vacuum image of the commutant element with right-multiplier b_t.
CMat right_action_on_omega(const CMat& b_t, const ModularObjects& mod);

/// Gaussian modular regularization: in the rho_L eigenbasis the (i, j)
/// entry is multiplied by exp(-delta (log mu_i - log mu_j)^2 / 2).
CMat regularize(const CMat& a, const ModularObjects& mod, double delta);

}  // namespace ws
