#pragma once

// Ordered tensor products over the one-particle space: the precursor order
// lifted to vectors via their spectral supports, and the product Poincare
// action. Ordered product states are the domain elements of the wave
// operators.

#include "wedgescatter/fock.hpp"
#include "wedgescatter/wedge.hpp"

#include <map>

namespace ws {

/// One-particle amplitude on the model grid with its tight spectral
/// support box (bounding box of amplitudes above the 1e-10 floor).
struct OneParticleVector {
    std::map<std::int32_t, Complex> amplitudes;
    double mass = 0.0;
    Vec support_lo, support_hi;

    static OneParticleVector from_amplitudes(std::map<std::int32_t, Complex> amps,
                                             const FockModel& model,
                                             double floor = 1e-10);

    double norm() const;
};

Complex overlap(const OneParticleVector& a, const OneParticleVector& b);

/// Velocity support V_Psi^Lambda: the ray cone over the spectral support
/// intersected with the tilted hyperplane Lambda {x^0 = 1}. Each boundary
/// shell point (omega, k) is scaled by 1 / (Lambda^{-1}(omega,k))^0.
RegionSample vector_velocity_support(const OneParticleVector& psi,
                                     const LorentzTransform& frame,
                                     const FockModel& model,
                                     int face_samples = 8);

/// psi1 prec_W psi2, decided through the frame-adapted velocity supports.
/// Requires frame in L*(W); well-definedness across frames is a theorem
/// checked by the property suite, not assumed silently.
bool ordering_check(const OneParticleVector& psi1, const OneParticleVector& psi2,
                    const Wedge& w, const LorentzTransform& frame, const FockModel& model);

enum class Direction { Outgoing, Incoming };

/// List of one-particle vectors with a verified precursor ordering:
/// outgoing states satisfy psi_1 succ psi_2 succ ... succ psi_n,
/// incoming states the reverse chain.
struct OrderedProductState {
    std::vector<OneParticleVector> factors;
    Wedge wedge;
    LorentzTransform frame;
    Direction direction = Direction::Outgoing;

    int particle_count() const { return static_cast<int>(factors.size()); }

    /// Embedding into the plain (unsymmetrized) coefficient tensor:
    /// amplitude at the ordered mode tuple (k_1, ..., k_n).
    Complex tensor_amplitude(const std::vector<std::int32_t>& modes) const;
};

/// Constructs the state after verifying the pairwise ordering in the
/// declared direction; throws std::invalid_argument naming the offending
/// adjacent pair otherwise. n = 0 gives the vacuum element.
OrderedProductState ordered_tensor(std::vector<OneParticleVector> factors, const Wedge& w,
                                   const LorentzTransform& frame, Direction direction,
                                   const FockModel& model);

/// Unsymmetrized Gram entry <a, b> = prod_k <a_k, b_k> (0 when particle
/// numbers differ).
Complex product_state_overlap(const OrderedProductState& a, const OrderedProductState& b);

/// One-particle Poincare action: translations act by on-shell phases
/// e^{i(omega t - k.x)}; boosts transport amplitudes along the shell with
/// the unitary density weight sqrt(omega(L^-1 k)/omega(k)), grid-resampled.
OneParticleVector u1_action(const PoincareElement& lambda, const OneParticleVector& psi,
                            const FockModel& model);

/// Factor-wise action; the reference wedge is retagged to lambda W and the
/// frame to Lambda frame. The resulting ordering (with respect to the
/// transformed wedge) is re-verified on construction.
OrderedProductState u0_action(const PoincareElement& lambda, const OrderedProductState& state,
                              const FockModel& model);

}  // namespace ws
