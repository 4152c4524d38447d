#pragma once

// Scattering-state approximants Psi_tau, Cook-method convergence scans,
// commutator decay, Fock-structure checks, Lambda-independence, wave
// operators and wedge-dependent S-matrix elements.

#include "wedgescatter/fock.hpp"
#include "wedgescatter/ordered_fock.hpp"

#include <array>

namespace ws {

/// Bump packet whose grid nodes coincide with model grid modes, so the
/// one-particle Haag-Ruelle identities hold to rounding.
WavePacket make_grid_bump_packet(const FockModel& model, const Vec& center, const Vec& radius,
                                 double amplitude = 1.0, int margin_cells = 4);

/// Packet carrying given amplitudes at model modes (zero elsewhere), on a
/// node-aligned grid window around their bounding box.
WavePacket make_packet_from_grid_amplitudes(const FockModel& model,
                                            const std::map<std::int32_t, Complex>& amps,
                                            int margin_cells = 4);

FieldOp sigma_flip(const FieldOp& op);

/// One creation slot: a smeared seed operator, its sigma-flipped swapping
/// partner descriptor, and the wave packet.
struct HRFamily {
    FieldOp base;
    FieldOp base_perp;
    WavePacket packet;

    HRFamily(FieldOp b, WavePacket f);
};

/// Ordered list of creation slots with reference wedge, frame in L*(W)
/// and scattering direction. The adapted velocity supports must satisfy
/// V_n prec_W ... prec_W V_1 for outgoing states (reversed for incoming);
/// verified at construction.
struct HRSpec {
    std::vector<HRFamily> entries;
    Wedge wedge;
    LorentzTransform frame;
    Direction direction = Direction::Outgoing;
};

HRSpec make_hr_spec(std::vector<HRFamily> entries, const Wedge& wedge,
                    const LorentzTransform& frame, Direction direction,
                    const FockModel& model);

/// B_{1 tau}(f_1) ... B_{n tau}(f_n) Omega, applied right to left.
FockVector psi_tau(const HRSpec& spec, double tau, const FockModel& model);

/// Analytic tau-derivative (Leibniz over the slots; only annihilation
/// multipliers depend on tau).
FockVector psi_tau_derivative(const HRSpec& spec, double tau, const FockModel& model);

struct ConvergenceScan {
    std::vector<double> taus;
    std::vector<double> increment_norms;   // per step, size taus-1
    std::vector<double> dpsi_norms;        // analytic, per tau
    std::vector<double> fd_mismatch;       // |analytic - central difference| per checked tau
    std::vector<double> leaks;             // truncation leak per tau
    double increment_exponent = 0.0;       // log-log fit of increments, NaN if all zero
    bool increments_all_zero = false;
};

/// Cook-method diagnostics over a tau grid (strictly increasing, below
/// the model's recurrence guard). fd_stride > 0 cross-checks the analytic
/// derivative by central differences every fd_stride samples.
ConvergenceScan convergence_scan(const HRSpec& spec, const std::vector<double>& taus,
                                 const FockModel& model, int fd_stride = 0);

struct CommutatorScan {
    std::vector<double> taus;
    // variants: [B'_tau, B_tau], [B'*, B], [B', B*], [B', dtau B]
    std::array<std::vector<double>, 4> norms;
    std::array<double, 4> exponents{};
    std::array<bool, 4> all_zero{};
    bool all_converged = true;
};

/// Truncated commutator norms between the sigma-flipped right family and
/// the left family over tau, for the four adjoint/derivative variants.
/// Requires the velocity ordering V_right prec_W V_left for positive tau
/// grids (reversed for negative).
CommutatorScan commutator_scan(const HRFamily& left, const HRFamily& right,
                               const LorentzTransform& frame, const Wedge& wedge,
                               const std::vector<double>& taus, const FockModel& model,
                               int sector_cap, std::uint64_t seed);

struct FockStructureCheck {
    std::vector<double> taus;
    std::vector<Complex> overlaps;   // <Psi_tau, Psi'_tau>
    Complex fock_product{0.0, 0.0};  // delta_{nn'} prod_k <B_k Omega, B'_k Omega>
    std::vector<double> residuals;   // |overlap - fock_product|
};

/// Pairing diagnostics for two families over the same wedge; refuses
/// (std::invalid_argument) when the cross-family ordering condition cannot
/// be verified.
FockStructureCheck fock_structure_check(const HRSpec& spec_a, const HRSpec& spec_b,
                                        const std::vector<double>& taus,
                                        const FockModel& model);

struct LambdaIndependenceScan {
    std::vector<double> taus;
    std::vector<double> difference_norms;  // ||Psi_tau^(Lambda) - Psi_tau^(Lambda')||
    double exponent = 0.0;
    bool all_zero = false;
};

/// Compares scattering approximants built with modified packets in two
/// frames of L*(W), interpolating through stabilizer coordinates to verify
/// membership and ordering along the path.
LambdaIndependenceScan lambda_independence(const HRSpec& spec, const LorentzTransform& frame2,
                                           int gamma_steps, const std::vector<double>& taus,
                                           const FockModel& model);

struct WaveOperatorOptions {
    double divide_guard = 1e-8;     // modes with |g| below it must carry no amplitude
    double tau_fraction = 0.95;     // of the recurrence guard
    int certificate_steps = 4;      // trailing increments measured for the certificate
};

struct WaveOperatorResult {
    FockVector state;
    double tau_used = 0.0;
    double last_increment = 0.0;  // convergence certificate
    double truncation_leak = 0.0;
};

/// Applies the wave operator to an ordered product state by realizing each
/// factor as B_tau^Lambda(f) Omega (inverting the one-particle multiplier
/// over the seed profile), then running psi_tau at the largest safe tau.
WaveOperatorResult wave_operator_apply(const OrderedProductState& state, const FieldOp& seed,
                                       const FockModel& model,
                                       const WaveOperatorOptions& opts = {});

struct SMatrixResult {
    Complex value{0.0, 0.0};
    WaveOperatorResult outgoing;
    WaveOperatorResult incoming;
};

/// S_{fi}^{W_f, W_i} element between an outgoing-ordered final state and an
/// incoming-ordered initial state (their wedges ride along in the states).
SMatrixResult smatrix_element(const OrderedProductState& final_state, const FieldOp& seed_final,
                              const OrderedProductState& initial_state,
                              const FieldOp& seed_initial, const FockModel& model,
                              const WaveOperatorOptions& opts = {});

}  // namespace ws
