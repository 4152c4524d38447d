#pragma once

// Truncated second-quantized toy model over a symmetric momentum grid.
// Field operators are linear in deformed ladder operators
//   z^+(q) = e^{i sigma q.Q.P} a^+(q),
// where P is the on-shell total energy-momentum of the state acted on and
// Q is a fixed antisymmetric matrix (Q = 0 gives the free local field).
// All space-time smearing integrals are realized by their exact
// momentum-space multipliers, so the one-particle Haag-Ruelle identities
// hold to rounding rather than to quadrature error.

#include "wedgescatter/minkowski.hpp"
#include "wedgescatter/wavepacket.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <optional>

namespace ws {

/// Model descriptor: s-dimensional symmetric grid with modes_per_axis
/// nodes per axis at the given spacing, k(i) = (i - (N-1)/2) h, so the
/// grid is closed under k -> -k. Spectrum: vacuum at 0, one-particle
/// sector on the discretized shell, n-particle energies >= n m.
struct FockModel {
    int sdim = 1;
    int modes_per_axis = 64;
    double spacing = 0.05;
    double mass = 1.0;
    int n_max = 3;
    Mat deformation;  // d x d antisymmetric; zero for the free field

    FockModel() = default;
    FockModel(int s, int modes, double h, double m, int nmax, Mat q);

    static Mat standard_deformation(int dim, double kappa);

    int dim() const { return sdim + 1; }
    long mode_count() const;
    Vec momentum(std::int32_t mode) const;
    std::int32_t mode_of(const std::vector<int>& idx) const;
    std::int32_t reflect(std::int32_t mode) const;
    double energy(std::int32_t mode) const;
    /// On-shell lift (omega(k), k) of a mode.
    FourVector shell(std::int32_t mode) const;
    /// Nearest grid mode to momentum k, or nullopt outside the grid range.
    std::optional<std::int32_t> nearest_mode(const Vec& k) const;

    double max_grid_speed() const;
    /// Quasi-revival time of grid-discretized oscillatory sums,
    /// pi / (h v_max); tau scans should stay below half of it.
    double recurrence_time() const;
    double recurrence_guard() const { return 0.5 * recurrence_time(); }
};

/// Sorted multiset of grid modes labelling an n-particle basis vector.
using ModeKey = std::vector<std::int32_t>;

struct ModeKeyHash {
    std::size_t operator()(const ModeKey& k) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const std::int32_t m : k) {
            h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(m));
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

using SectorMap = std::unordered_map<ModeKey, Complex, ModeKeyHash>;

/// Sparse state with per-sector amplitude maps.
/// `truncation_leak` accumulates the norms dropped past the top sector.
class FockVector {
  public:
    FockVector() : FockVector(1) {}
    explicit FockVector(int n_max);
    static FockVector vacuum(int n_max);
    static FockVector one_particle(const std::map<std::int32_t, Complex>& amplitudes,
                                   int n_max);

    int n_max() const { return static_cast<int>(sectors_.size()) - 1; }
    const SectorMap& sector(int n) const { return sectors_[n]; }
    SectorMap& sector(int n) { return sectors_[n]; }

    double truncation_leak = 0.0;

    double norm() const;
    double norm_squared() const;
    FockVector& operator+=(const FockVector& o);
    FockVector& operator-=(const FockVector& o);
    FockVector& operator*=(Complex a);
    /// Drops amplitudes below the floor (exact zeros from cancellations).
    void prune(double floor = 0.0);

  private:
    std::vector<SectorMap> sectors_;
};

Complex inner_product(const FockVector& a, const FockVector& b);

/// Linear field operator: creation profile h+ and annihilation profile h-
/// (sparse mode maps), deformation sign sigma selecting +-Q.
struct FieldOp {
    std::map<std::int32_t, Complex> h_plus;
    std::map<std::int32_t, Complex> h_minus;
    int sigma = +1;

    FieldOp adjoint() const;
};

/// z^+(h+) + z(h-) applied to psi; sectors shift by +-1 only. Creation out
/// of the top sector is dropped and, when track_leak is set, its norm is
/// recorded in the result's leak field (assembling the dropped sector is
/// costly, so norm estimation turns it off).
FockVector apply_field(const FieldOp& op, const FockVector& psi, const FockModel& model,
                       bool track_leak = true);

/// On-shell values of the smearing function at +-(omega(k), k) per mode.
struct ShellSmearing {
    Eigen::VectorXcd on_plus;
    Eigen::VectorXcd on_minus;
};

/// Exact momentum-space image of B = A(chi):
/// h+(k) *= chi(+shell), h-(k) *= chi(-shell).
FieldOp smear_field(const FieldOp& op, const ShellSmearing& chi, const FockModel& model);

/// Smooth plateau smearing: 1 on the given momentum boxes, falling to 0
/// over `width` (default half the mass gap m/2). The negative-shell values
/// are `negative_scale` times the plateau mirrored through k -> -k;
/// negative_scale = 0 realizes the spectral conditions of the one-particle
/// analysis exactly (B* Omega = 0).
ShellSmearing make_shell_chi(const FockModel& model,
                             const std::vector<std::pair<Vec, Vec>>& plateau_boxes,
                             double width = -1.0, double negative_scale = 0.0);

/// Haag-Ruelle operator B_tau(f) (or the frame-adapted B_tau^Lambda(f)):
///   h+(q) *= [omega(q)/omega(p)] ftilde(q),             p = Lambda_m^{-1}(q)
///   h-(q) *= [omega(r)/omega(p)] ftilde(r) e^{-2i omega(p) tau},
///            r = Lambda_m(-p).
/// For Lambda = 1 this reduces to h+ *= ftilde(q), h- *= ftilde(-q)
/// e^{-2i omega(q) tau}; the creation side is tau-independent by exact
/// phase cancellation.
FieldOp hr_operator(const FieldOp& op, const WavePacket& f, double tau,
                    const LorentzTransform& frame, const FockModel& model);
FieldOp hr_operator(const FieldOp& op, const WavePacket& f, double tau,
                    const FockModel& model);

/// Analytic tau-derivative of hr_operator: the creation side vanishes, the
/// annihilation multipliers gain a factor -2i omega(p).
FieldOp hr_tau_derivative(const FieldOp& op, const WavePacket& f, double tau,
                          const LorentzTransform& frame, const FockModel& model);

/// Projection onto the one-particle sector, optionally restricted to a
/// momentum window (realizing E(K)). An empty window keeps the full shell.
FockVector one_particle_project(const FockVector& psi, const FockModel& model,
                                const std::function<bool(const Vec&)>& window = {});

/// Operator with explicit adjoint, for norm estimation of composites.
struct SparseOperator {
    std::function<FockVector(const FockVector&)> apply;
    std::function<FockVector(const FockVector&)> apply_adjoint;
};

SparseOperator as_operator(const FieldOp& op, const FockModel& model);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Largest singular value of op restricted to sectors 0..sector_cap by
/// power iteration on X*X, deterministic for a fixed seed. sector_cap
/// should stay below n_max so creation out of the top sector cannot
/// corrupt the estimate. `warm_start`, when nonempty, seeds the iteration
/// (and receives the final iterate) so scans over nearby operators
/// converge in a few steps.
NormEstimate operator_norm_truncated(const SparseOperator& op, const FockModel& model,
                                     int sector_cap, std::uint64_t seed = 1,
                                     double rel_tol = 1e-8, int max_iterations = 600,
                                     FockVector* warm_start = nullptr);

}  // namespace ws
