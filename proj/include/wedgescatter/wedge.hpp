#pragma once

// Wedge regions W = Lambda W_r + x of Minkowski space, the precursor
// partial order on finite region samples, and the geometric thresholds
// feeding the commutator estimates.
//
// All wedge regions are open; boundary points are excluded throughout.

#include "wedgescatter/minkowski.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ws {

/// Poincare image of the right wedge W_r = {|t| < x^1}.
///
/// `complemented` encodes W = -Lambda W_r + x. For s >= 2 the causal
/// complement is realized inside the proper orthochronous group (exact
/// flip matrix diag(1,-1,-1,1,..)), so the flag stays false; for s = 1
/// the flag is the only representation since -1 on (t, x^1) is not in
/// the proper orthochronous group.
class Wedge {
  public:
    Wedge(LorentzTransform lorentz, FourVector translation, bool complemented = false);

    static Wedge right(int dim);

    int dim() const { return lorentz_.dim(); }
    const LorentzTransform& lorentz() const { return lorentz_; }
    const FourVector& translation() const { return translation_; }
    bool complemented() const { return complemented_; }

    bool contains(const FourVector& p) const;

    /// Translation-free part Lambda W_r (a convex cone).
    Wedge centered() const;

    /// Causal complement W' = -Lambda W_r + x; involutive.
    Wedge complement() const;

    /// Edge parallel to the time-zero hyperplane, i.e. W_c = R W_r for a
    /// spatial rotation R. Always true for d = 2.
    bool is_upright(double tol = 1e-10) const;

    /// Image under lambda = (a, M): M W + a.
    Wedge transformed(const PoincareElement& lambda) const;

    Wedge translated(const FourVector& a) const;

  private:
    LorentzTransform lorentz_;
    FourVector translation_;
    bool complemented_;
};

bool wedge_contains(const Wedge& w, const FourVector& p);

enum class RegionTag { VelocitySupport, General };

/// Finite point sample standing in for a region. Velocity-support-tagged
/// samples lie in the hyperplane frame * {x^0 = 1}; exactly {1} x V when
/// the frame is the identity.
struct RegionSample {
    std::vector<FourVector> points;
    RegionTag tag = RegionTag::General;
    std::optional<LorentzTransform> frame;  // recorded hyperplane frame for velocity supports

    static RegionSample velocity_points(const std::vector<Vec>& velocities);
    static RegionSample general(std::vector<FourVector> pts);
};

/// O1 prec_W O2  :=  O2 - O1 subset W_c, checked over all pairwise
/// differences. Exact for convex hulls when the samples are the extreme
/// points (caller's responsibility). Empty samples are vacuously ordered.
bool precursor_order(const RegionSample& o1, const RegionSample& o2, const Wedge& w);

enum class QuasiTotalOutcome { First, Second, Both };

/// Raised when a geometric statement that must hold is numerically
/// falsified; runners translate this into an abort (exit code 3).
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Given V2 prec_W V1 and V2p prec_W V1p on an upright wedge, reports which
/// of V2p prec_W V1 (First) or V2 prec_W V1p (Second) holds, or Both.
/// "Neither" cannot occur; if detected it throws InvariantViolation.
/// Precondition failures throw std::invalid_argument instead.
QuasiTotalOutcome quasi_total_witness(const RegionSample& v1, const RegionSample& v2,
                                      const RegionSample& v1p, const RegionSample& v2p,
                                      const Wedge& w);

/// The cross-relation decision alone, without precondition verification.
/// Only for diagnostics (e.g. exercising the abort path on deliberately
/// invalid inputs); still throws InvariantViolation on "neither".
QuasiTotalOutcome quasi_total_outcome_unchecked(const RegionSample& v1, const RegionSample& v2,
                                                const RegionSample& v1p,
                                                const RegionSample& v2p, const Wedge& w);

struct Box2 {
    double lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
};

/// Monte Carlo fraction of the box lying in the causally forbidden set
/// Xi = R^2 \ (C u -C), C = {x : |sinh(beta) x^2| < x^1}. Deterministic
/// for a fixed seed. Requires s = 2 semantics (the box lives in the
/// 2-dimensional velocity-difference space).
double forbidden_region_measure(double beta, const Box2& box, std::int64_t n_samples,
                                std::uint64_t seed);

/// Exact forbidden-region fraction for a centered square box [-a,a]^2,
/// derived from the cone half-angle arctan(1/|sinh beta|).
double forbidden_region_square_fraction(double beta);

/// True when L maps W_r onto itself. Checked on sampled interior points
/// (both directions), margin-aware.
bool stabilizes_right_wedge(const LorentzTransform& L, double margin = 1e-7);

struct StabilizerFactors {
    double rapidity = 0.0;
    LorentzTransform rotation;  // spatial rotation fixing x^1
};

/// Factorizes a stabilizer element of W_r as Lambda_beta * R1 with R1 a
/// spatial rotation fixing x^1. Reconstruction error <= 1e-10.
StabilizerFactors stabilizer_factorize(const LorentzTransform& L);

/// Frames L*(W) = {Lambda : Lambda W_r = W_c}. Empty for complemented
/// wedges in d = 2.
bool lstar_member(const LorentzTransform& L, const Wedge& w);

/// A representative of L*(W), when one exists.
std::optional<LorentzTransform> lstar_representative(const Wedge& w);

struct SeparationCertificate {
    double epsilon = 0.0;    // largest eps with (Vf - Vfp) + C_eps inside W_c
    double delta_max = 0.0;  // eps / 3
    double tau_star = 0.0;   // 3 (|x1|_c + |x2|_c) / eps
};

/// Largest eps (bisection, resolution 1e-6) such that every difference
/// p - p' (p in vf, p' in vfp) plus the cone-norm ball C_eps lies in W_c,
/// together with the derived thresholds. Throws std::domain_error when the
/// ordering precondition fails (no positive eps exists), and
/// std::invalid_argument when wperp is not opposite to w.
SeparationCertificate separation_threshold(const RegionSample& vf, const RegionSample& vfp,
                                           const Wedge& w, const Wedge& wperp);

}  // namespace ws
