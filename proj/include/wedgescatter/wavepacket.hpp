#pragma once

// Regular positive-energy Klein-Gordon solutions built from compactly
// supported momentum profiles on uniform grids: evaluation by quadrature,
// velocity supports, boost transformation laws and decay scans.

#include "wedgescatter/minkowski.hpp"
#include "wedgescatter/wedge.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace ws {

using Complex = std::complex<double>;

/// Uniform s-dimensional momentum grid, node k_a(i) = lo_a + i h_a.
struct MomentumGrid {
    Vec lo;
    Vec spacing;
    std::vector<int> count;

    int sdim() const { return static_cast<int>(count.size()); }
    long total_nodes() const;
    Vec node(const std::vector<int>& idx) const;
    long flatten(const std::vector<int>& idx) const;
};

/// Smooth compactly supported momentum profile of a Klein-Gordon solution
/// of mass m. The profile vanishes exactly outside the support box, which
/// sits strictly inside the grid (>= 2 cells of margin on every axis).
/// `support_sample` is a point sample of the boundary of the true support
/// (an ellipsoid for bump packets, its Lorentz image after boosts).
///
/// Packets built from closed-form bumps carry the analytic profile along-
/// side the stored samples and evaluate through it; packets built from
/// grid data interpolate (order 1 or 3, recorded in the packet).
class WavePacket {
  public:
    WavePacket(double mass, MomentumGrid grid, std::vector<Complex> values,
               Vec support_lo, Vec support_hi, std::vector<Vec> support_sample,
               std::function<Complex(const Vec&)> analytic = {}, int interpolation_order = 3);

    double mass() const { return mass_; }
    const MomentumGrid& grid() const { return grid_; }
    const std::vector<Complex>& values() const { return values_; }
    const Vec& support_lo() const { return support_lo_; }
    const Vec& support_hi() const { return support_hi_; }
    const std::vector<Vec>& support_sample() const { return support_sample_; }
    int sdim() const { return grid_.sdim(); }
    int interpolation_order() const { return interpolation_order_; }
    bool has_analytic_profile() const { return static_cast<bool>(analytic_); }

    bool in_support_box(const Vec& k) const;

    /// Profile at arbitrary momentum: the analytic closure when present,
    /// else interpolation of the stored values; exactly zero outside the
    /// support box either way.
    Complex profile_value(const Vec& k) const;

    /// Copy that drops the analytic closure (forces the interpolation path).
    WavePacket values_only() const;

  private:
    double mass_;
    MomentumGrid grid_;
    std::vector<Complex> values_;
    Vec support_lo_, support_hi_;
    std::vector<Vec> support_sample_;
    std::function<Complex(const Vec&)> analytic_;
    int interpolation_order_ = 3;
};

/// Radial C^inf bump amplitude * exp(-1/(1-|u|^2)), u = (k-center)/radius,
/// supported on the closed ellipsoid |u| <= 1. The grid covers the support
/// box inflated by `grid_inflation` with `nodes_per_axis` nodes.
WavePacket make_bump_packet(double mass, const Vec& center, const Vec& radius,
                            int nodes_per_axis, double amplitude = 1.0,
                            double grid_inflation = 1.8, int boundary_samples = 64);

/// f(t, x) by quadrature of the oscillatory shell integral over the support
/// box, refined `refine`-fold beyond the storage grid via interpolation.
/// Error is O(h^2) in the refined spacing for fixed (t, x).
Complex evaluate_kg(const WavePacket& f, double t, const Vec& x, int refine = 4);

struct VelocitySupport {
    RegionSample sample;  // lifts (1, k/omega(k)) of the support boundary sample
    double delta = 0.0;

    /// Sample of the delta-enlarged support (spatial enlargement only).
    RegionSample enlarged(int directions_per_point = 16) const;
};

VelocitySupport velocity_support(const WavePacket& f, double delta = 0.0);

/// Packet of f^Lambda(x) := f(Lambda x): profile
///   (omega(Lambda_m k)/omega(k)) * ftilde(Lambda_m k),
/// support = Lambda_m^{-1}(old support), resampled onto a covering grid.
/// The analytic closure composes exactly when present; otherwise values
/// are resampled with the given interpolation order.
WavePacket boost_packet(const WavePacket& f, const LorentzTransform& L,
                        int interpolation_order = 3);

/// Pointwise multiplication by omega(Lambda_m^{-1} p)/omega(p); the support
/// box and velocity support are unchanged.
WavePacket modified_packet(const WavePacket& f, const LorentzTransform& L);

/// Adapted velocity support Lambda V_{f^Lambda}: points of the boosted
/// support lifted to the hyperplane Lambda {x^0 = 1}; tagged general with
/// the frame recorded.
RegionSample adapted_velocity_support(const WavePacket& f, const LorentzTransform& L);

/// Inverse of the velocity map on the shell: k(v) = m v / sqrt(1 - |v|^2).
Vec velocity_to_momentum(double mass, const Vec& v);

/// Distance of velocity v to the packet's velocity support; exactly 0 when
/// the corresponding momentum lies in the support box.
double velocity_support_distance(const WavePacket& f, const Vec& v);

struct RayScan {
    Vec velocity;
    bool inside_eps_cone = false;
    std::vector<double> abs_f;  // |f(t, v t)| per t
    double slope = 0.0;         // log-log fit over the configured window
};

struct DecayProfile {
    std::vector<double> t_values;
    std::vector<RayScan> rays;
    std::vector<double> l1_norms;   // ||f_t||_L1 per t (empty when disabled)
    double l1_exponent = 0.0;       // fitted growth exponent of the L1 norm
    bool l1_computed = false;
};

struct DecayOptions {
    int refine = 4;
    double fit_t_lo = 10.0;
    double fit_t_hi = 100.0;
    bool compute_l1 = true;
    double l1_spacing = 0.25;
    double l1_padding = 8.0;
};

/// Samples |f(t, vt)| along each ray, fits log-log slopes, classifies the
/// rays against the eps-enlarged velocity cone, and (optionally) tracks the
/// L1 norm growth. Throws std::domain_error for degenerate fits.
DecayProfile decay_profile(const WavePacket& f, const std::vector<Vec>& rays,
                           const std::vector<double>& t_values, double epsilon,
                           const DecayOptions& opts = {});

}  // namespace ws
