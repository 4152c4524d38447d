#pragma once

// Minkowski linear algebra on R^d, d = s+1, metric diag(+1, -1, ..., -1).
// All types are immutable values; operations are pure.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ws {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point (or tangent vector) of d-dimensional Minkowski space.
/// Component 0 is time, components 1..s are space.
struct FourVector {
    Vec c;

    FourVector() = default;
    explicit FourVector(Vec components);
    FourVector(double t, const Vec& spatial);

    int dim() const { return static_cast<int>(c.size()); }
    int sdim() const { return dim() - 1; }
    double time() const { return c[0]; }
    Vec spatial() const { return c.tail(dim() - 1); }

    FourVector operator+(const FourVector& o) const { return FourVector(Vec(c + o.c)); }
    FourVector operator-(const FourVector& o) const { return FourVector(Vec(c - o.c)); }
    FourVector operator-() const { return FourVector(Vec(-c)); }
    FourVector operator*(double a) const { return FourVector(Vec(a * c)); }
};

/// Mainly-minus inner product u^0 v^0 - u.v.
double minkowski_product(const FourVector& u, const FourVector& v);

/// |x|_c = |x^0| + |x_spatial|, the double-cone gauge norm.
double cone_norm(const FourVector& x);

/// Metric matrix diag(+1, -1, ..., -1).
Mat minkowski_metric(int dim);

/// Element of the proper orthochronous Lorentz group L+^.
/// The constructor validates Lambda^T g Lambda = g (tol 1e-12),
/// det = +1 and Lambda^0_0 >= 1.
class LorentzTransform {
  public:
    explicit LorentzTransform(Mat matrix);

    static LorentzTransform identity(int dim);

    const Mat& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

    /// Inverse via g Lambda^T g; exact up to rounding.
    LorentzTransform inverse() const;

    FourVector operator*(const FourVector& x) const;
    LorentzTransform operator*(const LorentzTransform& o) const;

    /// True when the transform is of the block form diag(1, R), R in SO(s).
    bool is_spatial_rotation(double tol = 1e-12) const;

  private:
    Mat m_;
};

/// Hyperbolic rotation with rapidity beta in the (x^0, x^axis) plane,
/// axis in 1..s. boost(1, beta) maps (1, 0, ...) to (cosh b, sinh b, 0, ...).
LorentzTransform lorentz_boost(int dim, int axis, double rapidity);

/// Rotation by angle in the spatial (x^a, x^b) plane, 1 <= a < b <= s.
LorentzTransform lorentz_rotation(int dim, int axis_a, int axis_b, double angle);

/// Rotation by pi in the (x^1, x^2) plane: exact integer matrix
/// diag(1, -1, -1, 1, ...). Maps the right wedge onto its negative.
LorentzTransform lorentz_flip12(int dim);

/// Product of factors, applied right to left.
LorentzTransform lorentz_compose(const std::vector<LorentzTransform>& factors);

/// lambda = (a, Lambda), acting as x -> Lambda x + a.
struct PoincareElement {
    LorentzTransform lorentz;
    FourVector translation;

    PoincareElement(LorentzTransform L, FourVector a);
    static PoincareElement identity(int dim);

    FourVector operator*(const FourVector& x) const;
    /// (a1, L1)(a2, L2) = (a1 + L1 a2, L1 L2).
    PoincareElement operator*(const PoincareElement& o) const;
};

/// Point of the positive mass hyperboloid H_m: energy = sqrt(k^2 + m^2).
struct MassShellPoint {
    double mass = 0.0;
    Vec momentum;
    double energy = 0.0;

    static MassShellPoint lift(double mass, const Vec& momentum);

    FourVector as_four_vector() const;
    /// Velocity k / omega_m(k); always |v| < 1.
    Vec velocity() const;
};

double omega_m(double mass, const Vec& k);

/// Shell-to-shell action p -> spatial part of Lambda (omega, k), lifted back.
/// Throws if Lambda is not orthochronous-compatible with the positive shell.
MassShellPoint mass_shell_action(const LorentzTransform& L, const MassShellPoint& p);

/// Spatial part of Lambda (omega_m(k), k); the map called Lambda_m on momenta.
Vec mass_shell_map(const LorentzTransform& L, double mass, const Vec& k);

/// Relativistic velocity transformation for a boost of rapidity beta along
/// the given spatial axis. Equals the velocity of Lambda_{-beta} applied to
/// any mass-shell representative of v; independent of the lift's mass.
Vec boost_velocity(const Vec& v, double rapidity, int axis = 1);

}  // namespace ws
