#include "wedgescatter/minkowski.hpp"

#include <cmath>

namespace ws {

namespace {
constexpr double kLorentzTol = 1e-12;
}

FourVector::FourVector(Vec components) : c(std::move(components)) {
    if (c.size() < 2) throw std::invalid_argument("FourVector: dimension must be >= 2");
    if (!c.allFinite()) throw std::invalid_argument("FourVector: non-finite component");
}

FourVector::FourVector(double t, const Vec& spatial) {
    c.resize(spatial.size() + 1);
    c[0] = t;
    c.tail(spatial.size()) = spatial;
    if (c.size() < 2) throw std::invalid_argument("FourVector: dimension must be >= 2");
    if (!c.allFinite()) throw std::invalid_argument("FourVector: non-finite component");
}

double minkowski_product(const FourVector& u, const FourVector& v) {
    if (u.dim() != v.dim()) throw std::invalid_argument("minkowski_product: dimension mismatch");
    return u.c[0] * v.c[0] - u.spatial().dot(v.spatial());
}

double cone_norm(const FourVector& x) {
    return std::abs(x.time()) + x.spatial().norm();
}

Mat minkowski_metric(int dim) {
    Mat g = -Mat::Identity(dim, dim);
    g(0, 0) = 1.0;
    return g;
}

LorentzTransform::LorentzTransform(Mat matrix) : m_(std::move(matrix)) {
    const int d = static_cast<int>(m_.rows());
    if (d < 2 || m_.cols() != d)
        throw std::invalid_argument("LorentzTransform: matrix must be square, d >= 2");
    const Mat g = minkowski_metric(d);
    const double metric_err = (m_.transpose() * g * m_ - g).cwiseAbs().maxCoeff();
    if (metric_err > kLorentzTol)
        throw std::invalid_argument("LorentzTransform: Lambda^T g Lambda != g");
    if (std::abs(m_.determinant() - 1.0) > 1e-10)
        throw std::invalid_argument("LorentzTransform: det != +1 (not proper)");
    if (m_(0, 0) < 1.0 - kLorentzTol)
        throw std::invalid_argument("LorentzTransform: Lambda^0_0 < 1 (not orthochronous)");
}

LorentzTransform LorentzTransform::identity(int dim) {
    return LorentzTransform(Mat::Identity(dim, dim));
}

LorentzTransform LorentzTransform::inverse() const {
    const Mat g = minkowski_metric(dim());
    return LorentzTransform(g * m_.transpose() * g);
}

FourVector LorentzTransform::operator*(const FourVector& x) const {
    if (x.dim() != dim()) throw std::invalid_argument("LorentzTransform: dimension mismatch");
    return FourVector(Vec(m_ * x.c));
}

LorentzTransform LorentzTransform::operator*(const LorentzTransform& o) const {
    return LorentzTransform(Mat(m_ * o.m_));
}

bool LorentzTransform::is_spatial_rotation(double tol) const {
    if (std::abs(m_(0, 0) - 1.0) > tol) return false;
    const int d = dim();
    if (m_.row(0).tail(d - 1).cwiseAbs().maxCoeff() > tol) return false;
    if (m_.col(0).tail(d - 1).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

LorentzTransform lorentz_boost(int dim, int axis, double rapidity) {
    if (axis < 1 || axis > dim - 1)
        throw std::invalid_argument("lorentz_boost: axis out of range 1..s");
    Mat m = Mat::Identity(dim, dim);
    const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
    m(0, 0) = ch;
    m(axis, axis) = ch;
    m(0, axis) = sh;
    m(axis, 0) = sh;
    return LorentzTransform(std::move(m));
}

LorentzTransform lorentz_rotation(int dim, int axis_a, int axis_b, double angle) {
    if (axis_a < 1 || axis_b < 1 || axis_a > dim - 1 || axis_b > dim - 1 || axis_a == axis_b)
        throw std::invalid_argument("lorentz_rotation: invalid spatial plane");
    Mat m = Mat::Identity(dim, dim);
    const double c = std::cos(angle), s = std::sin(angle);
    m(axis_a, axis_a) = c;
    m(axis_b, axis_b) = c;
    m(axis_a, axis_b) = -s;
    m(axis_b, axis_a) = s;
    return LorentzTransform(std::move(m));
}

LorentzTransform lorentz_flip12(int dim) {
    if (dim < 3) throw std::invalid_argument("lorentz_flip12: needs s >= 2");
    Mat m = Mat::Identity(dim, dim);
    m(1, 1) = -1.0;
    m(2, 2) = -1.0;
    return LorentzTransform(std::move(m));
}

LorentzTransform lorentz_compose(const std::vector<LorentzTransform>& factors) {
    if (factors.empty()) throw std::invalid_argument("lorentz_compose: empty factor list");
    LorentzTransform acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
    return acc;
}

PoincareElement::PoincareElement(LorentzTransform L, FourVector a)
    : lorentz(std::move(L)), translation(std::move(a)) {
    if (lorentz.dim() != translation.dim())
        throw std::invalid_argument("PoincareElement: dimension mismatch");
}

PoincareElement PoincareElement::identity(int dim) {
    return PoincareElement(LorentzTransform::identity(dim), FourVector(Vec(Vec::Zero(dim))));
}

FourVector PoincareElement::operator*(const FourVector& x) const {
    return lorentz * x + translation;
}

PoincareElement PoincareElement::operator*(const PoincareElement& o) const {
    return PoincareElement(lorentz * o.lorentz, lorentz * o.translation + translation);
}

double omega_m(double mass, const Vec& k) {
    return std::sqrt(k.squaredNorm() + mass * mass);
}

MassShellPoint MassShellPoint::lift(double mass, const Vec& momentum) {
    if (!(mass > 0.0)) throw std::invalid_argument("MassShellPoint: mass must be positive");
    MassShellPoint p;
    p.mass = mass;
    p.momentum = momentum;
    p.energy = omega_m(mass, momentum);
    return p;
}

FourVector MassShellPoint::as_four_vector() const {
    return FourVector(energy, momentum);
}

Vec MassShellPoint::velocity() const {
    return momentum / energy;
}

MassShellPoint mass_shell_action(const LorentzTransform& L, const MassShellPoint& p) {
    const FourVector y = L * p.as_four_vector();
    if (y.time() <= 0.0)
        throw std::domain_error("mass_shell_action: image left the positive shell");
    MassShellPoint q;
    q.mass = p.mass;
    q.momentum = y.spatial();
    q.energy = y.time();
    const double shell_residual =
        std::abs(q.energy * q.energy - q.momentum.squaredNorm() - p.mass * p.mass);
    if (shell_residual > 1e-9 * (1.0 + q.energy * q.energy))
        throw std::domain_error("mass_shell_action: shell constraint violated");
    return q;
}

Vec mass_shell_map(const LorentzTransform& L, double mass, const Vec& k) {
    return mass_shell_action(L, MassShellPoint::lift(mass, k)).momentum;
}

Vec boost_velocity(const Vec& v, double rapidity, int axis) {
    if (v.norm() >= 1.0) throw std::invalid_argument("boost_velocity: |v| >= 1");
    if (axis < 1 || axis > static_cast<int>(v.size()))
        throw std::invalid_argument("boost_velocity: axis out of range");
    const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
    const double va = v[axis - 1];
    const double denom = ch - sh * va;
    Vec out = v / denom;
    out[axis - 1] = (ch * va - sh) / denom;
    return out;
}

}  // namespace ws
