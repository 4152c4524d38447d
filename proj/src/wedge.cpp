#include "wedgescatter/wedge.hpp"

#include "wedgescatter/fit.hpp"

#include <cmath>

namespace ws {

namespace {

// Deterministic interior sample of W_r with a relative margin to the
// boundary: |y^0| <= 0.9 y^1.
std::vector<FourVector> right_wedge_sample(int dim, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FourVector> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec y = Vec::Zero(dim);
        y[1] = std::exp(rng.uniform(-1.0, 1.5));
        y[0] = rng.uniform(-0.9, 0.9) * y[1];
        for (int a = 2; a < dim; ++a) y[a] = rng.uniform(-3.0, 3.0);
        pts.emplace_back(std::move(y));
    }
    return pts;
}

}  // namespace

Wedge::Wedge(LorentzTransform lorentz, FourVector translation, bool complemented)
    : lorentz_(std::move(lorentz)), translation_(std::move(translation)),
      complemented_(complemented) {
    if (lorentz_.dim() != translation_.dim())
        throw std::invalid_argument("Wedge: dimension mismatch");
}

Wedge Wedge::right(int dim) {
    return Wedge(LorentzTransform::identity(dim), FourVector(Vec(Vec::Zero(dim))));
}

bool Wedge::contains(const FourVector& p) const {
    if (p.dim() != dim()) throw std::invalid_argument("Wedge::contains: dimension mismatch");
    const FourVector y = lorentz_.inverse() * (p - translation_);
    const double x1 = complemented_ ? -y.c[1] : y.c[1];
    return std::abs(y.c[0]) < x1;
}

Wedge Wedge::centered() const {
    return Wedge(lorentz_, FourVector(Vec(Vec::Zero(dim()))), complemented_);
}

Wedge Wedge::complement() const {
    if (dim() >= 3) return Wedge(lorentz_ * lorentz_flip12(dim()), translation_, complemented_);
    return Wedge(lorentz_, translation_, !complemented_);
}

bool Wedge::is_upright(double tol) const {
    if (dim() == 2) return true;
    // Edge of the centered wedge is Lambda span{e_2, ..., e_s}; upright iff
    // every basis image has vanishing time component.
    for (int j = 2; j < dim(); ++j) {
        if (std::abs(lorentz_.matrix()(0, j)) > tol) return false;
    }
    return true;
}

Wedge Wedge::transformed(const PoincareElement& lambda) const {
    return Wedge(lambda.lorentz * lorentz_, lambda * translation_, complemented_);
}

Wedge Wedge::translated(const FourVector& a) const {
    return Wedge(lorentz_, translation_ + a, complemented_);
}

bool wedge_contains(const Wedge& w, const FourVector& p) {
    return w.contains(p);
}

RegionSample RegionSample::velocity_points(const std::vector<Vec>& velocities) {
    RegionSample r;
    r.tag = RegionTag::VelocitySupport;
    r.points.reserve(velocities.size());
    for (const auto& v : velocities) r.points.emplace_back(1.0, v);
    return r;
}

RegionSample RegionSample::general(std::vector<FourVector> pts) {
    RegionSample r;
    r.tag = RegionTag::General;
    r.points = std::move(pts);
    return r;
}

bool precursor_order(const RegionSample& o1, const RegionSample& o2, const Wedge& w) {
    const Wedge wc = w.centered();
    for (const auto& p2 : o2.points)
        for (const auto& p1 : o1.points)
            if (!wc.contains(p2 - p1)) return false;
    return true;
}

namespace {

bool is_plain_velocity_support(const RegionSample& s) {
    if (s.tag != RegionTag::VelocitySupport) return false;
    if (s.frame && !s.frame->is_spatial_rotation(1e-12)) {
        // a recorded non-identity frame means a tilted hyperplane
        const Mat& m = s.frame->matrix();
        if ((m - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() > 1e-12) return false;
    }
    for (const auto& p : s.points)
        if (std::abs(p.time() - 1.0) > 1e-12) return false;
    return true;
}

}  // namespace

QuasiTotalOutcome quasi_total_witness(const RegionSample& v1, const RegionSample& v2,
                                      const RegionSample& v1p, const RegionSample& v2p,
                                      const Wedge& w) {
    if (!w.is_upright()) throw std::invalid_argument("quasi_total_witness: wedge not upright");
    for (const RegionSample* s : {&v1, &v2, &v1p, &v2p})
        if (!is_plain_velocity_support(*s))
            throw std::invalid_argument(
                "quasi_total_witness: samples must be {1} x V velocity supports");
    if (!precursor_order(v2, v1, w) || !precursor_order(v2p, v1p, w))
        throw std::invalid_argument("quasi_total_witness: input pairs are not ordered");
    return quasi_total_outcome_unchecked(v1, v2, v1p, v2p, w);
}

QuasiTotalOutcome quasi_total_outcome_unchecked(const RegionSample& v1, const RegionSample& v2,
                                                const RegionSample& v1p,
                                                const RegionSample& v2p, const Wedge& w) {
    const bool first = precursor_order(v2p, v1, w);
    const bool second = precursor_order(v2, v1p, w);
    if (first && second) return QuasiTotalOutcome::Both;
    if (first) return QuasiTotalOutcome::First;
    if (second) return QuasiTotalOutcome::Second;
    throw InvariantViolation("quasi-totality falsified: neither cross relation holds");
}

double forbidden_region_measure(double beta, const Box2& box, std::int64_t n_samples,
                                std::uint64_t seed) {
    if (!(box.hi1 > box.lo1) || !(box.hi2 > box.lo2))
        throw std::invalid_argument("forbidden_region_measure: invalid box");
    if (n_samples < 1000)
        throw std::invalid_argument("forbidden_region_measure: need at least 1e3 samples");
    Rng rng(seed);
    const double t = std::abs(std::sinh(beta));
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double x1 = rng.uniform(box.lo1, box.hi1);
        const double x2 = rng.uniform(box.lo2, box.hi2);
        const bool in_cones = t * std::abs(x2) < std::abs(x1);
        if (!in_cones) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n_samples);
}

double forbidden_region_square_fraction(double beta) {
    const double t = std::abs(std::sinh(beta));
    if (t <= 1.0) return t / 2.0;
    return 1.0 - 1.0 / (2.0 * t);
}

bool stabilizes_right_wedge(const LorentzTransform& L, double margin) {
    const auto pts = right_wedge_sample(L.dim(), 1000, 0x57ab1eull);
    const Wedge wr = Wedge::right(L.dim());
    const LorentzTransform Linv = L.inverse();
    for (const auto& p : pts) {
        for (const FourVector& q : {L * p, Linv * p}) {
            if (q.c[1] - std::abs(q.c[0]) < -margin * (1.0 + cone_norm(q))) return false;
        }
    }
    return true;
}

StabilizerFactors stabilizer_factorize(const LorentzTransform& L) {
    if (!stabilizes_right_wedge(L))
        throw std::invalid_argument("stabilizer_factorize: L does not stabilize W_r");
    const double beta = std::asinh(L.matrix()(1, 0));
    const LorentzTransform boost = lorentz_boost(L.dim(), 1, beta);
    LorentzTransform rot = boost.inverse() * L;
    const Mat& r = rot.matrix();
    const int d = L.dim();
    double residual = std::abs(r(0, 0) - 1.0);
    residual = std::max(residual, std::abs(r(1, 1) - 1.0));
    for (int a = 0; a < d; ++a) {
        if (a != 0) residual = std::max(residual, std::abs(r(0, a)) + std::abs(r(a, 0)));
        if (a != 1) residual = std::max(residual, std::abs(r(1, a)) + std::abs(r(a, 1)));
    }
    const double rec = (boost.matrix() * r - L.matrix()).cwiseAbs().maxCoeff();
    if (residual > 1e-10 || rec > 1e-10)
        throw std::invalid_argument("stabilizer_factorize: factorization residual too large");
    return StabilizerFactors{beta, std::move(rot)};
}

namespace {

// Point of the centered wedge obtained from an interior point r of W_r.
FourVector centered_point(const Wedge& w, const FourVector& r) {
    FourVector p = w.lorentz() * r;
    return w.complemented() ? -p : p;
}

bool same_centered_wedge(const Wedge& a, const Wedge& b) {
    const auto pts = right_wedge_sample(a.dim(), 400, 0xce11ull);
    const Wedge ac = a.centered(), bc = b.centered();
    for (const auto& r : pts) {
        if (!bc.contains(centered_point(ac, r))) return false;
        if (!ac.contains(centered_point(bc, r))) return false;
    }
    return true;
}

}  // namespace

bool lstar_member(const LorentzTransform& L, const Wedge& w) {
    if (L.dim() != w.dim()) throw std::invalid_argument("lstar_member: dimension mismatch");
    const auto pts = right_wedge_sample(w.dim(), 400, 0x15a7ull);
    const Wedge wc = w.centered();
    const LorentzTransform Linv = L.inverse();
    for (const auto& r : pts) {
        if (!wc.contains(L * r)) return false;
        if (!(Wedge::right(w.dim()).contains(Linv * centered_point(wc, r)))) return false;
    }
    return true;
}

std::optional<LorentzTransform> lstar_representative(const Wedge& w) {
    if (!w.complemented()) return w.lorentz();
    if (w.dim() >= 3) return w.lorentz() * lorentz_flip12(w.dim());
    return std::nullopt;  // -1 on 1+1 dimensional space is not proper orthochronous
}

SeparationCertificate separation_threshold(const RegionSample& vf, const RegionSample& vfp,
                                           const Wedge& w, const Wedge& wperp) {
    if (!same_centered_wedge(wperp, w.complement()))
        throw std::invalid_argument("separation_threshold: wperp is not opposite to w");
    if (vf.points.empty() || vfp.points.empty())
        throw std::invalid_argument("separation_threshold: empty samples");
    if (!precursor_order(vfp, vf, w))
        throw std::domain_error("separation_threshold: ordering Vfp prec_W Vf fails; "
                                "no positive separation exists");

    // Work in the W_r frame: y = s * Lambda^-1 d must clear both boundary
    // functionals l+-(y) = y^1 -+ y^0 by eps times the pulled-back dual
    // cone-norm of the functional.
    const int d = w.dim();
    const double sign = w.complemented() ? -1.0 : 1.0;
    const Mat Minv = sign * w.lorentz().inverse().matrix();
    std::vector<Vec> functionals;
    for (const double s0 : {-1.0, 1.0}) {
        Vec a = Vec::Zero(d);
        a[0] = s0;
        a[1] = 1.0;
        functionals.push_back(Vec(Minv.transpose() * a));
    }
    std::vector<double> dual_norms;
    for (const auto& a : functionals)
        dual_norms.push_back(std::max(std::abs(a[0]), a.tail(d - 1).norm()));

    auto ball_fits = [&](double eps) {
        for (const auto& p : vf.points)
            for (const auto& q : vfp.points) {
                const Vec diff = p.c - q.c;
                for (std::size_t i = 0; i < functionals.size(); ++i)
                    if (functionals[i].dot(diff) < eps * dual_norms[i]) return false;
            }
        return true;
    };

    double lo = 0.0, hi = 1.0;
    while (ball_fits(hi) && hi < 1e6) hi *= 2.0;
    if (!ball_fits(lo))
        throw std::domain_error("separation_threshold: differences touch the cone boundary");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (ball_fits(mid) ? lo : hi) = mid;
    }

    SeparationCertificate cert;
    cert.epsilon = lo;
    cert.delta_max = lo / 3.0;
    const double num = cone_norm(w.translation()) + cone_norm(wperp.translation());
    if (num == 0.0) {
        cert.tau_star = 0.0;
    } else {
        if (cert.epsilon <= 0.0)
            throw std::domain_error("separation_threshold: vanishing separation");
        cert.tau_star = 3.0 * num / cert.epsilon;
    }
    return cert;
}

}  // namespace ws
