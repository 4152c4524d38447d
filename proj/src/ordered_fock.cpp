#include "wedgescatter/ordered_fock.hpp"

#include <algorithm>
#include <cmath>

namespace ws {

OneParticleVector OneParticleVector::from_amplitudes(std::map<std::int32_t, Complex> amps,
                                                     const FockModel& model, double floor) {
    for (auto it = amps.begin(); it != amps.end();)
        it = (std::abs(it->second) <= floor) ? amps.erase(it) : std::next(it);
    if (amps.empty())
        throw std::invalid_argument("OneParticleVector: no amplitude above the floor");
    OneParticleVector v;
    v.mass = model.mass;
    Vec lo = model.momentum(amps.begin()->first);
    Vec hi = lo;
    for (const auto& [m, a] : amps) {
        const Vec k = model.momentum(m);
        lo = lo.cwiseMin(k);
        hi = hi.cwiseMax(k);
    }
    v.amplitudes = std::move(amps);
    v.support_lo = std::move(lo);
    v.support_hi = std::move(hi);
    return v;
}

double OneParticleVector::norm() const {
    double s = 0.0;
    for (const auto& [m, a] : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

Complex overlap(const OneParticleVector& a, const OneParticleVector& b) {
    Complex s(0.0, 0.0);
    const bool a_smaller = a.amplitudes.size() < b.amplitudes.size();
    const auto& small = a_smaller ? a.amplitudes : b.amplitudes;
    const auto& big = a_smaller ? b.amplitudes : a.amplitudes;
    for (const auto& [m, v] : small) {
        const auto it = big.find(m);
        if (it == big.end()) continue;
        s += a_smaller ? std::conj(v) * it->second : std::conj(it->second) * v;
    }
    return s;
}

namespace {

// Boundary sample of the support box (corners plus face grids); in one
// dimension the two endpoints are exact extreme points.
std::vector<Vec> box_boundary_sample(const Vec& lo, const Vec& hi, int face_samples) {
    const int s = static_cast<int>(lo.size());
    std::vector<Vec> pts;
    if (s == 1) {
        pts.push_back(lo);
        if (hi[0] > lo[0]) pts.push_back(hi);
        return pts;
    }
    // walk each face with a uniform grid over the free axes
    for (int axis = 0; axis < s; ++axis) {
        for (const double fixed : {lo[axis], hi[axis]}) {
            std::vector<int> idx(s, 0);
            const int per_axis = face_samples;
            bool done = false;
            while (!done) {
                Vec p(s);
                p[axis] = fixed;
                for (int a = 0; a < s; ++a) {
                    if (a == axis) continue;
                    const double t = (per_axis == 1) ? 0.5
                                                     : static_cast<double>(idx[a]) / (per_axis - 1);
                    p[a] = lo[a] + t * (hi[a] - lo[a]);
                }
                pts.push_back(std::move(p));
                done = true;
                for (int a = 0; a < s; ++a) {
                    if (a == axis) continue;
                    if (++idx[a] < per_axis) {
                        done = false;
                        break;
                    }
                    idx[a] = 0;
                }
            }
            if (hi[axis] == lo[axis]) break;
        }
    }
    return pts;
}

}  // namespace

RegionSample vector_velocity_support(const OneParticleVector& psi,
                                     const LorentzTransform& frame, const FockModel& model,
                                     int face_samples) {
    (void)model;
    const LorentzTransform inv = frame.inverse();
    RegionSample out;
    out.tag = RegionTag::General;
    out.frame = frame;
    for (const auto& k : box_boundary_sample(psi.support_lo, psi.support_hi, face_samples)) {
        const FourVector khat(omega_m(psi.mass, k), k);
        const double t = 1.0 / (inv * khat).time();
        out.points.push_back(khat * t);
    }
    return out;
}

bool ordering_check(const OneParticleVector& psi1, const OneParticleVector& psi2,
                    const Wedge& w, const LorentzTransform& frame, const FockModel& model) {
    if (!lstar_member(frame, w))
        throw std::invalid_argument("ordering_check: frame is not in L*(W)");
    const RegionSample v1 = vector_velocity_support(psi1, frame, model);
    const RegionSample v2 = vector_velocity_support(psi2, frame, model);
    return precursor_order(v1, v2, w);
}

Complex OrderedProductState::tensor_amplitude(const std::vector<std::int32_t>& modes) const {
    if (modes.size() != factors.size())
        throw std::invalid_argument("tensor_amplitude: arity mismatch");
    Complex a(1.0, 0.0);
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const auto it = factors[j].amplitudes.find(modes[j]);
        if (it == factors[j].amplitudes.end()) return Complex(0.0, 0.0);
        a *= it->second;
    }
    return a;
}

OrderedProductState ordered_tensor(std::vector<OneParticleVector> factors, const Wedge& w,
                                   const LorentzTransform& frame, Direction direction,
                                   const FockModel& model) {
    if (!lstar_member(frame, w))
        throw std::invalid_argument("ordered_tensor: frame is not in L*(W)");
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
        // outgoing chain psi_1 succ psi_2 succ ...; incoming the reverse
        const bool ok = (direction == Direction::Outgoing)
                            ? ordering_check(factors[i + 1], factors[i], w, frame, model)
                            : ordering_check(factors[i], factors[i + 1], w, frame, model);
        if (!ok)
            throw std::invalid_argument("ordered_tensor: factors " + std::to_string(i) + " and " +
                                        std::to_string(i + 1) +
                                        " violate the declared ordering");
    }
    OrderedProductState s{std::move(factors), w, frame, direction};
    return s;
}

Complex product_state_overlap(const OrderedProductState& a, const OrderedProductState& b) {
    if (a.particle_count() != b.particle_count()) return Complex(0.0, 0.0);
    Complex s(1.0, 0.0);
    for (int j = 0; j < a.particle_count(); ++j) s *= overlap(a.factors[j], b.factors[j]);
    return s;
}

namespace {

Complex grid_interpolate(const std::map<std::int32_t, Complex>& amps, const FockModel& model,
                         const Vec& p) {
    // Catmull-Rom over the mode lattice, zeros off the sparse support.
    const int s = model.sdim;
    const double offset = 0.5 * (model.modes_per_axis - 1);
    std::vector<int> base(s);
    double w[3][4];
    for (int a = 0; a < s; ++a) {
        const double u = p[a] / model.spacing + offset;
        const double fl = std::floor(u);
        base[a] = static_cast<int>(fl) - 1;
        if (base[a] < 0 || base[a] + 3 >= model.modes_per_axis)
            throw std::domain_error("u1_action: resampled support left the grid");
        const double t = u - fl;
        const double t2 = t * t, t3 = t2 * t;
        w[a][0] = -0.5 * t3 + t2 - 0.5 * t;
        w[a][1] = 1.5 * t3 - 2.5 * t2 + 1.0;
        w[a][2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
        w[a][3] = 0.5 * t3 - 0.5 * t2;
    }
    Complex acc(0.0, 0.0);
    std::vector<int> idx(s);
    const int stencil = 1 << (2 * s);
    for (int m = 0; m < stencil; ++m) {
        int mm = m;
        double weight = 1.0;
        for (int a = 0; a < s; ++a) {
            idx[a] = base[a] + (mm & 3);
            weight *= w[a][mm & 3];
            mm >>= 2;
        }
        const auto it = amps.find(model.mode_of(idx));
        if (it != amps.end()) acc += weight * it->second;
    }
    return acc;
}

}  // namespace

OneParticleVector u1_action(const PoincareElement& lambda, const OneParticleVector& psi,
                            const FockModel& model) {
    const LorentzTransform& L = lambda.lorentz;
    const bool pure_translation = L.matrix().isIdentity(1e-15);

    std::map<std::int32_t, Complex> out;
    if (pure_translation) {
        out = psi.amplitudes;
    } else {
        const LorentzTransform Linv = L.inverse();
        // guard: mapped support must stay inside the grid
        for (const auto& corner : box_boundary_sample(psi.support_lo, psi.support_hi, 2)) {
            const Vec image = mass_shell_map(L, psi.mass, corner);
            if (!model.nearest_mode(image))
                throw std::domain_error("u1_action: boosted support escapes the grid");
        }
        for (long m = 0; m < model.mode_count(); ++m) {
            const std::int32_t mode = static_cast<std::int32_t>(m);
            const Vec k = model.momentum(mode);
            const Vec p = mass_shell_map(Linv, psi.mass, k);
            bool inside = true;
            for (int a = 0; a < model.sdim; ++a)
                if (p[a] < psi.support_lo[a] - model.spacing ||
                    p[a] > psi.support_hi[a] + model.spacing)
                    inside = false;
            if (!inside) continue;
            const Complex v = grid_interpolate(psi.amplitudes, model, p);
            if (v == Complex(0.0, 0.0)) continue;
            const double weight = std::sqrt(omega_m(psi.mass, p) / omega_m(psi.mass, k));
            out[mode] = weight * v;
        }
    }

    // translation phases e^{i(omega t - k.x)}
    const FourVector& a = lambda.translation;
    if (a.c.cwiseAbs().maxCoeff() > 0.0) {
        for (auto& [mode, v] : out) {
            const FourVector khat = model.shell(mode);
            const double arg = khat.time() * a.time() - khat.spatial().dot(a.spatial());
            v *= Complex(std::cos(arg), std::sin(arg));
        }
    }
    return OneParticleVector::from_amplitudes(std::move(out), model);
}

OrderedProductState u0_action(const PoincareElement& lambda, const OrderedProductState& state,
                              const FockModel& model) {
    std::vector<OneParticleVector> factors;
    factors.reserve(state.factors.size());
    for (const auto& f : state.factors) factors.push_back(u1_action(lambda, f, model));
    const Wedge new_wedge = state.wedge.transformed(lambda);
    const LorentzTransform new_frame = lambda.lorentz * state.frame;
    return ordered_tensor(std::move(factors), new_wedge, new_frame, state.direction, model);
}

}  // namespace ws
