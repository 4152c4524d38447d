#include "wedgescatter/fock.hpp"

#include "wedgescatter/fit.hpp"

#include <algorithm>
#include <cmath>

namespace ws {

FockModel::FockModel(int s, int modes, double h, double m, int nmax, Mat q)
    : sdim(s), modes_per_axis(modes), spacing(h), mass(m), n_max(nmax),
      deformation(std::move(q)) {
    if (sdim < 1 || sdim > 3) throw std::invalid_argument("FockModel: s must be 1..3");
    if (modes_per_axis < 2) throw std::invalid_argument("FockModel: too few modes");
    if (!(spacing > 0.0) || !(mass > 0.0))
        throw std::invalid_argument("FockModel: spacing and mass must be positive");
    if (n_max < 1) throw std::invalid_argument("FockModel: n_max must be >= 1");
    if (deformation.size() == 0) deformation = Mat::Zero(dim(), dim());
    if (deformation.rows() != dim() || deformation.cols() != dim())
        throw std::invalid_argument("FockModel: deformation must be d x d");
    if ((deformation + deformation.transpose()).cwiseAbs().maxCoeff() > 1e-14)
        throw std::invalid_argument("FockModel: deformation must be antisymmetric");
}

Mat FockModel::standard_deformation(int dim, double kappa) {
    Mat q = Mat::Zero(dim, dim);
    q(0, 1) = kappa;
    q(1, 0) = -kappa;
    return q;
}

long FockModel::mode_count() const {
    long n = 1;
    for (int a = 0; a < sdim; ++a) n *= modes_per_axis;
    return n;
}

Vec FockModel::momentum(std::int32_t mode) const {
    Vec k(sdim);
    const double offset = 0.5 * (modes_per_axis - 1);
    for (int a = sdim - 1; a >= 0; --a) {
        k[a] = (mode % modes_per_axis - offset) * spacing;
        mode /= modes_per_axis;
    }
    return k;
}

std::int32_t FockModel::mode_of(const std::vector<int>& idx) const {
    std::int32_t m = 0;
    for (int a = 0; a < sdim; ++a) {
        if (idx[a] < 0 || idx[a] >= modes_per_axis)
            throw std::invalid_argument("FockModel::mode_of: index out of range");
        m = m * modes_per_axis + idx[a];
    }
    return m;
}

std::int32_t FockModel::reflect(std::int32_t mode) const {
    std::int32_t out = 0;
    std::vector<int> digits(sdim);
    for (int a = sdim - 1; a >= 0; --a) {
        digits[a] = mode % modes_per_axis;
        mode /= modes_per_axis;
    }
    for (int a = 0; a < sdim; ++a) out = out * modes_per_axis + (modes_per_axis - 1 - digits[a]);
    return out;
}

double FockModel::energy(std::int32_t mode) const {
    return omega_m(mass, momentum(mode));
}

FourVector FockModel::shell(std::int32_t mode) const {
    const Vec k = momentum(mode);
    return FourVector(omega_m(mass, k), k);
}

std::optional<std::int32_t> FockModel::nearest_mode(const Vec& k) const {
    const double offset = 0.5 * (modes_per_axis - 1);
    std::vector<int> idx(sdim);
    for (int a = 0; a < sdim; ++a) {
        const long i = std::lround(k[a] / spacing + offset);
        if (i < 0 || i >= modes_per_axis) return std::nullopt;
        idx[a] = static_cast<int>(i);
    }
    return mode_of(idx);
}

double FockModel::max_grid_speed() const {
    const double kmax = 0.5 * (modes_per_axis - 1) * spacing;
    const double knorm = kmax * std::sqrt(static_cast<double>(sdim));
    return knorm / std::sqrt(knorm * knorm + mass * mass);
}

double FockModel::recurrence_time() const {
    return M_PI / (spacing * max_grid_speed());
}

FockVector::FockVector(int n_max) : sectors_(n_max + 1) {
    if (n_max < 1) throw std::invalid_argument("FockVector: n_max must be >= 1");
}

FockVector FockVector::vacuum(int n_max) {
    FockVector v(n_max);
    v.sector(0)[ModeKey{}] = Complex(1.0, 0.0);
    return v;
}

FockVector FockVector::one_particle(const std::map<std::int32_t, Complex>& amplitudes,
                                    int n_max) {
    FockVector v(n_max);
    for (const auto& [mode, a] : amplitudes)
        if (a != Complex(0.0, 0.0)) v.sector(1)[ModeKey{mode}] = a;
    return v;
}

double FockVector::norm_squared() const {
    double s = 0.0;
    for (const auto& sec : sectors_)
        for (const auto& [key, a] : sec) s += std::norm(a);
    return s;
}

double FockVector::norm() const {
    return std::sqrt(norm_squared());
}

FockVector& FockVector::operator+=(const FockVector& o) {
    if (o.n_max() != n_max()) throw std::invalid_argument("FockVector: sector mismatch");
    for (int n = 0; n <= n_max(); ++n)
        for (const auto& [key, a] : o.sectors_[n]) sectors_[n][key] += a;
    truncation_leak += o.truncation_leak;
    return *this;
}

FockVector& FockVector::operator-=(const FockVector& o) {
    if (o.n_max() != n_max()) throw std::invalid_argument("FockVector: sector mismatch");
    for (int n = 0; n <= n_max(); ++n)
        for (const auto& [key, a] : o.sectors_[n]) sectors_[n][key] -= a;
    truncation_leak += o.truncation_leak;
    return *this;
}

FockVector& FockVector::operator*=(Complex a) {
    for (auto& sec : sectors_)
        for (auto& [key, v] : sec) v *= a;
    return *this;
}

void FockVector::prune(double floor) {
    for (auto& sec : sectors_)
        for (auto it = sec.begin(); it != sec.end();)
            it = (std::abs(it->second) <= floor) ? sec.erase(it) : std::next(it);
}

Complex inner_product(const FockVector& a, const FockVector& b) {
    if (a.n_max() != b.n_max()) throw std::invalid_argument("inner_product: sector mismatch");
    Complex s(0.0, 0.0);
    for (int n = 0; n <= a.n_max(); ++n) {
        const auto& sa = a.sector(n);
        const auto& sb = b.sector(n);
        const bool a_smaller = sa.size() < sb.size();
        const auto& small = a_smaller ? sa : sb;
        const auto& big = a_smaller ? sb : sa;
        for (const auto& [key, v] : small) {
            const auto it = big.find(key);
            if (it == big.end()) continue;
            s += a_smaller ? std::conj(v) * it->second : std::conj(it->second) * v;
        }
    }
    return s;
}

FieldOp FieldOp::adjoint() const {
    FieldOp out;
    out.sigma = sigma;
    for (const auto& [m, v] : h_minus) out.h_plus[m] = std::conj(v);
    for (const auto& [m, v] : h_plus) out.h_minus[m] = std::conj(v);
    return out;
}

namespace {

Complex deformation_phase(const FockModel& model, int sigma, const FourVector& q_shell,
                          const FourVector& p_total) {
    if (model.deformation.isZero(0.0)) return Complex(1.0, 0.0);
    const double arg = sigma * q_shell.c.dot(model.deformation * p_total.c);
    return Complex(std::cos(arg), std::sin(arg));
}

FourVector total_momentum(const FockModel& model, const ModeKey& key) {
    Vec total = Vec::Zero(model.dim());
    for (const auto m : key) total += model.shell(m).c;
    return FourVector(std::move(total));
}

}  // namespace

FockVector apply_field(const FieldOp& op, const FockVector& psi, const FockModel& model,
                       bool track_leak) {
    FockVector out(psi.n_max());
    out.truncation_leak = psi.truncation_leak;
    SectorMap dropped;

    for (int n = 0; n <= psi.n_max(); ++n) {
        for (const auto& [key, amp] : psi.sector(n)) {
            const FourVector ptot = total_momentum(model, key);

            if (!op.h_plus.empty() && (n < psi.n_max() || track_leak)) {
                auto& target = (n < psi.n_max()) ? out.sector(n + 1) : dropped;
                for (const auto& [q, hq] : op.h_plus) {
                    const Complex phase = deformation_phase(model, op.sigma, model.shell(q), ptot);
                    ModeKey nk = key;
                    nk.insert(std::upper_bound(nk.begin(), nk.end(), q), q);
                    const long mult = std::count(nk.begin(), nk.end(), q);
                    target[nk] += amp * hq * phase * std::sqrt(static_cast<double>(mult));
                }
            }

            if (n >= 1 && !op.h_minus.empty()) {
                auto& target = out.sector(n - 1);
                for (std::size_t i = 0; i < key.size();) {
                    std::size_t j = i;
                    while (j < key.size() && key[j] == key[i]) ++j;
                    const std::int32_t q = key[i];
                    const auto hit = op.h_minus.find(q);
                    if (hit != op.h_minus.end()) {
                        const long count = static_cast<long>(j - i);
                        ModeKey nk;
                        nk.reserve(key.size() - 1);
                        nk.insert(nk.end(), key.begin(), key.begin() + i);
                        nk.insert(nk.end(), key.begin() + i + 1, key.end());
                        const FourVector prem(Vec(ptot.c - model.shell(q).c));
                        const Complex phase =
                            std::conj(deformation_phase(model, op.sigma, model.shell(q), prem));
                        target[nk] +=
                            amp * hit->second * phase * std::sqrt(static_cast<double>(count));
                    }
                    i = j;
                }
            }
        }
    }

    if (!dropped.empty()) {
        double leak2 = 0.0;
        for (const auto& [key, a] : dropped) leak2 += std::norm(a);
        out.truncation_leak += std::sqrt(leak2);
    }
    out.prune(0.0);
    return out;
}

FieldOp smear_field(const FieldOp& op, const ShellSmearing& chi, const FockModel& model) {
    if (chi.on_plus.size() != model.mode_count() || chi.on_minus.size() != model.mode_count())
        throw std::invalid_argument("smear_field: smearing size does not match the grid");
    FieldOp out;
    out.sigma = op.sigma;
    for (const auto& [m, v] : op.h_plus) {
        const Complex w = v * chi.on_plus[m];
        if (w != Complex(0.0, 0.0)) out.h_plus[m] = w;
    }
    for (const auto& [m, v] : op.h_minus) {
        const Complex w = v * chi.on_minus[m];
        if (w != Complex(0.0, 0.0)) out.h_minus[m] = w;
    }
    return out;
}

namespace {

// C^inf monotone step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double plateau_profile(const Vec& k, const std::vector<std::pair<Vec, Vec>>& boxes,
                       double width) {
    double best = 0.0;
    for (const auto& [lo, hi] : boxes) {
        double dist2 = 0.0;
        for (int a = 0; a < k.size(); ++a) {
            const double d = std::max({lo[a] - k[a], k[a] - hi[a], 0.0});
            dist2 += d * d;
        }
        best = std::max(best, smooth_step(1.0 - std::sqrt(dist2) / width));
    }
    return best;
}

}  // namespace

ShellSmearing make_shell_chi(const FockModel& model,
                             const std::vector<std::pair<Vec, Vec>>& plateau_boxes,
                             double width, double negative_scale) {
    if (width <= 0.0) width = 0.5 * model.mass;
    ShellSmearing chi;
    const long n = model.mode_count();
    chi.on_plus.resize(n);
    chi.on_minus.resize(n);
    for (long m = 0; m < n; ++m) {
        const Vec k = model.momentum(static_cast<std::int32_t>(m));
        chi.on_plus[m] = plateau_profile(k, plateau_boxes, width);
        chi.on_minus[m] =
            negative_scale == 0.0
                ? Complex(0.0, 0.0)
                : Complex(negative_scale * plateau_profile(Vec(-k), plateau_boxes, width), 0.0);
    }
    return chi;
}

namespace {

FieldOp hr_multipliers(const FieldOp& op, const WavePacket& f, double tau,
                       const LorentzTransform* frame, const FockModel& model,
                       bool tau_derivative) {
    if (std::abs(f.mass() - model.mass) > 1e-12)
        throw std::invalid_argument("hr_operator: packet and model masses differ");
    const bool identity_frame = (frame == nullptr);
    LorentzTransform inv = identity_frame ? LorentzTransform::identity(model.dim())
                                          : frame->inverse();
    FieldOp out;
    out.sigma = op.sigma;

    if (!tau_derivative) {
        for (const auto& [q, hq] : op.h_plus) {
            const Vec kq = model.momentum(q);
            Complex mult;
            if (identity_frame) {
                mult = f.profile_value(kq);
            } else {
                const Vec p = mass_shell_map(inv, model.mass, kq);
                mult = (omega_m(model.mass, kq) / omega_m(model.mass, p)) * f.profile_value(kq);
            }
            const Complex w = hq * mult;
            if (w != Complex(0.0, 0.0)) out.h_plus[q] = w;
        }
    }

    for (const auto& [q, hq] : op.h_minus) {
        const Vec kq = model.momentum(q);
        Complex mult;
        double omega_p;
        if (identity_frame) {
            omega_p = omega_m(model.mass, kq);
            mult = f.profile_value(Vec(-kq));
        } else {
            const Vec p = mass_shell_map(inv, model.mass, kq);
            omega_p = omega_m(model.mass, p);
            const Vec r = mass_shell_map(*frame, model.mass, Vec(-p));
            mult = (omega_m(model.mass, r) / omega_p) * f.profile_value(r);
        }
        const double arg = -2.0 * omega_p * tau;
        Complex w = hq * mult * Complex(std::cos(arg), std::sin(arg));
        if (tau_derivative) w *= Complex(0.0, -2.0 * omega_p);
        if (w != Complex(0.0, 0.0)) out.h_minus[q] = w;
    }
    return out;
}

}  // namespace

FieldOp hr_operator(const FieldOp& op, const WavePacket& f, double tau,
                    const LorentzTransform& frame, const FockModel& model) {
    return hr_multipliers(op, f, tau, &frame, model, false);
}

FieldOp hr_operator(const FieldOp& op, const WavePacket& f, double tau,
                    const FockModel& model) {
    return hr_multipliers(op, f, tau, nullptr, model, false);
}

FieldOp hr_tau_derivative(const FieldOp& op, const WavePacket& f, double tau,
                          const LorentzTransform& frame, const FockModel& model) {
    return hr_multipliers(op, f, tau, &frame, model, true);
}

FockVector one_particle_project(const FockVector& psi, const FockModel& model,
                                const std::function<bool(const Vec&)>& window) {
    FockVector out(psi.n_max());
    out.truncation_leak = psi.truncation_leak;
    for (const auto& [key, a] : psi.sector(1)) {
        if (window && !window(model.momentum(key.front()))) continue;
        out.sector(1)[key] = a;
    }
    return out;
}

SparseOperator as_operator(const FieldOp& op, const FockModel& model) {
    const FieldOp adj = op.adjoint();
    SparseOperator s;
    s.apply = [op, model](const FockVector& v) { return apply_field(op, v, model, false); };
    s.apply_adjoint =
        [adj, model](const FockVector& v) { return apply_field(adj, v, model, false); };
    return s;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
    SparseOperator s;
    s.apply = [a, b](const FockVector& v) {
        FockVector r = a.apply(b.apply(v));
        r -= b.apply(a.apply(v));
        return r;
    };
    s.apply_adjoint = [a, b](const FockVector& v) {
        FockVector r = b.apply_adjoint(a.apply_adjoint(v));
        r -= a.apply_adjoint(b.apply_adjoint(v));
        return r;
    };
    return s;
}

SparseOperator adjoint(const SparseOperator& a) {
    return SparseOperator{a.apply_adjoint, a.apply};
}

namespace {

void enumerate_multisets(long modes, int max_particles, int first_mode, ModeKey& scratch,
                         std::vector<ModeKey>& out) {
    out.push_back(scratch);
    if (static_cast<int>(scratch.size()) == max_particles) return;
    for (long m = first_mode; m < modes; ++m) {
        scratch.push_back(static_cast<std::int32_t>(m));
        enumerate_multisets(modes, max_particles, m, scratch, out);
        scratch.pop_back();
    }
}

void project_to_cap(FockVector& v, int cap) {
    for (int n = cap + 1; n <= v.n_max(); ++n) v.sector(n).clear();
}

}  // namespace

NormEstimate operator_norm_truncated(const SparseOperator& op, const FockModel& model,
                                     int sector_cap, std::uint64_t seed, double rel_tol,
                                     int max_iterations, FockVector* warm_start) {
    if (sector_cap < 0 || sector_cap > model.n_max)
        throw std::invalid_argument("operator_norm_truncated: bad sector cap");

    FockVector v(model.n_max);
    bool seeded = false;
    if (warm_start && warm_start->n_max() == model.n_max) {
        v = *warm_start;
        project_to_cap(v, sector_cap);
        if (v.norm() > 0.0) seeded = true;
    }
    if (!seeded) {
        std::vector<ModeKey> basis;
        ModeKey scratch;
        enumerate_multisets(model.mode_count(), sector_cap, 0, scratch, basis);
        Rng rng(seed);
        for (const auto& key : basis)
            v.sector(static_cast<int>(key.size()))[key] = Complex(rng.normal(), rng.normal());
    }
    double nv = v.norm();
    v *= Complex(1.0 / nv, 0.0);

    NormEstimate est;
    double lambda_prev = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        FockVector y = op.apply(v);
        FockVector w = op.apply_adjoint(y);
        project_to_cap(w, sector_cap);
        const double lambda = y.norm_squared();  // <v, X*X v> for unit v
        const double wn = w.norm();
        est.iterations = it;
        if (wn == 0.0) {
            est.value = 0.0;
            est.converged = true;
            if (warm_start) *warm_start = FockVector(model.n_max);
            return est;
        }
        w *= Complex(1.0 / wn, 0.0);
        v = std::move(w);
        if (lambda < 1e-28) {  // operator is numerically zero on the capped space
            est.value = std::sqrt(lambda);
            est.converged = true;
            if (warm_start) *warm_start = std::move(v);
            return est;
        }
        if (lambda_prev >= 0.0 &&
            std::abs(lambda - lambda_prev) <= rel_tol * std::max(lambda, 1e-300)) {
            est.value = std::sqrt(lambda);
            est.converged = true;
            if (warm_start) *warm_start = std::move(v);
            return est;
        }
        lambda_prev = lambda;
    }
    est.value = lambda_prev > 0.0 ? std::sqrt(lambda_prev) : 0.0;
    est.converged = false;
    if (warm_start) *warm_start = std::move(v);
    return est;
}

}  // namespace ws
