#include "wedgescatter/wavepacket.hpp"

#include "wedgescatter/fit.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace ws {

long MomentumGrid::total_nodes() const {
    long n = 1;
    for (int c : count) n *= c;
    return n;
}

Vec MomentumGrid::node(const std::vector<int>& idx) const {
    Vec k(sdim());
    for (int a = 0; a < sdim(); ++a) k[a] = lo[a] + idx[a] * spacing[a];
    return k;
}

long MomentumGrid::flatten(const std::vector<int>& idx) const {
    long f = 0;
    for (int a = 0; a < sdim(); ++a) f = f * count[a] + idx[a];
    return f;
}

namespace {

bool advance(std::vector<int>& idx, const std::vector<int>& count) {
    for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
        if (++idx[a] < count[a]) return true;
        idx[a] = 0;
    }
    return false;
}

void catmull_rom_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = -0.5 * t3 + t2 - 0.5 * t;
    w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
    w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace

WavePacket::WavePacket(double mass, MomentumGrid grid, std::vector<Complex> values,
                       Vec support_lo, Vec support_hi, std::vector<Vec> support_sample,
                       std::function<Complex(const Vec&)> analytic, int interpolation_order)
    : mass_(mass), grid_(std::move(grid)), values_(std::move(values)),
      support_lo_(std::move(support_lo)), support_hi_(std::move(support_hi)),
      support_sample_(std::move(support_sample)), analytic_(std::move(analytic)),
      interpolation_order_(interpolation_order) {
    if (!(mass_ > 0.0)) throw std::invalid_argument("WavePacket: mass must be positive");
    if (interpolation_order_ != 1 && interpolation_order_ != 3)
        throw std::invalid_argument("WavePacket: interpolation order must be 1 or 3");
    if (static_cast<long>(values_.size()) != grid_.total_nodes())
        throw std::invalid_argument("WavePacket: value count does not match grid");
    for (int a = 0; a < grid_.sdim(); ++a) {
        const double h = grid_.spacing[a];
        const double grid_hi = grid_.lo[a] + (grid_.count[a] - 1) * h;
        if (support_lo_[a] < grid_.lo[a] + 2.0 * h - 1e-12 ||
            support_hi_[a] > grid_hi - 2.0 * h + 1e-12)
            throw std::invalid_argument("WavePacket: support box too close to the grid edge");
    }
}

bool WavePacket::in_support_box(const Vec& k) const {
    for (int a = 0; a < sdim(); ++a)
        if (k[a] < support_lo_[a] || k[a] > support_hi_[a]) return false;
    return true;
}

Complex WavePacket::profile_value(const Vec& k) const {
    if (!in_support_box(k)) return Complex(0.0, 0.0);
    if (analytic_) return analytic_(k);
    const int s = sdim();
    std::vector<int> base(s);
    double w[3][4];
    for (int a = 0; a < s; ++a) {
        const double u = (k[a] - grid_.lo[a]) / grid_.spacing[a];
        double fl = std::floor(u);
        if (fl >= grid_.count[a] - 2) fl = grid_.count[a] - 3;  // keep the 4-node stencil inside
        if (fl < 1) fl = 1;
        base[a] = static_cast<int>(fl) - 1;
        if (interpolation_order_ == 3) {
            catmull_rom_weights(u - fl, w[a]);
        } else {
            const double t = u - fl;
            w[a][0] = 0.0;
            w[a][1] = 1.0 - t;
            w[a][2] = t;
            w[a][3] = 0.0;
        }
        if (base[a] < 0 || base[a] + 3 >= grid_.count[a])
            throw std::logic_error("WavePacket: interpolation stencil left the grid");
    }
    // separable tensor-product stencil, s <= 3
    Complex acc(0.0, 0.0);
    std::vector<int> idx(s);
    const int stencil = 1 << (2 * s);  // 4^s
    for (int m = 0; m < stencil; ++m) {
        int mm = m;
        double weight = 1.0;
        for (int a = 0; a < s; ++a) {
            const int off = mm & 3;
            mm >>= 2;
            idx[a] = base[a] + off;
            weight *= w[a][off];
        }
        if (weight != 0.0) acc += weight * values_[grid_.flatten(idx)];
    }
    return acc;
}

WavePacket WavePacket::values_only() const {
    WavePacket copy = *this;
    copy.analytic_ = {};
    return copy;
}

WavePacket make_bump_packet(double mass, const Vec& center, const Vec& radius,
                            int nodes_per_axis, double amplitude, double grid_inflation,
                            int boundary_samples) {
    const int s = static_cast<int>(center.size());
    if (radius.size() != s) throw std::invalid_argument("make_bump_packet: size mismatch");
    if (radius.minCoeff() <= 0.0) throw std::invalid_argument("make_bump_packet: radius <= 0");
    if (nodes_per_axis < 16) throw std::invalid_argument("make_bump_packet: grid too coarse");

    MomentumGrid grid;
    grid.lo = Vec(s);
    grid.spacing = Vec(s);
    grid.count.assign(s, nodes_per_axis);
    for (int a = 0; a < s; ++a) {
        const double half = grid_inflation * radius[a];
        grid.lo[a] = center[a] - half;
        grid.spacing[a] = 2.0 * half / (nodes_per_axis - 1);
    }

    auto bump = [center, radius, amplitude](const Vec& k) {
        double u2 = 0.0;
        for (int a = 0; a < k.size(); ++a) {
            const double u = (k[a] - center[a]) / radius[a];
            u2 += u * u;
        }
        return (u2 < 1.0) ? Complex(amplitude * std::exp(-1.0 / (1.0 - u2)), 0.0)
                          : Complex(0.0, 0.0);
    };

    std::vector<Complex> values(grid.total_nodes());
    std::vector<int> idx(s, 0);
    do {
        values[grid.flatten(idx)] = bump(grid.node(idx));
    } while (advance(idx, grid.count));

    std::vector<Vec> sample;
    if (s == 1) {
        sample.push_back(Vec::Constant(1, center[0] - radius[0]));
        sample.push_back(Vec::Constant(1, center[0] + radius[0]));
    } else if (s == 2) {
        for (int i = 0; i < boundary_samples; ++i) {
            const double th = 2.0 * M_PI * i / boundary_samples;
            Vec p(2);
            p[0] = center[0] + radius[0] * std::cos(th);
            p[1] = center[1] + radius[1] * std::sin(th);
            sample.push_back(p);
        }
    } else {
        // Fibonacci sphere
        const int n = std::max(boundary_samples, 96);
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(1.0 - z * z);
            const double th = golden * i;
            Vec p(3);
            p[0] = center[0] + radius[0] * r * std::cos(th);
            p[1] = center[1] + radius[1] * r * std::sin(th);
            p[2] = center[2] + radius[2] * z;
            sample.push_back(p);
        }
    }

    return WavePacket(mass, std::move(grid), std::move(values), Vec(center - radius),
                      Vec(center + radius), std::move(sample), bump);
}

Complex evaluate_kg(const WavePacket& f, double t, const Vec& x, int refine) {
    if (refine < 1) throw std::invalid_argument("evaluate_kg: refine must be >= 1");
    const int s = f.sdim();
    const MomentumGrid& g = f.grid();

    // Quadrature nodes cover the support box plus one storage cell; the
    // integrand vanishes at the rim, so uniform trapezoid weights apply.
    std::vector<int> count(s);
    Vec lo(s), step(s);
    double cell = 1.0;
    for (int a = 0; a < s; ++a) {
        const double h = g.spacing[a] / refine;
        lo[a] = f.support_lo()[a] - g.spacing[a];
        const double hi = f.support_hi()[a] + g.spacing[a];
        count[a] = static_cast<int>(std::ceil((hi - lo[a]) / h)) + 1;
        step[a] = h;
        cell *= h;
    }
    const double weight = cell / std::pow(2.0 * M_PI, s);

    Complex acc(0.0, 0.0);
    std::vector<int> idx(s, 0);
    Vec k(s);
    do {
        for (int a = 0; a < s; ++a) k[a] = lo[a] + idx[a] * step[a];
        const Complex fv = f.profile_value(k);
        if (fv == Complex(0.0, 0.0)) continue;
        const double phase = k.dot(x) - omega_m(f.mass(), k) * t;
        acc += fv * Complex(std::cos(phase), std::sin(phase));
    } while (advance(idx, count));
    return acc * weight;
}

RegionSample VelocitySupport::enlarged(int directions_per_point) const {
    if (delta == 0.0) return sample;
    RegionSample out = sample;
    const int s = sample.points.empty() ? 0 : sample.points.front().sdim();
    for (const auto& p : sample.points) {
        if (s == 1) {
            for (const double sgn : {-1.0, 1.0}) {
                Vec v = p.spatial();
                v[0] += sgn * delta;
                out.points.emplace_back(1.0, v);
            }
        } else {
            for (int i = 0; i < directions_per_point; ++i) {
                const double th = 2.0 * M_PI * i / directions_per_point;
                Vec v = p.spatial();
                v[0] += delta * std::cos(th);
                v[1] += delta * std::sin(th);
                if (s >= 3 && i % 2 == 1) v[2] += delta * std::sin(th);
                out.points.emplace_back(1.0, v);
            }
        }
    }
    return out;
}

VelocitySupport velocity_support(const WavePacket& f, double delta) {
    if (delta < 0.0) throw std::invalid_argument("velocity_support: delta must be >= 0");
    std::vector<Vec> velocities;
    velocities.reserve(f.support_sample().size());
    for (const auto& k : f.support_sample())
        velocities.push_back(Vec(k / omega_m(f.mass(), k)));
    VelocitySupport vs;
    vs.sample = RegionSample::velocity_points(velocities);
    vs.delta = delta;
    return vs;
}

WavePacket boost_packet(const WavePacket& f, const LorentzTransform& L,
                        int interpolation_order) {
    const int s = f.sdim();
    if (L.dim() != s + 1) throw std::invalid_argument("boost_packet: dimension mismatch");
    const LorentzTransform Linv = L.inverse();

    // supp f^Lambda = Lambda_m^{-1}(supp f): map the boundary sample.
    std::vector<Vec> new_sample;
    new_sample.reserve(f.support_sample().size());
    for (const auto& k : f.support_sample()) {
        Vec p = mass_shell_map(Linv, f.mass(), k);
        if (p.norm() / omega_m(f.mass(), p) >= 1.0)
            throw std::logic_error("boost_packet: support left the velocity ball");
        new_sample.push_back(std::move(p));
    }
    Vec box_lo = new_sample.front(), box_hi = new_sample.front();
    for (const auto& p : new_sample) {
        box_lo = box_lo.cwiseMin(p);
        box_hi = box_hi.cwiseMax(p);
    }

    MomentumGrid grid;
    grid.lo = Vec(s);
    grid.spacing = Vec(s);
    grid.count = f.grid().count;
    for (int a = 0; a < s; ++a) {
        const double width = std::max(box_hi[a] - box_lo[a], 4.0 * f.grid().spacing[a]);
        const double pad = 0.4 * width;
        grid.lo[a] = box_lo[a] - pad;
        grid.spacing[a] = (box_hi[a] - box_lo[a] + 2.0 * pad) / (grid.count[a] - 1);
    }

    std::vector<Complex> values(grid.total_nodes());
    std::vector<int> idx(s, 0);
    do {
        const Vec p = grid.node(idx);
        const Vec km = mass_shell_map(L, f.mass(), p);
        Complex v(0.0, 0.0);
        if (f.in_support_box(km)) {
            const double ratio = omega_m(f.mass(), km) / omega_m(f.mass(), p);
            v = ratio * f.profile_value(km);
        }
        values[grid.flatten(idx)] = v;
    } while (advance(idx, grid.count));

    // closed-form profiles compose exactly; value-built packets rely on the
    // resampled grid and the chosen interpolation order
    std::function<Complex(const Vec&)> analytic;
    if (f.has_analytic_profile()) {
        auto source = std::make_shared<const WavePacket>(f);
        const double mass = f.mass();
        analytic = [source, L, mass](const Vec& p) {
            const Vec km = mass_shell_map(L, mass, p);
            if (!source->in_support_box(km)) return Complex(0.0, 0.0);
            const double ratio = omega_m(mass, km) / omega_m(mass, p);
            return ratio * source->profile_value(km);
        };
    }

    return WavePacket(f.mass(), std::move(grid), std::move(values), std::move(box_lo),
                      std::move(box_hi), std::move(new_sample), std::move(analytic),
                      interpolation_order);
}

WavePacket modified_packet(const WavePacket& f, const LorentzTransform& L) {
    const int s = f.sdim();
    if (L.dim() != s + 1) throw std::invalid_argument("modified_packet: dimension mismatch");
    const LorentzTransform Linv = L.inverse();
    std::vector<Complex> values = f.values();
    std::vector<int> idx(s, 0);
    do {
        const Vec p = f.grid().node(idx);
        const Vec km = mass_shell_map(Linv, f.mass(), p);
        values[f.grid().flatten(idx)] *= omega_m(f.mass(), km) / omega_m(f.mass(), p);
    } while (advance(idx, f.grid().count));

    std::function<Complex(const Vec&)> analytic;
    if (f.has_analytic_profile()) {
        auto source = std::make_shared<const WavePacket>(f);
        const double mass = f.mass();
        analytic = [source, Linv, mass](const Vec& p) {
            const Vec km = mass_shell_map(Linv, mass, p);
            const double ratio = omega_m(mass, km) / omega_m(mass, p);
            return ratio * source->profile_value(p);
        };
    }
    return WavePacket(f.mass(), f.grid(), std::move(values), f.support_lo(), f.support_hi(),
                      f.support_sample(), std::move(analytic), f.interpolation_order());
}

RegionSample adapted_velocity_support(const WavePacket& f, const LorentzTransform& L) {
    const LorentzTransform Linv = L.inverse();
    RegionSample out;
    out.tag = RegionTag::General;
    out.frame = L;
    for (const auto& k : f.support_sample()) {
        // Lambda (1, v') with v' the velocity of Lambda_m^{-1}(k); this is
        // the original shell point rescaled to the tilted hyperplane.
        const FourVector khat(omega_m(f.mass(), k), k);
        const Vec p = mass_shell_map(Linv, f.mass(), k);
        out.points.push_back(khat * (1.0 / omega_m(f.mass(), p)));
    }
    return out;
}

Vec velocity_to_momentum(double mass, const Vec& v) {
    const double v2 = v.squaredNorm();
    if (v2 >= 1.0) throw std::invalid_argument("velocity_to_momentum: |v| >= 1");
    return Vec(mass * v / std::sqrt(1.0 - v2));
}

double velocity_support_distance(const WavePacket& f, const Vec& v) {
    if (v.squaredNorm() < 1.0 && f.in_support_box(velocity_to_momentum(f.mass(), v))) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& k : f.support_sample()) {
        const Vec vb = k / omega_m(f.mass(), k);
        best = std::min(best, (v - vb).norm());
    }
    return best;
}

DecayProfile decay_profile(const WavePacket& f, const std::vector<Vec>& rays,
                           const std::vector<double>& t_values, double epsilon,
                           const DecayOptions& opts) {
    if (t_values.size() < 3) throw std::domain_error("decay_profile: need at least 3 t samples");
    for (std::size_t i = 1; i < t_values.size(); ++i)
        if (t_values[i] <= t_values[i - 1] || t_values[i - 1] <= 0.0)
            throw std::invalid_argument("decay_profile: t_range must be positive and sorted");

    DecayProfile out;
    out.t_values = t_values;
    for (const auto& v : rays) {
        RayScan scan;
        scan.velocity = v;
        scan.inside_eps_cone = velocity_support_distance(f, v) < epsilon;
        for (double t : t_values)
            scan.abs_f.push_back(std::abs(evaluate_kg(f, t, Vec(v * t), opts.refine)));
        scan.slope =
            fit_loglog_exponent(t_values, scan.abs_f, opts.fit_t_lo, opts.fit_t_hi);
        out.rays.push_back(std::move(scan));
    }

    if (opts.compute_l1) {
        const int s = f.sdim();
        double vmax = 0.0;
        for (const auto& k : f.support_sample())
            vmax = std::max(vmax, (k / omega_m(f.mass(), k)).norm());
        for (double t : t_values) {
            const double half = vmax * t + opts.l1_padding;
            std::vector<int> count(s, static_cast<int>(std::ceil(2.0 * half / opts.l1_spacing)) + 1);
            double cell = std::pow(opts.l1_spacing, s);
            double acc = 0.0;
            std::vector<int> idx(s, 0);
            Vec x(s);
            do {
                for (int a = 0; a < s; ++a) x[a] = -half + idx[a] * opts.l1_spacing;
                acc += std::abs(evaluate_kg(f, t, x, opts.refine));
            } while (advance(idx, count));
            out.l1_norms.push_back(acc * cell);
        }
        out.l1_exponent =
            fit_loglog_exponent(t_values, out.l1_norms, opts.fit_t_lo, opts.fit_t_hi);
        out.l1_computed = true;
    }
    return out;
}

}  // namespace ws
