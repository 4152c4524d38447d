#include "wedgescatter/scattering.hpp"

#include "wedgescatter/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ws {

namespace {

std::vector<Vec> ellipsoid_boundary(const Vec& center, const Vec& radius, int samples) {
    const int s = static_cast<int>(center.size());
    std::vector<Vec> out;
    if (s == 1) {
        out.push_back(Vec::Constant(1, center[0] - radius[0]));
        out.push_back(Vec::Constant(1, center[0] + radius[0]));
    } else if (s == 2) {
        for (int i = 0; i < samples; ++i) {
            const double th = 2.0 * M_PI * i / samples;
            Vec p(2);
            p[0] = center[0] + radius[0] * std::cos(th);
            p[1] = center[1] + radius[1] * std::sin(th);
            out.push_back(std::move(p));
        }
    } else {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < samples; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / samples;
            const double r = std::sqrt(1.0 - z * z);
            Vec p(3);
            p[0] = center[0] + radius[0] * r * std::cos(golden * i);
            p[1] = center[1] + radius[1] * r * std::sin(golden * i);
            p[2] = center[2] + radius[2] * z;
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<Vec> box_corner_sample(const Vec& lo, const Vec& hi) {
    const int s = static_cast<int>(lo.size());
    std::vector<Vec> out;
    for (int mask = 0; mask < (1 << s); ++mask) {
        Vec p(s);
        for (int a = 0; a < s; ++a) p[a] = (mask >> a & 1) ? hi[a] : lo[a];
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

WavePacket make_grid_bump_packet(const FockModel& model, const Vec& center, const Vec& radius,
                                 double amplitude, int margin_cells) {
    const int s = model.sdim;
    if (center.size() != s || radius.size() != s)
        throw std::invalid_argument("make_grid_bump_packet: dimension mismatch");
    const double h = model.spacing;
    const double offset = 0.5 * (model.modes_per_axis - 1);

    std::vector<int> start(s), count(s);
    for (int a = 0; a < s; ++a) {
        const long i_lo = std::lround(std::floor((center[a] - radius[a]) / h + offset)) -
                          margin_cells;
        const long i_hi = std::lround(std::ceil((center[a] + radius[a]) / h + offset)) +
                          margin_cells;
        if (i_lo < 0 || i_hi >= model.modes_per_axis)
            throw std::invalid_argument(
                "make_grid_bump_packet: support window exceeds the model grid");
        start[a] = static_cast<int>(i_lo);
        count[a] = static_cast<int>(i_hi - i_lo + 1);
    }

    MomentumGrid grid;
    grid.lo = Vec(s);
    grid.spacing = Vec::Constant(s, h);
    grid.count = count;
    {
        std::vector<int> idx(s);
        for (int a = 0; a < s; ++a) idx[a] = start[a];
        // anchor exactly on the model lattice
        const Vec anchor = model.momentum(model.mode_of(idx));
        grid.lo = anchor;
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
    bool more = true;
    while (more) {
        values[grid.flatten(idx)] = bump(grid.node(idx));
        more = false;
        for (int a = s - 1; a >= 0; --a) {
            if (++idx[a] < count[a]) {
                more = true;
                break;
            }
            idx[a] = 0;
        }
    }

    return WavePacket(model.mass, std::move(grid), std::move(values), Vec(center - radius),
                      Vec(center + radius), ellipsoid_boundary(center, radius, 64), bump);
}

WavePacket make_packet_from_grid_amplitudes(const FockModel& model,
                                            const std::map<std::int32_t, Complex>& amps,
                                            int margin_cells) {
    if (amps.empty())
        throw std::invalid_argument("make_packet_from_grid_amplitudes: empty amplitudes");
    const int s = model.sdim;
    const double h = model.spacing;
    const double offset = 0.5 * (model.modes_per_axis - 1);

    Vec lo = model.momentum(amps.begin()->first), hi = lo;
    for (const auto& [m, a] : amps) {
        const Vec k = model.momentum(m);
        lo = lo.cwiseMin(k);
        hi = hi.cwiseMax(k);
    }

    std::vector<int> start(s), count(s);
    for (int a = 0; a < s; ++a) {
        const long i_lo = std::lround(lo[a] / h + offset) - margin_cells;
        const long i_hi = std::lround(hi[a] / h + offset) + margin_cells;
        if (i_lo < 0 || i_hi >= model.modes_per_axis)
            throw std::invalid_argument(
                "make_packet_from_grid_amplitudes: window exceeds the model grid");
        start[a] = static_cast<int>(i_lo);
        count[a] = static_cast<int>(i_hi - i_lo + 1);
    }

    MomentumGrid grid;
    grid.spacing = Vec::Constant(s, h);
    grid.count = count;
    {
        std::vector<int> anchor_idx(s);
        for (int a = 0; a < s; ++a) anchor_idx[a] = start[a];
        grid.lo = model.momentum(model.mode_of(anchor_idx));
    }

    std::vector<Complex> values(grid.total_nodes(), Complex(0.0, 0.0));
    for (const auto& [m, amp] : amps) {
        const Vec k = model.momentum(m);
        std::vector<int> idx(s);
        for (int a = 0; a < s; ++a) {
            const long i = std::lround(k[a] / h + offset) - start[a];
            if (i < 0 || i >= count[a])
                throw std::logic_error("make_packet_from_grid_amplitudes: index mapping failed");
            idx[a] = static_cast<int>(i);
        }
        values[grid.flatten(idx)] = amp;
    }

    // widen the declared support by one cell so interpolation between the
    // outermost carrying nodes stays inside the box
    const Vec box_lo = lo - Vec::Constant(s, h);
    const Vec box_hi = hi + Vec::Constant(s, h);
    std::vector<Vec> sample;
    if (s == 1) {
        sample.push_back(box_lo);
        sample.push_back(box_hi);
    } else {
        sample = box_corner_sample(box_lo, box_hi);
        for (const auto& p : ellipsoid_boundary(Vec(0.5 * (box_lo + box_hi)),
                                                Vec(0.5 * (box_hi - box_lo)), 32))
            sample.push_back(p);
    }
    return WavePacket(model.mass, std::move(grid), std::move(values), box_lo, box_hi,
                      std::move(sample));
}

FieldOp sigma_flip(const FieldOp& op) {
    FieldOp out = op;
    out.sigma = -op.sigma;
    return out;
}

HRFamily::HRFamily(FieldOp b, WavePacket f) : base(std::move(b)), base_perp(sigma_flip(base)),
                                              packet(std::move(f)) {}

HRSpec make_hr_spec(std::vector<HRFamily> entries, const Wedge& wedge,
                    const LorentzTransform& frame, Direction direction,
                    const FockModel& model) {
    (void)model;
    if (!lstar_member(frame, wedge))
        throw std::invalid_argument("make_hr_spec: frame is not in L*(W)");
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
        const RegionSample vi = adapted_velocity_support(entries[i].packet, frame);
        const RegionSample vj = adapted_velocity_support(entries[i + 1].packet, frame);
        // outgoing: V_{i+1} prec_W V_i; incoming reversed
        const bool ok = (direction == Direction::Outgoing) ? precursor_order(vj, vi, wedge)
                                                           : precursor_order(vi, vj, wedge);
        if (!ok)
            throw std::invalid_argument("make_hr_spec: packets " + std::to_string(i) + " and " +
                                        std::to_string(i + 1) +
                                        " violate the velocity-support ordering");
    }
    return HRSpec{std::move(entries), wedge, frame, direction};
}

FockVector psi_tau(const HRSpec& spec, double tau, const FockModel& model) {
    FockVector psi = FockVector::vacuum(model.n_max);
    for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
        const FieldOp b = hr_operator(it->base, it->packet, tau, spec.frame, model);
        psi = apply_field(b, psi, model);
    }
    return psi;
}

FockVector psi_tau_derivative(const HRSpec& spec, double tau, const FockModel& model) {
    const int n = static_cast<int>(spec.entries.size());
    FockVector acc(model.n_max);
    for (int k = 0; k < n; ++k) {
        FockVector psi = FockVector::vacuum(model.n_max);
        for (int j = n - 1; j >= 0; --j) {
            const auto& e = spec.entries[j];
            const FieldOp b = (j == k) ? hr_tau_derivative(e.base, e.packet, tau, spec.frame, model)
                                       : hr_operator(e.base, e.packet, tau, spec.frame, model);
            psi = apply_field(b, psi, model);
        }
        acc += psi;
    }
    return acc;
}

ConvergenceScan convergence_scan(const HRSpec& spec, const std::vector<double>& taus,
                                 const FockModel& model, int fd_stride) {
    if (taus.size() < 2) throw std::invalid_argument("convergence_scan: degenerate grid");
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (taus[i] <= taus[i - 1]) throw std::invalid_argument("convergence_scan: grid not increasing");
    if (taus.back() > model.recurrence_guard())
        throw std::invalid_argument("convergence_scan: grid exceeds the recurrence guard");

    ConvergenceScan scan;
    scan.taus = taus;
    std::vector<FockVector> states;
    states.reserve(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        states.push_back(psi_tau(spec, taus[i], model));
        scan.leaks.push_back(states.back().truncation_leak);
        FockVector d = psi_tau_derivative(spec, taus[i], model);
        scan.dpsi_norms.push_back(d.norm());
        if (fd_stride > 0 && i % fd_stride == 0) {
            // fixed small step: the second-order error must stay below the
            // 1e-6 relative agreement tolerance even at the window end
            const double step = 5e-4;
            FockVector hi = psi_tau(spec, taus[i] + step, model);
            hi -= psi_tau(spec, taus[i] - step, model);
            hi *= Complex(1.0 / (2.0 * step), 0.0);
            hi -= d;
            scan.fd_mismatch.push_back(hi.norm());
        }
    }
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
        FockVector diff = states[i + 1];
        diff -= states[i];
        scan.increment_norms.push_back(diff.norm());
        mids.push_back(0.5 * (taus[i] + taus[i + 1]));
    }
    double max_inc = 0.0;
    for (double v : scan.increment_norms) max_inc = std::max(max_inc, v);
    if (max_inc <= 1e-14) {
        scan.increments_all_zero = true;
        scan.increment_exponent = std::numeric_limits<double>::quiet_NaN();
    } else {
        scan.increment_exponent =
            fit_loglog_exponent(mids, scan.increment_norms, mids.front(), mids.back());
    }
    return scan;
}

CommutatorScan commutator_scan(const HRFamily& left, const HRFamily& right,
                               const LorentzTransform& frame, const Wedge& wedge,
                               const std::vector<double>& taus, const FockModel& model,
                               int sector_cap, std::uint64_t seed) {
    if (taus.empty()) throw std::invalid_argument("commutator_scan: empty grid");
    const bool positive = taus.front() > 0.0;
    for (double t : taus)
        if ((t > 0.0) != positive)
            throw std::invalid_argument("commutator_scan: grid must not cross tau = 0");

    const RegionSample v_left = adapted_velocity_support(left.packet, frame);
    const RegionSample v_right = adapted_velocity_support(right.packet, frame);
    const bool ordered = positive ? precursor_order(v_right, v_left, wedge)
                                  : precursor_order(v_left, v_right, wedge);
    if (!ordered)
        throw std::invalid_argument("commutator_scan: velocity supports are not ordered for "
                                    "this tau sign");

    CommutatorScan scan;
    scan.taus = taus;
    std::array<FockVector, 4> warm;
    for (auto& w : warm) w = FockVector(model.n_max);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double tau = taus[i];
        const FieldOp b = hr_operator(left.base, left.packet, tau, frame, model);
        const FieldOp bp = hr_operator(right.base_perp, right.packet, tau, frame, model);
        const FieldOp db = hr_tau_derivative(left.base, left.packet, tau, frame, model);
        const SparseOperator ob = as_operator(b, model);
        const SparseOperator obp = as_operator(bp, model);
        const SparseOperator odb = as_operator(db, model);
        const std::array<SparseOperator, 4> variants = {
            commutator(obp, ob),
            commutator(adjoint(obp), ob),
            commutator(obp, adjoint(ob)),
            commutator(obp, odb),
        };
        for (int v = 0; v < 4; ++v) {
            const NormEstimate est = operator_norm_truncated(variants[v], model, sector_cap,
                                                             seed + v, 1e-8, 600, &warm[v]);
            scan.norms[v].push_back(est.value);
            scan.all_converged = scan.all_converged && est.converged;
        }
    }
    for (int v = 0; v < 4; ++v) {
        double peak = 0.0;
        for (double x : scan.norms[v]) peak = std::max(peak, x);
        if (peak <= 1e-14) {
            scan.all_zero[v] = true;
            scan.exponents[v] = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double lo = std::min(std::abs(taus.front()), std::abs(taus.back()));
            const double hi = std::max(std::abs(taus.front()), std::abs(taus.back()));
            std::vector<double> abs_taus;
            for (double t : taus) abs_taus.push_back(std::abs(t));
            scan.exponents[v] = fit_loglog_exponent(abs_taus, scan.norms[v], lo, hi);
        }
    }
    return scan;
}

namespace {

// Cross-family rear-comparability, checked on adapted supports. A slot
// index past the front of a family denotes the empty region, and orderings
// against the empty region hold vacuously (the same convention that makes
// the precursor relation anti-symmetric).
bool cross_ordering_holds(const HRSpec& a, const HRSpec& b, const FockModel& model) {
    (void)model;
    const int n = static_cast<int>(a.entries.size());
    const int np = static_cast<int>(b.entries.size());
    const int min_n = std::min(n, np);
    auto adapted = [](const HRSpec& s, int k) {
        return adapted_velocity_support(s.entries[k].packet, s.frame);
    };
    for (int j = 0; j < min_n; ++j) {
        bool ok = (np - j - 2 < 0) ||
                  precursor_order(adapted(a, n - j - 1), adapted(b, np - j - 2), a.wedge);
        if (!ok)
            ok = (n - j - 2 < 0) ||
                 precursor_order(adapted(b, np - j - 1), adapted(a, n - j - 2), a.wedge);
        if (!ok) return false;
    }
    return true;
}

}  // namespace

FockStructureCheck fock_structure_check(const HRSpec& spec_a, const HRSpec& spec_b,
                                        const std::vector<double>& taus,
                                        const FockModel& model) {
    if (spec_a.direction != spec_b.direction)
        throw std::invalid_argument("fock_structure_check: directions differ");
    if (!cross_ordering_holds(spec_a, spec_b, model))
        throw std::invalid_argument(
            "fock_structure_check: cross-family ordering condition unverifiable");

    FockStructureCheck check;
    check.taus = taus;

    const int n = static_cast<int>(spec_a.entries.size());
    const int np = static_cast<int>(spec_b.entries.size());
    if (n == np) {
        Complex prod(1.0, 0.0);
        const double tau0 = taus.empty() ? 0.0 : taus.front();
        for (int k = 0; k < n; ++k) {
            const FieldOp bk =
                hr_operator(spec_a.entries[k].base, spec_a.entries[k].packet, tau0, spec_a.frame,
                            model);
            const FieldOp bkp =
                hr_operator(spec_b.entries[k].base, spec_b.entries[k].packet, tau0, spec_b.frame,
                            model);
            const FockVector va = apply_field(bk, FockVector::vacuum(model.n_max), model);
            const FockVector vb = apply_field(bkp, FockVector::vacuum(model.n_max), model);
            prod *= inner_product(va, vb);
        }
        check.fock_product = prod;
    }

    for (double tau : taus) {
        const FockVector a = psi_tau(spec_a, tau, model);
        const FockVector b = psi_tau(spec_b, tau, model);
        const Complex ov = inner_product(a, b);
        check.overlaps.push_back(ov);
        check.residuals.push_back(std::abs(ov - check.fock_product));
    }
    return check;
}

LambdaIndependenceScan lambda_independence(const HRSpec& spec, const LorentzTransform& frame2,
                                           int gamma_steps, const std::vector<double>& taus,
                                           const FockModel& model) {
    if (!lstar_member(frame2, spec.wedge))
        throw std::invalid_argument("lambda_independence: second frame is not in L*(W)");
    if (gamma_steps < 2) throw std::invalid_argument("lambda_independence: need >= 2 steps");

    // stabilizer coordinates of Lambda^{-1} Lambda'
    const LorentzTransform bar = spec.frame.inverse() * frame2;
    const StabilizerFactors factors = stabilizer_factorize(bar);
    double rot_angle = 0.0;
    if (model.dim() >= 4) rot_angle = std::atan2(factors.rotation.matrix()(3, 2),
                                                 factors.rotation.matrix()(2, 2));

    auto frame_at = [&](double g) {
        LorentzTransform f = spec.frame * lorentz_boost(model.dim(), 1, g * factors.rapidity);
        if (model.dim() >= 4 && rot_angle != 0.0)
            f = f * lorentz_rotation(model.dim(), 2, 3, g * rot_angle);
        return f;
    };

    auto spec_at = [&](const LorentzTransform& frame) {
        std::vector<HRFamily> entries;
        entries.reserve(spec.entries.size());
        for (const auto& e : spec.entries)
            entries.emplace_back(e.base, modified_packet(e.packet, frame));
        return make_hr_spec(std::move(entries), spec.wedge, frame, spec.direction, model);
    };

    // membership and ordering checks along the interpolation path
    for (int i = 0; i <= gamma_steps; ++i) {
        const double g = static_cast<double>(i) / gamma_steps;
        const LorentzTransform f = frame_at(g);
        if (!lstar_member(f, spec.wedge))
            throw std::invalid_argument("lambda_independence: path left L*(W)");
        spec_at(f);  // construction re-verifies the adapted ordering
    }

    const HRSpec sa = spec_at(spec.frame);
    const HRSpec sb = spec_at(frame2);

    LambdaIndependenceScan scan;
    scan.taus = taus;
    for (double tau : taus) {
        FockVector diff = psi_tau(sa, tau, model);
        diff -= psi_tau(sb, tau, model);
        scan.difference_norms.push_back(diff.norm());
    }
    double peak = 0.0;
    for (double v : scan.difference_norms) peak = std::max(peak, v);
    if (peak <= 1e-14) {
        scan.all_zero = true;
        scan.exponent = std::numeric_limits<double>::quiet_NaN();
    } else {
        scan.exponent = fit_loglog_exponent(taus, scan.difference_norms,
                                            std::abs(taus.front()), std::abs(taus.back()));
    }
    return scan;
}

WaveOperatorResult wave_operator_apply(const OrderedProductState& state, const FieldOp& seed,
                                       const FockModel& model, const WaveOperatorOptions& opts) {
    const LorentzTransform inv = state.frame.inverse();

    std::vector<HRFamily> entries;
    entries.reserve(state.factors.size());
    for (const auto& psi : state.factors) {
        // invert the one-particle multiplier: creation amplitude at q is
        // [omega(q)/omega(p)] ftilde(q) g(q), so ftilde(q) = psi(q) omega(p) / (omega(q) g(q))
        std::map<std::int32_t, Complex> ftilde;
        for (const auto& [q, amp] : psi.amplitudes) {
            const auto it = seed.h_plus.find(q);
            const double gmag = (it == seed.h_plus.end()) ? 0.0 : std::abs(it->second);
            if (gmag < opts.divide_guard)
                throw std::domain_error(
                    "wave_operator_apply: amplitude on a dead seed mode (divide guard)");
            const Vec kq = model.momentum(q);
            const Vec p = mass_shell_map(inv, model.mass, kq);
            ftilde[q] = amp * omega_m(model.mass, p) /
                        (omega_m(model.mass, kq) * it->second);
        }
        entries.emplace_back(seed, make_packet_from_grid_amplitudes(model, ftilde));
    }

    const HRSpec spec =
        make_hr_spec(std::move(entries), state.wedge, state.frame, state.direction, model);

    const double guard = model.recurrence_guard();
    const double tau_end = opts.tau_fraction * guard;
    const double sign = (state.direction == Direction::Outgoing) ? 1.0 : -1.0;

    WaveOperatorResult result;
    result.tau_used = sign * tau_end;
    result.state = psi_tau(spec, result.tau_used, model);
    result.truncation_leak = result.state.truncation_leak;
    const double step = tau_end / std::max(opts.certificate_steps * 8, 16);
    FockVector prev = psi_tau(spec, sign * (tau_end - step), model);
    prev -= result.state;
    result.last_increment = prev.norm();
    return result;
}

SMatrixResult smatrix_element(const OrderedProductState& final_state, const FieldOp& seed_final,
                              const OrderedProductState& initial_state,
                              const FieldOp& seed_initial, const FockModel& model,
                              const WaveOperatorOptions& opts) {
    if (final_state.direction != Direction::Outgoing)
        throw std::invalid_argument("smatrix_element: final state must be outgoing-ordered");
    if (initial_state.direction != Direction::Incoming)
        throw std::invalid_argument("smatrix_element: initial state must be incoming-ordered");
    SMatrixResult r;
    r.outgoing = wave_operator_apply(final_state, seed_final, model, opts);
    r.incoming = wave_operator_apply(initial_state, seed_initial, model, opts);
    r.value = inner_product(r.outgoing.state, r.incoming.state);
    return r;
}

}  // namespace ws
