#include "efq/kraus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace efq {

namespace {

constexpr double kPruneNorm = 1e-14;
constexpr double kPrunedMassBudget = 1e-12;
constexpr double kChannelTol = 1e-10;

const std::vector<std::string> kBobBasis = {"0_b", "1_b"};
const std::vector<std::string> kInnerJointBasis = {"0_a1 0_b", "1_a1 0_b", "0_a1 1_b"};
const std::vector<std::string> kA1Basis = {"0_a1", "1_a1"};
const std::vector<std::string> kOuterBasis = {"0_a2 0_a1", "1_a2 0_a1", "0_a2 1_a1"};

void require_same_basis(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": basis mismatch");
}

}  // namespace

CMat CMat::identity(int n) {
    CMat r(n);
    for (int i = 0; i < n; ++i) r.at(i, i) = 1.0;
    return r;
}

CMat CMat::operator*(const CMat& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("CMat: dimension mismatch");
    CMat r(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = 0; k < n_; ++k) {
            const cplx aik = at(i, k);
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < n_; ++j) r.at(i, j) += aik * rhs.at(k, j);
        }
    }
    return r;
}

CMat CMat::operator+(const CMat& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("CMat: dimension mismatch");
    CMat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += rhs.a_[i];
    return r;
}

CMat CMat::operator-(const CMat& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("CMat: dimension mismatch");
    CMat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= rhs.a_[i];
    return r;
}

CMat CMat::dagger() const {
    CMat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
}

CMat CMat::scaled(const cplx& s) const {
    CMat r = *this;
    for (auto& z : r.a_) z *= s;
    return r;
}

cplx CMat::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

double CMat::frob2() const {
    double s = 0.0;
    for (const auto& z : a_) s += std::norm(z);
    return s;
}

double CMat::max_abs_diff(const CMat& rhs) const {
    if (n_ != rhs.n_) throw std::invalid_argument("CMat: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) d = std::max(d, std::abs(a_[i] - rhs.a_[i]));
    return d;
}

std::pair<double, double> hermitian_eig_bounds(const CMat& h) {
    // Real symmetric embedding [[A, -B], [B, A]] of H = A + iB doubles each
    // eigenvalue; a plain Jacobi iteration then suffices at these dimensions.
    const int n = h.dim();
    const int m = 2 * n;
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    auto el = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * m + c]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx z = 0.5 * (h.at(i, j) + std::conj(h.at(j, i)));  // hermitize
            el(i, j) = z.real();
            el(n + i, n + j) = z.real();
            el(i, n + j) = -z.imag();
            el(n + i, j) = z.imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) off += el(p, q) * el(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < m; ++p) {
            for (int q = p + 1; q < m; ++q) {
                const double apq = el(p, q);
                if (std::abs(apq) < 1e-18) continue;
                const double theta = 0.5 * std::atan2(2.0 * apq, el(q, q) - el(p, p));
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                for (int i = 0; i < m; ++i) {
                    const double aip = el(i, p);
                    const double aiq = el(i, q);
                    el(i, p) = c * aip - s * aiq;
                    el(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < m; ++i) {
                    const double api = el(p, i);
                    const double aqi = el(q, i);
                    el(p, i) = c * api - s * aqi;
                    el(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    double lo = el(0, 0), hi = el(0, 0);
    for (int i = 1; i < m; ++i) {
        lo = std::min(lo, el(i, i));
        hi = std::max(hi, el(i, i));
    }
    return {lo, hi};
}

CMat KrausChannel::op_sum() const {
    CMat s(dim());
    for (const auto& x : ops) s = s + x.dagger() * x;
    return s;
}

void KrausChannel::check_contractive(double tol) const {
    const auto [lo, hi] = hermitian_eig_bounds(op_sum() - CMat::identity(dim()));
    (void)lo;
    if (hi > tol) throw std::logic_error("KrausChannel: set is trace increasing");
}

double KrausChannel::completeness_defect() const {
    const auto [lo, hi] = hermitian_eig_bounds(op_sum() - CMat::identity(dim()));
    return std::max(std::abs(lo), std::abs(hi));
}

DensityOp DensityOp::pure(std::vector<std::string> basis, std::span<const cplx> amps) {
    if (amps.size() != basis.size()) {
        throw std::invalid_argument("DensityOp: amplitude count does not match the basis");
    }
    const int n = static_cast<int>(basis.size());
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = amps[i] * std::conj(amps[j]);
    return {std::move(basis), std::move(m)};
}

void DensityOp::check(double herm_tol, double psd_floor) const {
    const int n = mat.dim();
    if (n != static_cast<int>(basis.size())) {
        throw std::logic_error("DensityOp: dimension does not match the basis");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (std::abs(mat.at(i, j) - std::conj(mat.at(j, i))) > herm_tol) {
                throw std::logic_error("DensityOp: matrix is not Hermitian");
            }
        }
    }
    if (mat.trace().real() > 1.0 + kTol) throw std::logic_error("DensityOp: trace exceeds 1");
    if (hermitian_eig_bounds(mat).first < -psd_floor) {
        throw std::logic_error("DensityOp: matrix is not positive semidefinite");
    }
}

DensityOp apply(const KrausChannel& ch, const DensityOp& rho) {
    require_same_basis(ch.basis, rho.basis, "apply");
    CMat out(ch.dim());
    for (const auto& x : ch.ops) out = out + x * rho.mat * x.dagger();
    return {rho.basis, out};
}

KrausChannel compose(const KrausChannel& x, const KrausChannel& y) {
    require_same_basis(x.basis, y.basis, "compose");
    KrausChannel r;
    r.basis = x.basis;
    r.ops.reserve(x.ops.size() * y.ops.size());
    double pruned_mass = 0.0;
    for (const auto& xi : x.ops) {
        for (const auto& yj : y.ops) {
            CMat p = xi * yj;
            const double f2 = p.frob2();
            if (f2 < kPruneNorm * kPruneNorm) {
                pruned_mass += f2;
                continue;
            }
            r.ops.push_back(std::move(p));
        }
    }
    if (pruned_mass > kPrunedMassBudget) {
        throw std::logic_error("compose: pruned operator mass exceeds budget");
    }
    return r;
}

KrausChannel power(const KrausChannel& x, int n) {
    if (n < 0) throw std::invalid_argument("power: exponent must be >= 0");
    KrausChannel r = identity_channel(x.basis);
    for (int i = 0; i < n; ++i) r = compose(x, r);
    return r;
}

KrausChannel bob_block_channel() {
    KrausChannel ch;
    ch.basis = kBobBasis;
    CMat absorb(2);
    absorb.at(0, 1) = 1.0;  // |0_b><1_b|
    CMat keep(2);
    keep.at(0, 0) = 1.0;    // |0_b><0_b|
    ch.ops = {absorb, keep};
    return ch;
}

KrausChannel bob_pass_channel() {
    KrausChannel ch;
    ch.basis = kBobBasis;
    CMat one(2);
    one.at(1, 1) = 1.0;
    CMat zero(2);
    zero.at(0, 0) = 1.0;
    ch.ops = {one, zero};
    return ch;
}

KrausChannel identity_channel(std::vector<std::string> basis) {
    KrausChannel ch;
    ch.ops = {CMat::identity(static_cast<int>(basis.size()))};
    ch.basis = std::move(basis);
    return ch;
}

namespace {

// Coupling between two occupation modes in the one-photon block (indices 1 and
// 2 of a 3-dim {vacuum, first, second} space); vacuum is fixed.
CMat mode_coupling(double theta) {
    CMat r = CMat::identity(3);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    r.at(1, 1) = c;
    r.at(1, 2) = -s;
    r.at(2, 1) = s;
    r.at(2, 2) = c;
    return r;
}

}  // namespace

KrausChannel inner_cycle_channel(int inner_cycles, bool blocked) {
    if (inner_cycles < 1) throw std::invalid_argument("inner_cycle_channel: N must be >= 1");
    const CMat coupling = mode_coupling(std::numbers::pi / inner_cycles);
    KrausChannel ch;
    ch.basis = kInnerJointBasis;
    if (blocked) {
        CMat absorb(3);
        absorb.at(0, 2) = 1.0;  // photon in b -> vacuum
        CMat keep(3);
        keep.at(0, 0) = 1.0;
        keep.at(1, 1) = 1.0;
        ch.ops = {absorb * coupling, keep * coupling};
    } else {
        ch.ops = {coupling};
    }
    return ch;
}

namespace {

// Partial trace over the b mode: the joint space {v, a1-photon, b-photon}
// collapses onto {0_a1, 1_a1}.
KrausChannel trace_out_b(const KrausChannel& joint) {
    KrausChannel r;
    r.basis = kA1Basis;
    double pruned_mass = 0.0;
    for (const auto& x : joint.ops) {
        CMat k0(2);  // b stays empty
        k0.at(0, 0) = x.at(0, 0);
        k0.at(0, 1) = x.at(0, 1);
        k0.at(1, 0) = x.at(1, 0);
        k0.at(1, 1) = x.at(1, 1);
        CMat k1(2);  // photon left in b; a1 output is empty
        k1.at(0, 0) = x.at(2, 0);
        k1.at(0, 1) = x.at(2, 1);
        for (auto& k : {k0, k1}) {
            const double f2 = k.frob2();
            if (f2 < kPruneNorm * kPruneNorm) {
                pruned_mass += f2;
                continue;
            }
            r.ops.push_back(k);
        }
    }
    if (pruned_mass > kPrunedMassBudget) {
        throw std::logic_error("trace_out_b: pruned operator mass exceeds budget");
    }
    return r;
}

bool contains_op(const KrausChannel& ch, const CMat& target, double tol) {
    for (const auto& x : ch.ops) {
        if (x.dim() == target.dim() && x.max_abs_diff(target) <= tol) return true;
    }
    return false;
}

}  // namespace

InnerChannels build_inner_channels(int inner_cycles) {
    const int n = inner_cycles;
    InnerChannels r;
    r.blocked = trace_out_b(power(inner_cycle_channel(n, true), n));
    r.passed = trace_out_b(power(inner_cycle_channel(n, false), n));

    // Self-check against the closed forms.
    const double c = std::cos(std::numbers::pi / (2.0 * n));
    const double s = std::sin(std::numbers::pi / (2.0 * n));
    const double retention = std::pow(c, n);
    CMat no_click(2);
    no_click.at(0, 0) = 1.0;
    no_click.at(1, 1) = retention;
    CMat last_loss(2);
    last_loss.at(0, 1) = std::pow(c, n - 1) * s;
    if (!contains_op(r.blocked, no_click, kChannelTol) ||
        !contains_op(r.blocked, last_loss, kChannelTol)) {
        throw std::logic_error("build_inner_channels: blocked channel deviates from closed form");
    }
    CMat transfer(2);
    transfer.at(0, 1) = 1.0;
    CMat vacuum(2);
    vacuum.at(0, 0) = 1.0;
    if (r.passed.ops.size() != 2 || !contains_op(r.passed, transfer, kChannelTol) ||
        !contains_op(r.passed, vacuum, kChannelTol)) {
        throw std::logic_error("build_inner_channels: passed channel deviates from closed form");
    }
    r.blocked.check_contractive();
    r.passed.check_contractive();
    return r;
}

namespace {

// Lift a channel on the a1 occupation onto the (a2, a1) joint space.
KrausChannel lift_inner_to_outer(const KrausChannel& a1_channel) {
    KrausChannel r;
    r.basis = kOuterBasis;
    for (const auto& x : a1_channel.ops) {
        if (std::abs(x.at(1, 0)) > kPruneNorm) {
            throw std::logic_error("lift_inner_to_outer: operator creates a photon in a1");
        }
        CMat l(3);
        l.at(0, 0) = x.at(0, 0);  // both modes empty
        l.at(1, 1) = x.at(0, 0);  // photon parked in a2, a1 empty
        l.at(0, 2) = x.at(0, 1);
        l.at(2, 2) = x.at(1, 1);
        r.ops.push_back(l);
    }
    return r;
}

}  // namespace

OuterChannels build_outer_channels(int outer_cycles, int inner_cycles) {
    if (outer_cycles < 1) throw std::invalid_argument("build_outer_channels: M must be >= 1");
    const InnerChannels inner = build_inner_channels(inner_cycles);
    const KrausChannel coupling = [&] {
        KrausChannel ch;
        ch.basis = kOuterBasis;
        ch.ops = {mode_coupling(std::numbers::pi / outer_cycles)};
        return ch;
    }();
    OuterChannels r;
    r.blocked = power(compose(lift_inner_to_outer(inner.blocked), coupling), outer_cycles);
    r.passed = power(compose(lift_inner_to_outer(inner.passed), coupling), outer_cycles);
    return r;
}

OuterCoefficients outer_coefficients(int outer_cycles, int inner_cycles) {
    if (outer_cycles < 1 || inner_cycles < 1) {
        throw std::invalid_argument("outer_coefficients: cycle counts must be >= 1");
    }
    // No-click block of the blocked outer channel: M products of the coupling
    // followed by the inner retention on a1.
    const double kappa = std::pow(std::cos(std::numbers::pi / (2.0 * inner_cycles)), inner_cycles);
    const double c = std::cos(std::numbers::pi / (2.0 * outer_cycles));
    const double s = std::sin(std::numbers::pi / (2.0 * outer_cycles));
    double t00 = 1.0, t01 = 0.0, t10 = 0.0, t11 = 1.0;  // (H, V) block
    for (int m = 0; m < outer_cycles; ++m) {
        const double r00 = c * t00 - s * t10;
        const double r01 = c * t01 - s * t11;
        const double r10 = kappa * (s * t00 + c * t10);
        const double r11 = kappa * (s * t01 + c * t11);
        t00 = r00;
        t01 = r01;
        t10 = r10;
        t11 = r11;
    }
    return {std::abs(t00), std::abs(t01), std::abs(t10), std::abs(t11)};
}

CMat simulator_channel_action(const CycleConfig& cfg, Policy policy, const CMat& rho) {
    if (rho.dim() != 3) {
        throw std::invalid_argument("simulator_channel_action: expected the (vacuum, H, V) basis");
    }
    LossLedger led_h, led_v;
    const PolState out_h = outer_run(PolState::h_photon(), cfg, policy, led_h);
    const PolState out_v = outer_run(PolState::v_photon(), cfg, policy, led_v);
    if (led_h.lost_da.size() != led_v.lost_da.size() ||
        led_h.lost_db.size() != led_v.lost_db.size()) {
        throw std::logic_error("simulator_channel_action: loss event streams misaligned");
    }

    std::vector<CMat> ops;
    CMat no_click(3);
    no_click.at(0, 0) = 1.0;
    no_click.at(1, 1) = out_h.amp_h;
    no_click.at(2, 1) = out_h.amp_v;
    no_click.at(1, 2) = out_v.amp_h;
    no_click.at(2, 2) = out_v.amp_v;
    ops.push_back(no_click);
    auto add_losses = [&](const std::vector<LossEvent>& eh, const std::vector<LossEvent>& ev) {
        for (std::size_t i = 0; i < eh.size(); ++i) {
            CMat l(3);
            l.at(0, 1) = eh[i].amp;
            l.at(0, 2) = ev[i].amp;
            if (l.frob2() > kPruneNorm * kPruneNorm) ops.push_back(std::move(l));
        }
    };
    add_losses(led_h.lost_da, led_v.lost_da);
    add_losses(led_h.lost_db, led_v.lost_db);

    CMat out(3);
    for (const auto& x : ops) out = out + x * rho * x.dagger();
    return out;
}

ChannelVerification verify_channels(int outer_cycles, int inner_cycles) {
    ChannelVerification rep;
    const int n = inner_cycles;
    const InnerChannels inner = build_inner_channels(n);

    // Closed-form deviations for the inner sets.
    const double c = std::cos(std::numbers::pi / (2.0 * n));
    const double s = std::sin(std::numbers::pi / (2.0 * n));
    double dev = 0.0;
    {
        CMat no_click(2);
        no_click.at(0, 0) = 1.0;
        no_click.at(1, 1) = std::pow(c, n);
        CMat last_loss(2);
        last_loss.at(0, 1) = std::pow(c, n - 1) * s;
        auto best_match = [&](const KrausChannel& ch, const CMat& target) {
            double best = 1e300;
            for (const auto& x : ch.ops) best = std::min(best, x.max_abs_diff(target));
            return best;
        };
        dev = std::max(dev, best_match(inner.blocked, no_click));
        dev = std::max(dev, best_match(inner.blocked, last_loss));
        CMat transfer(2);
        transfer.at(0, 1) = 1.0;
        CMat vacuum(2);
        vacuum.at(0, 0) = 1.0;
        dev = std::max(dev, best_match(inner.passed, transfer));
        dev = std::max(dev, best_match(inner.passed, vacuum));
    }
    rep.max_inner_closed_form_dev = dev;

    const OuterChannels outer = build_outer_channels(outer_cycles, inner_cycles);
    rep.max_completeness_defect = std::max(
        {inner.blocked.completeness_defect(), inner.passed.completeness_defect(),
         outer.blocked.completeness_defect(), outer.passed.completeness_defect()});

    // Channel action vs the step simulator on every basis density input.
    CycleConfig cfg;
    cfg.outer_cycles = outer_cycles;
    cfg.inner_cycles = inner_cycles;
    double sim_dev = 0.0;
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) {
            CMat rho(3);
            rho.at(x, y) = 1.0;
            const DensityOp rho_op{kOuterBasis, rho};
            const CMat via_blocked = apply(outer.blocked, rho_op).mat;
            const CMat via_passed = apply(outer.passed, rho_op).mat;
            sim_dev = std::max(sim_dev, via_blocked.max_abs_diff(
                                            simulator_channel_action(cfg, Policy::BlockAll, rho)));
            sim_dev = std::max(sim_dev, via_passed.max_abs_diff(
                                            simulator_channel_action(cfg, Policy::BlockNone, rho)));
        }
    }
    rep.max_simulator_dev = sim_dev;
    rep.coefficients = outer_coefficients(outer_cycles, inner_cycles);
    rep.ok = rep.max_inner_closed_form_dev <= kChannelTol &&
             rep.max_simulator_dev <= kChannelTol &&
             rep.max_completeness_defect <= kChannelTol;
    return rep;
}

}  // namespace efq
