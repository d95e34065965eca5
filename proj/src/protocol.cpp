#include "efq/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace efq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a, int& half_turns) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // rz(a + 2pi) = -rz(a): track the sign flips so the composition stays exact.
    half_turns += static_cast<int>(std::llround((w - a) / kTwoPi));
    return w;
}

}  // namespace

void BobProgram::validate() const {
    if (resolution < 1) throw std::invalid_argument("BobProgram: resolution must be >= 1");
    auto in_range = [&](int k) { return k >= 0 && k <= resolution; };
    if (!in_range(beta) || !in_range(gamma) || !in_range(delta)) {
        throw std::invalid_argument("BobProgram: counts must lie in [0, resolution]");
    }
}

ZyzAngles zyz_decompose(const Op2& u) {
    if (!u.is_unitary(1e-10)) {
        throw std::invalid_argument("zyz_decompose: matrix is not unitary");
    }
    double alpha = 0.5 * std::arg(u.det());
    const Op2 su = std::polar(1.0, -alpha) * u;  // special unitary

    const double a00 = std::abs(su.at(0, 0));
    const double a10 = std::abs(su.at(1, 0));
    double beta = 0.0, gamma = 0.0, delta = 0.0;
    constexpr double kLock = 1e-13;
    if (a10 <= kLock) {
        beta = -2.0 * std::arg(su.at(0, 0));
    } else if (a00 <= kLock) {
        gamma = std::numbers::pi;
        beta = 2.0 * std::arg(su.at(1, 0));
    } else {
        gamma = 2.0 * std::atan2(a10, a00);
        const double sum = -2.0 * std::arg(su.at(0, 0));
        const double diff = 2.0 * std::arg(su.at(1, 0));
        beta = 0.5 * (sum + diff);
        delta = 0.5 * (sum - diff);
    }

    int half_turns = 0;
    beta = wrap_angle(beta, half_turns);
    delta = wrap_angle(delta, half_turns);
    if (half_turns % 2 != 0) alpha += std::numbers::pi;
    return {alpha, beta, gamma, delta};
}

Op2 zyz_compose(const ZyzAngles& a) {
    return std::polar(1.0, a.alpha) * (rz(a.beta) * ry(a.gamma) * rz(a.delta));
}

BobProgram compile_program(const Op2& u, int resolution) {
    if (resolution < 1) throw std::invalid_argument("compile_program: resolution must be >= 1");
    const ZyzAngles a = zyz_decompose(u);
    auto quantize = [&](double angle) {
        const double x = angle * resolution / kTwoPi;
        // nearest multiple, ties toward the smaller count
        long k = static_cast<long>(std::ceil(x - 0.5));
        if (k < 0) k = 0;
        if (k > resolution) k = resolution;
        return static_cast<int>(k);
    };
    BobProgram prog;
    prog.beta = quantize(a.beta);
    prog.gamma = quantize(a.gamma);
    prog.delta = quantize(a.delta);
    prog.resolution = resolution;
    prog.alpha_global = a.alpha;
    return prog;
}

RotatorOutput rz_rotator(const PolState& state, int k, const StagePair& pair,
                         PhaseUnitMode mode) {
    PhaseUnitConfig hcfg{pair.cycle, pair.runs_max, k, mode, InputPol::H, -1};
    PhaseUnitConfig vcfg{pair.cycle, pair.runs_max, k, mode, InputPol::V, +1};
    const PhaseUnitResult hr = run_phase_unit(hcfg);
    const PhaseUnitResult vr = run_phase_unit(vcfg);
    if (hr.exit_bin != vr.exit_bin ||
        std::abs(hr.survival_prob - vr.survival_prob) > kTol) {
        throw std::logic_error("rz_rotator: paired units fell out of step");
    }

    RotatorOutput out;
    out.state.amp_h = state.amp_h * hr.transmission;
    out.state.amp_v = state.amp_v * vr.transmission;
    out.state.tag_h = state.tag_h * hr.transmission;
    out.state.tag_v = state.tag_v * vr.transmission;
    out.stage = {hr, vr, hr.exit_bin, hr.survival_prob};
    return out;
}

RotatorOutput ry_rotator(const PolState& state, int k, const StagePair& pair) {
    RotatorOutput out = rz_rotator(apply(qwp_dagger(), state), k, pair);
    out.state = apply(qwp(), out.state);
    return out;
}

ProtocolResult run_protocol(const PolState& state, const BobProgram& prog,
                            const CycleConfig& cycle) {
    prog.validate();
    cycle.validate();
    const double in_norm2 = state.norm2();
    if (in_norm2 <= 0.0) throw std::invalid_argument("run_protocol: input state is zero");

    const StagePair pair{cycle, prog.resolution};
    ProtocolResult res;
    PolState st = state;

    auto push = [&](RotatorOutput&& r) {
        st = r.state;
        res.exit_bin_total += r.stage.exit_bin;
        res.per_stage.push_back(std::move(r.stage));
    };
    push(rz_rotator(st, prog.delta, pair));
    push(ry_rotator(st, prog.gamma, pair));
    push(rz_rotator(st, prog.beta, pair));
    if (prog.equalize) {
        const StagePair eq_pair{cycle, 3 * prog.resolution};
        const int eq_k = 3 * prog.resolution - prog.beta - prog.gamma - prog.delta;
        push(rz_rotator(st, eq_k, eq_pair, PhaseUnitMode::DelayOnly));
    }

    res.total_survival = st.norm2() / in_norm2;
    res.out_state = st.normalized();
    return res;
}

}  // namespace efq
