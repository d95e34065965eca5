#include "efq/ry_direct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace efq {

void RyDirectConfig::validate() const {
    cycle.validate();
    if (k < 0 || k > cycle.outer_cycles) {
        throw std::invalid_argument("RyDirectConfig: k must lie in [0, outer_cycles]");
    }
}

namespace {

// Step simulation for an H input of unit amplitude; returns the unnormalized
// surviving state. The outer-arm attenuator sits immediately before the
// recombination of each outer cycle.
PolState propagate(const RyDirectConfig& cfg, LossLedger& ledger) {
    const CycleConfig& cyc = cfg.cycle;
    const int m_total = cyc.outer_cycles;
    const int steps = cyc.inner_steps();
    const double atten = std::pow(std::cos(std::numbers::pi / (2.0 * cyc.inner_cycles)),
                                  cyc.inner_cycles);
    const Op2 plate = outer_plate(m_total);
    const BlockSchedule pass = BlockSchedule::for_policy(
        cyc, cyc.midblock_pass ? Policy::PassMidblock : Policy::BlockNone);
    const BlockSchedule block = BlockSchedule::block_all(cyc);

    PolState st = PolState::h_photon();
    for (int m = 0; m < m_total; ++m) {
        st = apply(plate, st);
        const bool blocked = m >= m_total - cfg.k;
        PolState inner_arm{0.0, st.amp_v, 0.0, st.tag_v};
        cplx outer_amp = st.amp_h;
        cplx outer_tag = st.tag_h;
        inner_arm = inner_chain(inner_arm, cyc, (blocked ? block : pass).inner_slice(m),
                                ledger, m * steps);
        ledger.discarded += std::norm(outer_amp) * (1.0 - atten * atten);
        outer_amp *= atten;
        outer_tag *= atten;
        st = {outer_amp, inner_arm.amp_v, outer_tag, inner_arm.tag_v};
    }
    return st;
}

}  // namespace

RyDirectResult run_ry_direct(const RyDirectConfig& cfg) {
    cfg.validate();
    RyDirectResult res;
    const PolState st = propagate(cfg, res.ledger);
    res.survival_prob = st.norm2();
    res.out_state = st.normalized();
    return res;
}

RyDirectArbitraryResult run_ry_direct_arbitrary(const PolState& state, const RyDirectConfig& cfg) {
    cfg.validate();
    if (std::abs(state.norm2() - 1.0) > 1e-9) {
        throw std::invalid_argument("run_ry_direct_arbitrary: input must be normalized");
    }
    LossLedger scratch;
    const PolState branch = propagate(cfg, scratch);  // (cos, sin) times the survival amplitude

    // H branch: the rotation as-is. V branch: flip to H, rotate, then phase
    // flip and polarisation flip on exit, which lands it on (-sin, cos).
    const cplx h_in = state.amp_h;
    const cplx v_in = state.amp_v;
    PolState combined;
    combined.amp_h = h_in * branch.amp_h - v_in * branch.amp_v;
    combined.amp_v = h_in * branch.amp_v + v_in * branch.amp_h;
    // 50:50 recombination: the success port takes 1/sqrt(2) of each branch.
    combined.amp_h /= std::numbers::sqrt2;
    combined.amp_v /= std::numbers::sqrt2;

    RyDirectArbitraryResult res;
    res.success_prob = combined.norm2();
    res.out_state = combined.normalized();
    return res;
}

}  // namespace efq
