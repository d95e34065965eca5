#include "efq/interferometer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace efq {

void CycleConfig::validate() const {
    if (outer_cycles < 1) throw std::invalid_argument("CycleConfig: outer_cycles must be >= 1");
    if (inner_cycles < 1) throw std::invalid_argument("CycleConfig: inner_cycles must be >= 1");
    if (!std::isfinite(inner_plate_offset)) {
        throw std::invalid_argument("CycleConfig: inner_plate_offset must be finite");
    }
}

Op2 inner_plate(const CycleConfig& cfg) {
    const double theta = std::numbers::pi / cfg.inner_cycles + cfg.inner_plate_offset;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Op2 r;
    r.m = {cplx(c), cplx(s), cplx(-s), cplx(c)};
    return r;
}

Op2 outer_plate(int outer_cycles) { return ry(std::numbers::pi / outer_cycles); }

BlockSchedule::BlockSchedule(const CycleConfig& cfg, std::vector<char> flags)
    : outer_(cfg.outer_cycles), steps_(cfg.inner_steps()), flags_(std::move(flags)) {
    if (flags_.size() != static_cast<std::size_t>(outer_) * static_cast<std::size_t>(steps_)) {
        throw std::invalid_argument("BlockSchedule: flag count does not match the configuration");
    }
}

BlockSchedule BlockSchedule::block_all(const CycleConfig& cfg) {
    cfg.validate();
    return BlockSchedule(cfg, std::vector<char>(
        static_cast<std::size_t>(cfg.outer_cycles) * cfg.inner_steps(), 1));
}

BlockSchedule BlockSchedule::block_none(const CycleConfig& cfg) {
    cfg.validate();
    return BlockSchedule(cfg, std::vector<char>(
        static_cast<std::size_t>(cfg.outer_cycles) * cfg.inner_steps(), 0));
}

BlockSchedule BlockSchedule::pass_midblock(const CycleConfig& cfg) {
    cfg.validate();
    if (!cfg.midblock_pass) {
        throw std::invalid_argument("BlockSchedule: pass_midblock requires midblock_pass geometry");
    }
    const int steps = cfg.inner_steps();
    std::vector<char> flags(static_cast<std::size_t>(cfg.outer_cycles) * steps, 0);
    for (int m = 0; m < cfg.outer_cycles; ++m) {
        flags[static_cast<std::size_t>(m) * steps + (cfg.inner_cycles - 1)] = 1;
    }
    return BlockSchedule(cfg, std::move(flags));
}

BlockSchedule BlockSchedule::for_policy(const CycleConfig& cfg, Policy policy) {
    switch (policy) {
        case Policy::BlockAll: return block_all(cfg);
        case Policy::BlockNone: return block_none(cfg);
        case Policy::PassMidblock: return pass_midblock(cfg);
    }
    throw std::invalid_argument("BlockSchedule: unknown policy");
}

BlockSchedule BlockSchedule::from_flags(const CycleConfig& cfg, std::vector<char> flags) {
    cfg.validate();
    return BlockSchedule(cfg, std::move(flags));
}

std::span<const char> BlockSchedule::inner_slice(int outer_index) const {
    if (outer_index < 0 || outer_index >= outer_) {
        throw std::invalid_argument("BlockSchedule: outer index out of range");
    }
    return {flags_.data() + static_cast<std::size_t>(outer_index) * steps_,
            static_cast<std::size_t>(steps_)};
}

double LossLedger::total_lost_prob() const {
    double p = discarded;
    for (const auto& e : lost_da) p += std::norm(e.amp);
    for (const auto& e : lost_db) p += std::norm(e.amp);
    return p;
}

void LossLedger::clear() {
    lost_da.clear();
    lost_db.clear();
    discarded = 0.0;
}

namespace {

// Resolve a channel crossing: a blocked crossing is absorbed on Bob's side,
// an unblocked one returns to the chain carrying the visited tag.
void resolve_crossing(PolState& st, bool blocked, int slot, LossLedger& ledger) {
    if (blocked) {
        ledger.lost_db.push_back({slot, st.amp_h});
        st.amp_h = 0.0;
        st.tag_h = 0.0;
    } else {
        st.tag_h = st.amp_h;
    }
}

}  // namespace

PolState inner_cycles(PolState state, const CycleConfig& cfg, std::span<const char> sched,
                      LossLedger& ledger, int slot_base) {
    cfg.validate();
    const int steps = cfg.inner_steps();
    if (sched.size() != static_cast<std::size_t>(steps)) {
        throw std::invalid_argument("inner_cycles: schedule length mismatch");
    }
    if (state.amp_h != cplx(0.0) || state.tag_h != cplx(0.0)) {
        throw std::invalid_argument("inner_cycles: chain input must be the inner-arm V component");
    }
    // The visited tag rides the channel mode: it is set when a crossing
    // returns, attenuated by the plate's H retention, and removed with the H
    // component at absorption or at the chain exit. The part the plate turns
    // toward V merges into the circulating amplitude, where it is not
    // operationally distinguishable; the input's own V tag simply rescales
    // with the surviving V amplitude.
    const cplx v_in = state.amp_v;
    const cplx tag_v_in = state.tag_v;
    state.tag_v = 0.0;
    const Op2 plate = inner_plate(cfg);
    const double h_keep = plate.at(0, 0).real();
    for (int j = 0; j < steps; ++j) {
        if (j > 0) resolve_crossing(state, sched[j - 1] != 0, slot_base + j - 1, ledger);
        const cplx riding_tag = h_keep * state.tag_h;
        state = apply(plate, state);
        state.tag_h = riding_tag;
        state.tag_v = 0.0;
    }
    state.tag_v = (v_in == cplx(0.0)) ? cplx(0.0) : tag_v_in * (state.amp_v / v_in);
    return state;
}

PolState inner_chain(PolState state, const CycleConfig& cfg, std::span<const char> sched,
                     LossLedger& ledger, int slot_base) {
    state = inner_cycles(state, cfg, sched, ledger, slot_base);
    const int last = cfg.inner_steps() - 1;
    resolve_crossing(state, sched[last] != 0, slot_base + last, ledger);
    // Chain-exit PBS: any surviving H component has been across the channel.
    ledger.lost_da.push_back({slot_base + last, state.amp_h});
    state.amp_h = 0.0;
    state.tag_h = 0.0;
    return state;
}

PolState outer_run(PolState state, const CycleConfig& cfg, const BlockSchedule& sched,
                   LossLedger& ledger) {
    cfg.validate();
    if (sched.outer_cycles() != cfg.outer_cycles || sched.inner_steps() != cfg.inner_steps()) {
        throw std::invalid_argument("outer_run: schedule does not match the configuration");
    }
    const Op2 plate = outer_plate(cfg.outer_cycles);
    const int steps = cfg.inner_steps();
    for (int m = 0; m < cfg.outer_cycles; ++m) {
        state = apply(plate, state);
        PolState inner_arm{0.0, state.amp_v, 0.0, state.tag_v};
        const cplx outer_amp = state.amp_h;
        const cplx outer_tag = state.tag_h;
        inner_arm = inner_chain(inner_arm, cfg, sched.inner_slice(m), ledger, m * steps);
        state = {outer_amp, inner_arm.amp_v, outer_tag, inner_arm.tag_v};
    }
    return state;
}

PolState outer_run(PolState state, const CycleConfig& cfg, Policy policy, LossLedger& ledger) {
    return outer_run(std::move(state), cfg, BlockSchedule::for_policy(cfg, policy), ledger);
}

double bob_tag_weight(const PolState& state) { return state.tag_norm2(); }

}  // namespace efq
