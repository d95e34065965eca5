#include "efq/phase_unit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace efq {

void PhaseUnitConfig::validate() const {
    cycle.validate();
    if (runs_max < 1) throw std::invalid_argument("PhaseUnitConfig: runs_max must be >= 1");
    if (k < 0 || k > runs_max) {
        throw std::invalid_argument("PhaseUnitConfig: k must lie in [0, runs_max]");
    }
    if (phase_sign != 1 && phase_sign != -1) {
        throw std::invalid_argument("PhaseUnitConfig: phase_sign must be +1 or -1");
    }
}

namespace {

// Strip the V component from the state (exit port handling / stray leakage).
cplx take_v(PolState& st, cplx& tag_out) {
    const cplx v = st.amp_v;
    tag_out = st.tag_v;
    st.amp_v = 0.0;
    st.tag_v = 0.0;
    return v;
}

}  // namespace

PhaseUnitResult run_phase_unit(const PhaseUnitConfig& cfg) {
    cfg.validate();

    PhaseUnitResult res;
    res.exit_bin = cfg.k;

    // The in-device dynamics are real-valued: the input is |H> after the
    // optional entry flip, and all plates are real matrices. The plate phase is
    // a global factor on the circulating component between runs, so it is
    // accumulated separately; survival_prob is the squared real exit amplitude
    // (the plate has unit modulus).
    PolState st = PolState::h_photon();
    const Policy pass_policy = cfg.cycle.midblock_pass ? Policy::PassMidblock : Policy::BlockNone;
    const BlockSchedule pass_sched = BlockSchedule::for_policy(cfg.cycle, pass_policy);
    const BlockSchedule block_sched = BlockSchedule::block_all(cfg.cycle);
    const bool plated = cfg.mode == PhaseUnitMode::Phase;
    const cplx per_run_phase =
        plated ? std::polar(1.0, cfg.phase_sign * std::numbers::pi / cfg.runs_max) : cplx(1.0);

    cplx phase_acc = 1.0;
    for (int r = 0; r < cfg.k; ++r) {
        st = outer_run(st, cfg.cycle, pass_sched, res.ledger);
        cplx tag;
        const cplx stray = take_v(st, tag);  // exactly zero with ideal plates
        res.ledger.discarded += std::norm(stray);
        phase_acc *= per_run_phase;  // double pass of the plate before re-entry
    }

    st = outer_run(st, cfg.cycle, block_sched, res.ledger);
    cplx exit_tag;
    const cplx exit_amp = take_v(st, exit_tag);  // real by construction

    // Keep the erroneous H residue circulating with Bob passing, then discard it.
    for (int r = cfg.k + 1; r <= cfg.runs_max; ++r) {
        st = outer_run(st, cfg.cycle, pass_sched, res.ledger);
        cplx tag;
        res.ledger.discarded += std::norm(take_v(st, tag));
    }
    res.ledger.discarded += st.norm2();

    res.survival_prob = std::norm(exit_amp);
    res.transmission = exit_amp * phase_acc;
    const cplx out_tag = exit_tag * phase_acc;
    // Exit flip returns the ejected component to H; the V-input variant has the
    // flip at the entry instead, so its output stays V.
    PolState out;
    if (cfg.input_pol == InputPol::H) {
        out = {res.transmission, 0.0, out_tag, 0.0};
    } else {
        out = {0.0, res.transmission, 0.0, out_tag};
    }
    res.out_state = out.normalized();
    return res;
}

int send_dit(const PhaseUnitConfig& cfg) {
    if (cfg.mode != PhaseUnitMode::Dit) {
        throw std::invalid_argument("send_dit: configuration must use dit mode");
    }
    return run_phase_unit(cfg).exit_bin;
}

std::vector<SurfacePoint> survival_surface(std::span<const std::pair<int, int>> grid, int k) {
    if (grid.empty()) throw std::invalid_argument("survival_surface: empty grid");
    if (k < 0) throw std::invalid_argument("survival_surface: k must be >= 0");

    std::vector<SurfacePoint> out;
    out.reserve(grid.size());
    for (const auto& [m, n] : grid) {
        PhaseUnitConfig cfg;
        cfg.cycle.outer_cycles = m;
        cfg.cycle.inner_cycles = n;
        cfg.k = k;
        cfg.runs_max = k + 8;
        const double s1 = run_phase_unit(cfg).survival_prob;
        cfg.runs_max = 2 * k + 17;
        const double s2 = run_phase_unit(cfg).survival_prob;
        if (std::abs(s1 - s2) > kTol) {
            throw std::logic_error("survival_surface: survival depends on the run budget L");
        }
        out.push_back({m, n, s1});
    }
    return out;
}

}  // namespace efq
