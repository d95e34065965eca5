#pragma once

#include <span>
#include <utility>
#include <vector>

#include "efq/interferometer.hpp"

namespace efq {

enum class PhaseUnitMode {
    Phase,      // phase plate in place: e^{i pi/L} per unblocked run
    Dit,        // plate removed; exit time bin carries a base-L symbol
    DelayOnly,  // plate removed; used as a pure time-delay stage
};

enum class InputPol { H, V };

// One Phase Unit: up to L+1 runs of the interferometer. Bob passes for k runs,
// then blocks once, which flips the photon to V and ejects it in time bin k;
// any H residue from the blocked run is kept circulating with Bob passing and
// is discarded at the end.
struct PhaseUnitConfig {
    CycleConfig cycle;
    int runs_max = 1;  // L
    int k = 0;         // 0 <= k <= L
    PhaseUnitMode mode = PhaseUnitMode::Phase;
    InputPol input_pol = InputPol::H;
    int phase_sign = +1;  // plate tilt; -1 accumulates e^{-ik pi/L} instead

    void validate() const;
};

struct PhaseUnitResult {
    PolState out_state;   // post-selected and renormalized; phase kept relative to the input
    cplx transmission{};  // raw surviving amplitude for a unit-amplitude input
    double survival_prob = 0.0;
    int exit_bin = 0;
    LossLedger ledger;
};

PhaseUnitResult run_phase_unit(const PhaseUnitConfig& cfg);

// Dit transmission: requires mode == Dit; returns the exit time bin (= k).
int send_dit(const PhaseUnitConfig& cfg);

struct SurfacePoint {
    int outer_cycles = 0;
    int inner_cycles = 0;
    double survival = 0.0;
};

// Survival probability over a grid of (M, N) for a fixed k. Each point is
// evaluated at two distinct L >= k and the results are required to agree to
// 1e-12 (survival carries no L dependence).
std::vector<SurfacePoint> survival_surface(std::span<const std::pair<int, int>> grid, int k);

}  // namespace efq
