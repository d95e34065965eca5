#pragma once

#include "efq/interferometer.hpp"

namespace efq {

// Single-shot ry rotation without the phase module: Bob passes for the first
// M-k outer cycles and blocks for the last k, while Alice attenuates the outer
// arm by cos(pi/2N)^N per outer cycle to cancel the finite-N error. The
// post-selected output of an H photon is cos(k pi/2M)|H> + sin(k pi/2M)|V>,
// independent of N.
struct RyDirectConfig {
    CycleConfig cycle;
    int k = 0;  // 0 <= k <= M

    void validate() const;
};

struct RyDirectResult {
    PolState out_state;  // post-selected, renormalized
    double survival_prob = 0.0;
    LossLedger ledger;
};

RyDirectResult run_ry_direct(const RyDirectConfig& cfg);

// Arbitrary-input extension: PBS split, the rotation applied per component
// (the V branch is flipped to H first and phase-flipped/flipped back on exit),
// then a 50:50 recombination that succeeds half the time.
struct RyDirectArbitraryResult {
    PolState out_state;  // post-selected, renormalized
    double success_prob = 0.0;
};

RyDirectArbitraryResult run_ry_direct_arbitrary(const PolState& state, const RyDirectConfig& cfg);

}  // namespace efq
