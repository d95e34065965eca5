#pragma once

#include <vector>

#include "efq/phase_unit.hpp"

namespace efq {

// Bob's program: quantized blocking counts at resolution L'. Stage s with
// count k enacts a rotation by angle 2*pi*k/L'.
struct BobProgram {
    int beta = 0;
    int gamma = 0;
    int delta = 0;
    int resolution = 1;        // L'
    double alpha_global = 0.0; // global phase from compilation; never executed
    bool equalize = false;

    void validate() const;
};

struct ZyzAngles {
    double alpha = 0.0;  // u = e^{i alpha} rz(beta) ry(gamma) rz(delta)
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

// Euler decomposition of a 2x2 unitary; beta and delta are normalized into
// [0, 2pi), gamma into [0, pi], with alpha adjusted so the composition
// reproduces u exactly (including phase). At gamma in {0, pi} the z rotation
// is folded entirely into beta and delta is fixed to 0.
ZyzAngles zyz_decompose(const Op2& u);
Op2 zyz_compose(const ZyzAngles& a);

// Quantizes the decomposition of u to the nearest multiple of 2pi/resolution
// (ties toward the smaller count). Throws for non-unitary input.
BobProgram compile_program(const Op2& u, int resolution);

// Shared geometry for the two paired phase units of one rotation stage.
struct StagePair {
    CycleConfig cycle;
    int runs_max = 1;  // L
};

struct StageResult {
    PhaseUnitResult h_arm;
    PhaseUnitResult v_arm;
    int exit_bin = 0;
    double survival = 0.0;
};

struct RotatorOutput {
    PolState state;
    StageResult stage;
};

// Paired phase units: the H component picks up e^{-ik pi/L}, the V component
// e^{+ik pi/L}, so the recombined map is rz(2 k pi / L) times a common real
// attenuation.
RotatorOutput rz_rotator(const PolState& state, int k, const StagePair& pair,
                         PhaseUnitMode mode = PhaseUnitMode::Phase);

// rz stage sandwiched between the quarter wave plates (QWP^dagger on entry,
// QWP on exit), which turns it into ry(2 k pi / L).
RotatorOutput ry_rotator(const PolState& state, int k, const StagePair& pair);

struct ProtocolResult {
    PolState out_state;  // post-selected, renormalized
    double total_survival = 0.0;
    long exit_bin_total = 0;
    std::vector<StageResult> per_stage;  // delta, gamma, beta [, equalizer]
};

// Full pipeline: rz(delta'), ry(gamma'), rz(beta') stages in that temporal
// order, plus the optional delay-only equalizer pair with k = 3L'-beta-gamma-
// delta, which pins the total exit bin to 3L'.
ProtocolResult run_protocol(const PolState& state, const BobProgram& prog,
                            const CycleConfig& cycle);

}  // namespace efq
