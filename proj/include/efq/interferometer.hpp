#pragma once

#include <span>
#include <vector>

#include "efq/gates.hpp"

namespace efq {

// Geometry of one run: M outer cycles, each containing N inner cycles.
//
// midblock_pass doubles the inner cycle count to 2N; a "pass" run then blocks
// only the N-th of the 2N cycles instead of never blocking. With ideal plates
// this leaves the run's action unchanged, and with an inner plate angle offset
// it suppresses the residual V leakage from first to second order.
struct CycleConfig {
    int outer_cycles = 1;  // M
    int inner_cycles = 1;  // N
    bool midblock_pass = false;
    double inner_plate_offset = 0.0;  // radians added to every inner plate angle

    int inner_steps() const { return midblock_pass ? 2 * inner_cycles : inner_cycles; }
    void validate() const;
};

enum class Policy {
    BlockAll,      // Bob blocks every inner cycle
    BlockNone,     // Bob never blocks
    PassMidblock,  // 2N cycles, block only the N-th (requires midblock_pass)
};

// Per-inner-cycle blocking decisions for one full run: outer_cycles slices of
// inner_steps() booleans each.
class BlockSchedule {
  public:
    static BlockSchedule block_all(const CycleConfig& cfg);
    static BlockSchedule block_none(const CycleConfig& cfg);
    static BlockSchedule pass_midblock(const CycleConfig& cfg);
    static BlockSchedule for_policy(const CycleConfig& cfg, Policy policy);
    static BlockSchedule from_flags(const CycleConfig& cfg, std::vector<char> flags);

    std::span<const char> inner_slice(int outer_index) const;
    int outer_cycles() const { return outer_; }
    int inner_steps() const { return steps_; }
    std::size_t size() const { return flags_.size(); }
    bool blocked(std::size_t i) const { return flags_[i] != 0; }

  private:
    BlockSchedule(const CycleConfig& cfg, std::vector<char> flags);

    int outer_ = 0;
    int steps_ = 0;
    std::vector<char> flags_;
};

// One absorbed amplitude. `slot` is a deterministic position id (fixed by the
// configuration and schedule, independent of the input state), so loss events
// from runs with different inputs can be paired up.
struct LossEvent {
    int slot = 0;
    cplx amp{};
};

struct LossLedger {
    std::vector<LossEvent> lost_da;  // chain-exit losses toward detector D_A
    std::vector<LossEvent> lost_db;  // blocked-channel losses toward detector D_B
    double discarded = 0.0;          // attenuators and end-of-device residue

    double total_lost_prob() const;
    void clear();
};

// The chain of N (or 2N) inner interferometers acting on the inner-arm V
// component. Input must carry no H amplitude.
//
// inner_cycles returns the state after the last inner plate with the final
// channel crossing still unresolved: the H component sits in the channel on
// Bob's side. inner_chain resolves that crossing (blocked -> D_B) and then
// applies the chain-exit PBS, which sends any returned H component to D_A.
PolState inner_cycles(PolState state, const CycleConfig& cfg, std::span<const char> sched,
                      LossLedger& ledger, int slot_base = 0);
PolState inner_chain(PolState state, const CycleConfig& cfg, std::span<const char> sched,
                     LossLedger& ledger, int slot_base = 0);

// M outer cycles: outer plate, PBS split, inner chain on the V arm, recombine.
// The final PBS of the device only routes the output components; both are
// returned in the state.
PolState outer_run(PolState state, const CycleConfig& cfg, const BlockSchedule& sched,
                   LossLedger& ledger);
PolState outer_run(PolState state, const CycleConfig& cfg, Policy policy, LossLedger& ledger);

// Squared norm of the surviving sub-amplitude that has ever been across the
// channel to Bob.
double bob_tag_weight(const PolState& state);

// Plate orientations used by the device. Inner plates rotate the circulating V
// component toward H with positive sense; outer plates rotate H toward V with
// positive sense. Both are R_y rotations up to basis-order convention; the
// orientations are fixed by the device's ket-level behaviour.
Op2 inner_plate(const CycleConfig& cfg);
Op2 outer_plate(int outer_cycles);

}  // namespace efq
